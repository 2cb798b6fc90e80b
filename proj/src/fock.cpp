#include "rsim/fock.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace rsim {

namespace {

std::mutex g_warn_mutex;
WarningSink g_warn_sink;

void require_same_register(const ModeRegister& a, const ModeRegister& b, const char* where) {
  if (a != b) {
    throw std::invalid_argument(std::string(where) + ": register mismatch (" + a.describe() + " vs " +
                                b.describe() + ")");
  }
}

struct UnionFind {
  std::vector<Index> parent;
  explicit UnionFind(Index n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), Index{0});
  }
  Index find(Index x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(Index a, Index b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) std::swap(a, b);
    parent[a] = b;
  }
};

}  // namespace

void set_warning_sink(WarningSink sink) {
  std::lock_guard<std::mutex> lock(g_warn_mutex);
  g_warn_sink = std::move(sink);
}

void warn(const std::string& message) {
  std::lock_guard<std::mutex> lock(g_warn_mutex);
  if (g_warn_sink) {
    g_warn_sink(message);
  } else {
    std::cerr << "warning: " << message << "\n";
  }
}

// ---------------------------------------------------------------- register

ModeRegister::ModeRegister(std::vector<std::string> labels, std::vector<int> cutoffs)
    : labels_(std::move(labels)), cutoffs_(std::move(cutoffs)) {
  if (labels_.empty()) throw std::invalid_argument("register needs at least one mode");
  if (labels_.size() != cutoffs_.size()) {
    throw std::invalid_argument("register: label and cutoff counts differ");
  }
  std::set<std::string> seen;
  for (const auto& l : labels_) {
    if (l.empty()) throw std::invalid_argument("register: empty mode label");
    if (!seen.insert(l).second) throw std::invalid_argument("register: duplicate label '" + l + "'");
  }
  for (int c : cutoffs_) {
    if (c < 1) throw std::invalid_argument("register: cutoff must be >= 1");
  }
  strides_.assign(labels_.size(), 1);
  dim_ = 1;
  for (std::size_t i = labels_.size(); i-- > 0;) {
    strides_[i] = dim_;
    const Index d = cutoffs_[i] + 1;
    if (dim_ > std::numeric_limits<int>::max() / d) {
      throw InfeasibleCutoff("register dimension exceeds index range", std::numeric_limits<std::size_t>::max());
    }
    dim_ *= d;
  }
}

ModeRegister make_register(const std::vector<std::string>& labels, const std::vector<int>& cutoffs) {
  return ModeRegister(labels, cutoffs);
}

bool ModeRegister::contains(const std::string& label) const {
  return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

std::size_t ModeRegister::position(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw std::invalid_argument("unknown mode label '" + label + "'");
  return static_cast<std::size_t>(it - labels_.begin());
}

Index ModeRegister::index(const std::vector<int>& occ) const {
  if (occ.size() != labels_.size()) throw std::invalid_argument("occupation vector has wrong length");
  Index idx = 0;
  for (std::size_t i = 0; i < occ.size(); ++i) {
    if (occ[i] < 0 || occ[i] > cutoffs_[i]) throw std::out_of_range("occupation outside cutoff");
    idx += occ[i] * strides_[i];
  }
  return idx;
}

std::vector<int> ModeRegister::occupations(Index idx) const {
  std::vector<int> occ(labels_.size());
  for (std::size_t i = 0; i < labels_.size(); ++i) occ[i] = occupation(idx, i);
  return occ;
}

ModeRegister ModeRegister::with_cutoff(const std::string& label, int cutoff) const {
  auto cuts = cutoffs_;
  cuts[position(label)] = cutoff;
  return ModeRegister(labels_, cuts);
}

ModeRegister ModeRegister::sub_register(const std::vector<std::string>& keep) const {
  if (keep.empty()) throw std::invalid_argument("empty keep set");
  std::vector<bool> flag(labels_.size(), false);
  for (const auto& k : keep) flag[position(k)] = true;
  std::vector<std::string> l;
  std::vector<int> c;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (flag[i]) {
      l.push_back(labels_[i]);
      c.push_back(cutoffs_[i]);
    }
  }
  return ModeRegister(l, c);
}

ModeRegister ModeRegister::relabeled(const std::vector<std::string>& labels) const {
  return ModeRegister(labels, cutoffs_);
}

std::string ModeRegister::describe() const {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    os << (i ? ", " : "") << labels_[i] << ":" << cutoffs_[i];
  }
  os << "]";
  return os.str();
}

// ---------------------------------------------------------------- operators

FockOperator::FockOperator(ModeRegister reg, SpMat matrix) : reg_(std::move(reg)), m_(std::move(matrix)) {
  if (m_.rows() != reg_.dimension() || m_.cols() != reg_.dimension()) {
    throw std::invalid_argument("operator size does not match register dimension");
  }
  m_.makeCompressed();
}

FockOperator FockOperator::adjoint() const {
  SpMat a = m_.adjoint();
  return FockOperator(reg_, std::move(a));
}

double FockOperator::hermiticity_residual() const {
  SpMat d = m_ - SpMat(m_.adjoint());
  double r = 0.0;
  for (Index k = 0; k < d.outerSize(); ++k) {
    for (SpMat::InnerIterator it(d, k); it; ++it) r = std::max(r, std::abs(it.value()));
  }
  return r;
}

double FockOperator::unitarity_residual() const {
  Mat u = dense();
  Mat p = u.adjoint() * u - Mat::Identity(u.rows(), u.cols());
  return p.cwiseAbs().maxCoeff();
}

FockOperator FockOperator::operator+(const FockOperator& o) const {
  require_same_register(reg_, o.reg_, "operator sum");
  return FockOperator(reg_, SpMat(m_ + o.m_));
}

FockOperator FockOperator::operator-(const FockOperator& o) const {
  require_same_register(reg_, o.reg_, "operator difference");
  return FockOperator(reg_, SpMat(m_ - o.m_));
}

FockOperator FockOperator::operator*(const FockOperator& o) const {
  require_same_register(reg_, o.reg_, "operator product");
  return FockOperator(reg_, SpMat(m_ * o.m_));
}

FockOperator FockOperator::operator*(cplx s) const { return FockOperator(reg_, SpMat(m_ * s)); }

namespace {

// Shared builder for single-mode ladder and number operators.
FockOperator ladder(const ModeRegister& reg, const std::string& label, int kind) {
  const std::size_t p = reg.position(label);
  const Index stride = reg.stride(p);
  const int cut = reg.cutoffs()[p];
  std::vector<Eigen::Triplet<cplx>> t;
  t.reserve(static_cast<std::size_t>(reg.dimension()));
  for (Index col = 0; col < reg.dimension(); ++col) {
    const int n = reg.occupation(col, p);
    if (kind == 0 && n > 0) {
      t.emplace_back(col - stride, col, std::sqrt(static_cast<double>(n)));
    } else if (kind == 1 && n < cut) {
      t.emplace_back(col + stride, col, std::sqrt(static_cast<double>(n + 1)));
    } else if (kind == 2 && n > 0) {
      t.emplace_back(col, col, static_cast<double>(n));
    }
  }
  SpMat m(reg.dimension(), reg.dimension());
  m.setFromTriplets(t.begin(), t.end());
  return FockOperator(reg, std::move(m));
}

}  // namespace

FockOperator annihilation(const ModeRegister& reg, const std::string& label) { return ladder(reg, label, 0); }
FockOperator creation(const ModeRegister& reg, const std::string& label) { return ladder(reg, label, 1); }
FockOperator number_operator(const ModeRegister& reg, const std::string& label) {
  return ladder(reg, label, 2);
}

FockOperator identity_operator(const ModeRegister& reg) {
  SpMat m(reg.dimension(), reg.dimension());
  m.setIdentity();
  return FockOperator(reg, std::move(m));
}

FockOperator zero_operator(const ModeRegister& reg) {
  return FockOperator(reg, SpMat(reg.dimension(), reg.dimension()));
}

FockOperator commutator(const FockOperator& a, const FockOperator& b) { return a * b - b * a; }

// ---------------------------------------------------------------- states

void DensityMatrix::validate(double tol) const {
  if (rho.rows() != reg.dimension() || rho.cols() != reg.dimension()) {
    throw std::invalid_argument("density matrix size does not match register");
  }
  const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (herm > tol) throw std::invalid_argument("density matrix not Hermitian");
  const double tr = rho.trace().real();
  if (std::abs(tr - 1.0) > leakage + tol) throw std::invalid_argument("density matrix trace off by more than leakage");
  const Eigen::VectorXd ev = hermitian_eigenvalues(rho);
  if (ev.size() > 0 && ev.minCoeff() < -tol) throw std::invalid_argument("density matrix has negative eigenvalue");
}

PureState vacuum_state(const ModeRegister& reg) {
  PureState s{reg, Vec::Zero(reg.dimension()), 0.0};
  s.amplitudes[0] = 1.0;
  return s;
}

PureState basis_state(const ModeRegister& reg, const std::vector<int>& occ) {
  PureState s{reg, Vec::Zero(reg.dimension()), 0.0};
  s.amplitudes[reg.index(occ)] = 1.0;
  return s;
}

namespace {

double norm_bound(const SpMat& a) {
  // ||A||_2 <= sqrt(||A||_1 ||A||_inf)
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(a.rows());
  Eigen::VectorXd cols = Eigen::VectorXd::Zero(a.cols());
  for (Index k = 0; k < a.outerSize(); ++k) {
    for (SpMat::InnerIterator it(a, k); it; ++it) {
      const double v = std::abs(it.value());
      rows[it.row()] += v;
      cols[it.col()] += v;
    }
  }
  const double r = rows.size() ? rows.maxCoeff() : 0.0;
  const double c = cols.size() ? cols.maxCoeff() : 0.0;
  return std::sqrt(r * c);
}

}  // namespace

Vec apply_exp_series(const SpMat& a, const Vec& v, double tol, int max_terms, ExpSeriesInfo* info) {
  const double bound = norm_bound(a);
  Vec sum = v;
  Vec term = v;
  int k = 0;
  double last = term.norm();
  for (k = 1; k <= max_terms; ++k) {
    term = (a * term) / static_cast<double>(k);
    const double tn = term.norm();
    if (!std::isfinite(tn)) throw ConvergenceError("exponential series overflowed");
    last = tn;
    if (tn == 0.0) break;
    sum += term;
    if (k > bound && tn <= tol * sum.norm()) break;
  }
  if (k > max_terms) {
    throw ConvergenceError("exponential series did not converge within " + std::to_string(max_terms) +
                           " terms (norm bound " + std::to_string(bound) + ")");
  }
  if (info) {
    info->terms = k;
    info->last_term_norm = last;
  }
  return sum;
}

PureState apply_exp_series(const FockOperator& a, const PureState& psi, double tol, int max_terms,
                           ExpSeriesInfo* info) {
  require_same_register(a.reg(), psi.reg, "apply_exp_series");
  return PureState{psi.reg, apply_exp_series(a.matrix(), psi.amplitudes, tol, max_terms, info), psi.leakage};
}

DensityMatrix density_matrix(const PureState& psi) {
  return DensityMatrix{psi.reg, psi.amplitudes * psi.amplitudes.adjoint(), psi.leakage};
}

namespace {

struct TraceMaps {
  ModeRegister kept;
  std::vector<Index> kept_index;
  std::vector<Index> traced_index;
  Index traced_dim = 1;
};

TraceMaps trace_maps(const ModeRegister& reg, const std::vector<std::string>& keep) {
  TraceMaps t;
  t.kept = reg.sub_register(keep);
  std::vector<bool> kept_flag(reg.mode_count(), false);
  for (const auto& k : keep) kept_flag[reg.position(k)] = true;
  std::vector<Index> kstride(reg.mode_count(), 0), tstride(reg.mode_count(), 0);
  Index kd = 1, td = 1;
  for (std::size_t i = reg.mode_count(); i-- > 0;) {
    const Index d = reg.cutoffs()[i] + 1;
    if (kept_flag[i]) {
      kstride[i] = kd;
      kd *= d;
    } else {
      tstride[i] = td;
      td *= d;
    }
  }
  t.traced_dim = td;
  t.kept_index.resize(static_cast<std::size_t>(reg.dimension()));
  t.traced_index.resize(static_cast<std::size_t>(reg.dimension()));
  for (Index idx = 0; idx < reg.dimension(); ++idx) {
    Index ki = 0, ti = 0;
    for (std::size_t i = 0; i < reg.mode_count(); ++i) {
      const Index n = reg.occupation(idx, i);
      ki += n * kstride[i];
      ti += n * tstride[i];
    }
    t.kept_index[idx] = ki;
    t.traced_index[idx] = ti;
  }
  return t;
}

}  // namespace

DensityMatrix partial_trace(const PureState& psi, const std::vector<std::string>& keep) {
  if (keep.empty()) throw std::invalid_argument("partial_trace: empty keep set");
  const TraceMaps t = trace_maps(psi.reg, keep);
  std::vector<Eigen::Triplet<cplx>> trip;
  for (Index idx = 0; idx < psi.reg.dimension(); ++idx) {
    const cplx a = psi.amplitudes[idx];
    if (a != cplx(0.0)) trip.emplace_back(t.kept_index[idx], t.traced_index[idx], a);
  }
  Eigen::SparseMatrix<cplx> m(t.kept.dimension(), t.traced_dim);
  m.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseMatrix<cplx> adj = m.adjoint();
  Eigen::SparseMatrix<cplx> prod = m * adj;
  return DensityMatrix{t.kept, Mat(prod), psi.leakage};
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::string>& keep) {
  if (keep.empty()) throw std::invalid_argument("partial_trace: empty keep set");
  const TraceMaps t = trace_maps(rho.reg, keep);
  Mat out = Mat::Zero(t.kept.dimension(), t.kept.dimension());
  const Index n = rho.reg.dimension();
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (t.traced_index[i] == t.traced_index[j]) out(t.kept_index[i], t.kept_index[j]) += rho.rho(i, j);
    }
  }
  return DensityMatrix{t.kept, out, rho.leakage};
}

cplx expectation(const PureState& psi, const FockOperator& a) {
  require_same_register(psi.reg, a.reg(), "expectation");
  return psi.amplitudes.dot(a.matrix() * psi.amplitudes);
}

cplx expectation(const DensityMatrix& rho, const FockOperator& a) {
  require_same_register(rho.reg, a.reg(), "expectation");
  return (a.dense() * rho.rho).trace();
}

cplx overlap(const PureState& psi, const PureState& phi) {
  require_same_register(psi.reg, phi.reg, "overlap");
  return psi.amplitudes.dot(phi.amplitudes);
}

namespace {

Mat hermitian_sqrt(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  require_same_register(rho.reg, sigma.reg, "fidelity");
  const Mat s = hermitian_sqrt(0.5 * (rho.rho + rho.rho.adjoint()));
  Mat inner = s * sigma.rho * s;
  inner = 0.5 * (inner + inner.adjoint()).eval();
  const Eigen::VectorXd ev = hermitian_eigenvalues(inner);
  double acc = 0.0;
  for (Index i = 0; i < ev.size(); ++i) acc += std::sqrt(std::max(ev[i], 0.0));
  return acc * acc;
}

double fidelity(const PureState& psi, const DensityMatrix& rho) {
  require_same_register(psi.reg, rho.reg, "fidelity");
  return psi.amplitudes.dot(rho.rho * psi.amplitudes).real();
}

Eigen::VectorXd hermitian_eigenvalues(const Mat& h) {
  const Index n = h.rows();
  UnionFind uf(n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      if (i != j && h(i, j) != cplx(0.0)) uf.unite(i, j);
    }
  }
  std::vector<std::vector<Index>> blocks;
  std::vector<Index> block_of(static_cast<std::size_t>(n), -1);
  for (Index i = 0; i < n; ++i) {
    const Index r = uf.find(i);
    if (block_of[r] < 0) {
      block_of[r] = static_cast<Index>(blocks.size());
      blocks.emplace_back();
    }
    blocks[block_of[r]].push_back(i);
  }
  std::vector<double> all;
  all.reserve(static_cast<std::size_t>(n));
  for (const auto& b : blocks) {
    const Index m = static_cast<Index>(b.size());
    if (m == 1) {
      all.push_back(h(b[0], b[0]).real());
      continue;
    }
    Mat sub(m, m);
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < m; ++j) sub(i, j) = h(b[i], b[j]);
    Eigen::SelfAdjointEigenSolver<Mat> es(sub, Eigen::EigenvaluesOnly);
    for (Index i = 0; i < m; ++i) all.push_back(es.eigenvalues()[i]);
  }
  std::sort(all.begin(), all.end());
  return Eigen::Map<Eigen::VectorXd>(all.data(), static_cast<Index>(all.size()));
}

double von_neumann_entropy(const DensityMatrix& rho) {
  const Eigen::VectorXd ev = hermitian_eigenvalues(0.5 * (rho.rho + rho.rho.adjoint()));
  double s = 0.0;
  for (Index i = 0; i < ev.size(); ++i) {
    if (ev[i] > 1e-14) s -= ev[i] * std::log(ev[i]);
  }
  return s;
}

std::vector<Index> interior_indices(const ModeRegister& reg, int excluded) {
  std::vector<Index> out;
  for (Index idx = 0; idx < reg.dimension(); ++idx) {
    bool inside = true;
    for (std::size_t i = 0; i < reg.mode_count() && inside; ++i) {
      inside = reg.occupation(idx, i) <= reg.cutoffs()[i] - excluded;
    }
    if (inside) out.push_back(idx);
  }
  return out;
}

std::vector<Index> excitation_indices(const ModeRegister& reg, const std::vector<std::string>& modes,
                                      int max_total) {
  std::vector<std::size_t> pos;
  for (const auto& m : modes) pos.push_back(reg.position(m));
  std::vector<Index> out;
  for (Index idx = 0; idx < reg.dimension(); ++idx) {
    int total = 0;
    for (auto p : pos) total += reg.occupation(idx, p);
    if (total <= max_total) out.push_back(idx);
  }
  return out;
}

Mat restrict_matrix(const Mat& m, const std::vector<Index>& rows, const std::vector<Index>& cols) {
  Mat out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) out(static_cast<Index>(i), static_cast<Index>(j)) = m(rows[i], cols[j]);
  return out;
}

Vec restrict_vector(const Vec& v, const std::vector<Index>& rows) {
  Vec out(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out[static_cast<Index>(i)] = v[rows[i]];
  return out;
}

double operator_two_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()[0];
}

int tail_policy_cutoff(double gamma, double tail_tol) {
  if (!(std::abs(gamma) < 1.0)) throw std::domain_error("|gamma| must be < 1");
  if (!(tail_tol > 0.0)) throw std::invalid_argument("tail tolerance must be positive");
  const double g2 = gamma * gamma;
  if (g2 == 0.0) return 1;
  // Solve in logs to avoid underflow; then nudge for rounding.
  const double rhs = std::log(tail_tol * (1.0 - g2));
  int n = std::max(1, static_cast<int>(std::ceil(rhs / std::log(g2))) - 2);
  while (std::pow(g2, n + 1) / (1.0 - g2) >= tail_tol) ++n;
  while (n > 1 && std::pow(g2, n) / (1.0 - g2) < tail_tol) --n;
  return n;
}

namespace {

void require_same_labels(const ModeRegister& a, const ModeRegister& b) {
  if (a.labels() != b.labels()) throw std::invalid_argument("registers have different mode labels");
}

}  // namespace

PureState embed(const PureState& psi, const ModeRegister& larger) {
  require_same_labels(psi.reg, larger);
  for (std::size_t i = 0; i < larger.mode_count(); ++i) {
    if (larger.cutoffs()[i] < psi.reg.cutoffs()[i]) throw std::invalid_argument("embed: target cutoff smaller");
  }
  PureState out{larger, Vec::Zero(larger.dimension()), psi.leakage};
  for (Index idx = 0; idx < psi.reg.dimension(); ++idx) {
    if (psi.amplitudes[idx] != cplx(0.0)) out.amplitudes[larger.index(psi.reg.occupations(idx))] = psi.amplitudes[idx];
  }
  return out;
}

PureState project(const PureState& psi, const ModeRegister& smaller) {
  require_same_labels(psi.reg, smaller);
  for (std::size_t i = 0; i < smaller.mode_count(); ++i) {
    if (smaller.cutoffs()[i] > psi.reg.cutoffs()[i]) throw std::invalid_argument("project: target cutoff larger");
  }
  PureState out{smaller, Vec::Zero(smaller.dimension()), psi.leakage};
  std::vector<int> occ(smaller.mode_count());
  for (Index idx = 0; idx < smaller.dimension(); ++idx) {
    Index src = 0;
    for (std::size_t i = 0; i < smaller.mode_count(); ++i) src += smaller.occupation(idx, i) * psi.reg.stride(i);
    out.amplitudes[idx] = psi.amplitudes[src];
  }
  const double dropped = psi.amplitudes.squaredNorm() - out.amplitudes.squaredNorm();
  out.leakage = psi.leakage + std::max(0.0, dropped);
  return out;
}

PureState reorder(const PureState& psi, const ModeRegister& target) {
  if (target.mode_count() != psi.reg.mode_count()) throw std::invalid_argument("reorder: mode count differs");
  std::vector<std::size_t> src_pos(target.mode_count());
  for (std::size_t i = 0; i < target.mode_count(); ++i) {
    src_pos[i] = psi.reg.position(target.labels()[i]);
    if (psi.reg.cutoffs()[src_pos[i]] != target.cutoffs()[i]) throw std::invalid_argument("reorder: cutoffs differ");
  }
  PureState out{target, Vec::Zero(target.dimension()), psi.leakage};
  for (Index idx = 0; idx < target.dimension(); ++idx) {
    Index src = 0;
    for (std::size_t i = 0; i < target.mode_count(); ++i) src += target.occupation(idx, i) * psi.reg.stride(src_pos[i]);
    out.amplitudes[idx] = psi.amplitudes[src];
  }
  return out;
}

}  // namespace rsim

namespace rsim {

LadderPolynomial& LadderPolynomial::add(cplx coef, std::vector<LadderFactor> factors) {
  if (coef != cplx(0.0)) terms_.push_back(Term{coef, std::move(factors)});
  return *this;
}

FockOperator LadderPolynomial::to_operator(const ModeRegister& reg) const {
  FockOperator out = zero_operator(reg);
  for (const auto& t : terms_) {
    FockOperator prod = identity_operator(reg);
    for (const auto& f : t.factors) prod = prod * (f.dagger ? creation(reg, f.mode) : annihilation(reg, f.mode));
    out = out + prod * t.coef;
  }
  return out;
}

double LadderPolynomial::norm_bound(const ModeRegister& reg) const {
  double b = 0.0;
  for (const auto& t : terms_) {
    double p = std::abs(t.coef);
    for (const auto& f : t.factors) p *= std::sqrt(static_cast<double>(reg.cutoff(f.mode)));
    b += p;
  }
  return b;
}

LadderPolynomial creation_monomial(cplx coef, const std::vector<std::string>& modes) {
  std::vector<LadderFactor> f;
  for (const auto& m : modes) f.push_back(LadderFactor{m, true});
  LadderPolynomial p;
  p.add(coef, std::move(f));
  return p;
}

namespace {

using SparseEntries = std::vector<std::pair<Index, cplx>>;

struct CompiledTerm {
  cplx coef;
  std::vector<std::pair<std::size_t, bool>> factors;  // applied last-to-first
};

SparseEntries apply_terms(const std::vector<CompiledTerm>& terms, const ModeRegister& reg, const SparseEntries& in,
                          double scale) {
  SparseEntries out;
  out.reserve(in.size() * terms.size());
  for (const auto& [idx0, val0] : in) {
    for (const auto& t : terms) {
      Index idx = idx0;
      double amp = 1.0;
      bool alive = true;
      for (auto it = t.factors.rbegin(); it != t.factors.rend() && alive; ++it) {
        const int n = reg.occupation(idx, it->first);
        if (it->second) {
          if (n >= reg.cutoffs()[it->first]) {
            alive = false;
          } else {
            amp *= std::sqrt(static_cast<double>(n + 1));
            idx += reg.stride(it->first);
          }
        } else {
          if (n == 0) {
            alive = false;
          } else {
            amp *= std::sqrt(static_cast<double>(n));
            idx -= reg.stride(it->first);
          }
        }
      }
      if (alive) out.emplace_back(idx, t.coef * val0 * (amp * scale));
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  SparseEntries merged;
  merged.reserve(out.size());
  for (const auto& e : out) {
    if (!merged.empty() && merged.back().first == e.first) {
      merged.back().second += e.second;
    } else {
      merged.push_back(e);
    }
  }
  SparseEntries nz;
  nz.reserve(merged.size());
  for (const auto& e : merged) {
    if (e.second != cplx(0.0)) nz.push_back(e);
  }
  return nz;
}

}  // namespace

Vec apply_exp_series(const LadderPolynomial& p, const ModeRegister& reg, const Vec& v, double tol, int max_terms,
                     ExpSeriesInfo* info) {
  if (v.size() != reg.dimension()) throw std::invalid_argument("apply_exp_series: vector size mismatch");
  std::vector<CompiledTerm> terms;
  for (const auto& t : p.terms()) {
    CompiledTerm c{t.coef, {}};
    for (const auto& f : t.factors) c.factors.emplace_back(reg.position(f.mode), f.dagger);
    terms.push_back(std::move(c));
  }
  const double bound = p.norm_bound(reg);
  SparseEntries term;
  for (Index i = 0; i < v.size(); ++i) {
    if (v[i] != cplx(0.0)) term.emplace_back(i, v[i]);
  }
  Vec sum = v;
  double sum_norm = v.norm();
  double last = sum_norm;
  int k = 0;
  for (k = 1; k <= max_terms; ++k) {
    term = apply_terms(terms, reg, term, 1.0 / static_cast<double>(k));
    double tn2 = 0.0;
    for (const auto& e : term) {
      tn2 += std::norm(e.second);
      sum[e.first] += e.second;
    }
    const double tn = std::sqrt(tn2);
    if (!std::isfinite(tn)) throw ConvergenceError("exponential series overflowed");
    last = tn;
    if (term.empty()) break;
    if (k > bound) {
      sum_norm = sum.norm();
      if (tn <= tol * sum_norm) break;
    }
  }
  if (k > max_terms) {
    throw ConvergenceError("exponential series did not converge within " + std::to_string(max_terms) + " terms");
  }
  if (info) {
    info->terms = k;
    info->last_term_norm = last;
  }
  return sum;
}

PureState apply_exp_series(const LadderPolynomial& p, const PureState& psi, double tol, int max_terms,
                           ExpSeriesInfo* info) {
  return PureState{psi.reg, apply_exp_series(p, psi.reg, psi.amplitudes, tol, max_terms, info), psi.leakage};
}

}  // namespace rsim
