#include "rsim/squeeze.hpp"

#include <cmath>
#include <stdexcept>

namespace rsim {

TwoModeSqueezer::TwoModeSqueezer(std::string mode_x, std::string mode_y, double r, int working_cutoff)
    : x_(std::move(mode_x)), y_(std::move(mode_y)), r_(r), cutoff_(working_cutoff),
      cache_(std::make_shared<Cache>()) {
  if (x_ == y_) throw std::invalid_argument("squeezer needs two distinct modes");
  if (cutoff_ < 1) throw std::invalid_argument("squeezer working cutoff must be >= 1");
  if (!std::isfinite(r_)) throw std::invalid_argument("squeezer parameter must be finite");
}

const Eigen::MatrixXd& TwoModeSqueezer::block(int d) const {
  if (std::abs(d) > cutoff_) throw std::out_of_range("squeezer block outside cutoff");
  std::lock_guard<std::mutex> lock(cache_->mutex);
  auto it = cache_->blocks.find(d);
  if (it != cache_->blocks.end()) return it->second;

  const int m = cutoff_ + 1 - std::abs(d);
  const int nx0 = std::max(d, 0);
  const int ny0 = std::max(-d, 0);
  Eigen::MatrixXd u(m, m);
  if (m == 1 || r_ == 0.0) {
    u.setIdentity();
  } else {
    // K has K(j+1,j) = r e_j, K(j,j+1) = -r e_j. With D = diag(i^j),
    // D^dag (iK) D is the real symmetric tridiagonal T with off-diagonal r e_j,
    // hence exp(K) = D exp(-iT) D^dag, whose entries are real.
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd off(m - 1);
    for (int j = 0; j + 1 < m; ++j) {
      off[j] = r_ * std::sqrt(static_cast<double>(nx0 + j + 1) * static_cast<double>(ny0 + j + 1));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
    const Eigen::MatrixXd& v = es.eigenvectors();
    const Eigen::VectorXd lam = es.eigenvalues();
    const Eigen::MatrixXd wc = v * lam.array().cos().matrix().asDiagonal() * v.transpose();
    const Eigen::MatrixXd ws = v * lam.array().sin().matrix().asDiagonal() * v.transpose();
    for (int j = 0; j < m; ++j) {
      for (int l = 0; l < m; ++l) {
        switch (((j - l) % 4 + 4) % 4) {
          case 0: u(j, l) = wc(j, l); break;
          case 1: u(j, l) = ws(j, l); break;
          case 2: u(j, l) = -wc(j, l); break;
          default: u(j, l) = -ws(j, l); break;
        }
      }
    }
  }
  return cache_->blocks.emplace(d, std::move(u)).first->second;
}

void TwoModeSqueezer::apply(const ModeRegister& reg, Vec& v, bool adjoint) const {
  const std::size_t px = reg.position(x_);
  const std::size_t py = reg.position(y_);
  if (reg.cutoffs()[px] != cutoff_ || reg.cutoffs()[py] != cutoff_) {
    throw std::invalid_argument("squeezer applied on register with mismatched cutoffs " + reg.describe());
  }
  if (v.size() != reg.dimension()) throw std::invalid_argument("squeezer: vector size mismatch");
  const Index sx = reg.stride(px);
  const Index sy = reg.stride(py);

  std::vector<Index> bases;
  for (Index idx = 0; idx < reg.dimension(); ++idx) {
    if (reg.occupation(idx, px) == 0 && reg.occupation(idx, py) == 0) bases.push_back(idx);
  }
  Eigen::VectorXcd in(cutoff_ + 1), out(cutoff_ + 1);
  for (int d = -cutoff_; d <= cutoff_; ++d) {
    const int m = cutoff_ + 1 - std::abs(d);
    const int nx0 = std::max(d, 0);
    const int ny0 = std::max(-d, 0);
    for (Index base : bases) {
      bool any = false;
      for (int j = 0; j < m; ++j) {
        in[j] = v[base + (nx0 + j) * sx + (ny0 + j) * sy];
        any = any || in[j] != cplx(0.0);
      }
      if (!any) continue;
      const Eigen::MatrixXd& u = block(d);
      if (adjoint) {
        out.head(m).noalias() = u.transpose().cast<cplx>() * in.head(m);
      } else {
        out.head(m).noalias() = u.cast<cplx>() * in.head(m);
      }
      for (int j = 0; j < m; ++j) v[base + (nx0 + j) * sx + (ny0 + j) * sy] = out[j];
    }
  }
}

FramePair bare_pair(const std::string& first, const std::string& second) {
  return FramePair{first, second, std::nullopt};
}

ModeRegister padded_register(const ModeRegister& target, const std::vector<FramePair>& pairs) {
  ModeRegister padded = target;
  for (const auto& p : pairs) {
    if (!target.contains(p.first) || !target.contains(p.second)) {
      throw std::invalid_argument("frame pair (" + p.first + ", " + p.second + ") not in register");
    }
    if (!p.squeezer) continue;
    const int l = p.squeezer->working_cutoff();
    if (l < target.cutoff(p.first) || l < target.cutoff(p.second)) {
      throw std::invalid_argument("squeezer working cutoff below target cutoff");
    }
    padded = padded.with_cutoff(p.first, l).with_cutoff(p.second, l);
  }
  return padded;
}

PureState realize_from_bare(const ModeRegister& target, const std::vector<FramePair>& pairs,
                            const BareBuilder& builder) {
  const ModeRegister padded = padded_register(target, pairs);
  Vec v = builder(padded);
  if (v.size() != padded.dimension()) throw std::invalid_argument("bare builder returned wrong size");
  for (const auto& p : pairs) {
    if (p.squeezer) p.squeezer->apply(padded, v, false);
  }
  PureState out = project(PureState{padded, std::move(v), 0.0}, target);
  out.leakage = std::max(0.0, 1.0 - out.amplitudes.squaredNorm());
  return out;
}

}  // namespace rsim
