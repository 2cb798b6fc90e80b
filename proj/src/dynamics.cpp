#include "rsim/dynamics.hpp"

#include <cmath>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace rsim {

FockOperator h_single_chain(double g, const ModeRegister& reg, const std::string& sigma, const std::string& b) {
  const FockOperator s = annihilation(reg, sigma);
  const FockOperator a = annihilation(reg, b);
  return (s.adjoint() * a + s * a.adjoint()) * cplx(g);
}

FockOperator h_single_chain(double g, const ModeRegister& reg, const ChainModes& modes) {
  return h_single_chain(g, reg, modes.sigma, modes.b1);
}

std::vector<FockOperator> h_two_chain_terms(double g, const ModeRegister& reg, const ChainModes& modes) {
  return {h_single_chain(g, reg, modes.sigma1, modes.b1), h_single_chain(g, reg, modes.sigma2, modes.b2)};
}

FockOperator h_two_chain(double g, const ModeRegister& reg, const ChainModes& modes) {
  const auto terms = h_two_chain_terms(g, reg, modes);
  return terms[0] + terms[1];
}

FockOperator h_generic_duality(double g, const FockOperator& a1, const FockOperator& a2, const FockOperator& b1,
                               const FockOperator& b2, CommutatorCheck* check, double tol) {
  const ModeRegister& reg = a1.reg();
  std::vector<bool> inside(static_cast<std::size_t>(reg.dimension()), false);
  for (Index i : interior_indices(reg, 2)) inside[i] = true;
  auto interior_max = [&](const SpMat& m) {
    double r = 0.0;
    for (Index row = 0; row < m.outerSize(); ++row) {
      if (!inside[row]) continue;
      for (SpMat::InnerIterator it(m, row); it; ++it) {
        if (inside[it.col()]) r = std::max(r, std::abs(it.value()));
      }
    }
    return r;
  };
  const FockOperator ident = identity_operator(reg);
  const FockOperator* ops[4] = {&a1, &a2, &b1, &b2};
  double worst = 0.0;
  for (int i = 0; i < 4; ++i) {
    for (int j = i; j < 4; ++j) {
      worst = std::max(worst, interior_max(commutator(*ops[i], *ops[j]).matrix()));
      FockOperator cd = commutator(*ops[i], ops[j]->adjoint());
      if (i == j) cd = cd - ident;
      worst = std::max(worst, interior_max(cd.matrix()));
    }
  }
  const bool ok = worst <= tol;
  if (!ok) {
    std::ostringstream os;
    os << "duality operators violate bosonic commutators on the interior by " << worst;
    warn(os.str());
  }
  if (check) *check = CommutatorCheck{worst, ok};
  return (a1.adjoint() * b1 + a1 * b1.adjoint() + a2.adjoint() * b2 + a2 * b2.adjoint()) * cplx(g);
}

struct Propagator::Impl {
  ModeRegister reg;
  SpMat h;
  std::vector<std::vector<Index>> blocks;
  std::vector<Index> block_of;
  std::vector<Index> pos_in_block;
  struct Decomp {
    Eigen::VectorXd values;
    Mat vectors;
  };
  mutable std::mutex mutex;
  mutable std::vector<std::shared_ptr<const Decomp>> cache;

  std::shared_ptr<const Decomp> decomposition(std::size_t b) const {
    {
      std::lock_guard<std::mutex> lock(mutex);
      if (cache[b]) return cache[b];
    }
    const auto& idx = blocks[b];
    const Index m = static_cast<Index>(idx.size());
    Mat sub = Mat::Zero(m, m);
    bool real = true;
    for (Index i = 0; i < m; ++i) {
      for (SpMat::InnerIterator it(h, idx[i]); it; ++it) {
        sub(i, pos_in_block[it.col()]) = it.value();
        real = real && it.value().imag() == 0.0;
      }
    }
    auto d = std::make_shared<Decomp>();
    if (real) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sub.real());
      d->values = es.eigenvalues();
      d->vectors = es.eigenvectors().cast<cplx>();
    } else {
      Eigen::SelfAdjointEigenSolver<Mat> es(sub);
      d->values = es.eigenvalues();
      d->vectors = es.eigenvectors();
    }
    // First non-negligible component real positive.
    for (Index c = 0; c < m; ++c) {
      for (Index r = 0; r < m; ++r) {
        const cplx v = d->vectors(r, c);
        if (std::abs(v) > 1e-10) {
          d->vectors.col(c) *= std::conj(v) / std::abs(v);
          break;
        }
      }
    }
    std::lock_guard<std::mutex> lock(mutex);
    if (!cache[b]) cache[b] = d;
    return cache[b];
  }
};

Propagator::Propagator(const FockOperator& h) : impl_(std::make_shared<Impl>()) {
  impl_->reg = h.reg();
  const double herm = h.hermiticity_residual();
  if (herm > 1e-10) {
    std::ostringstream os;
    os << "evolve: Hamiltonian not Hermitian (residual " << herm << ")";
    throw std::invalid_argument(os.str());
  }
  if (herm > 0.0) {
    if (herm > 1e-14) {
      std::ostringstream os;
      os << "evolve: symmetrizing Hamiltonian with Hermiticity residual " << herm;
      warn(os.str());
    }
    impl_->h = SpMat(0.5 * (h.matrix() + SpMat(h.matrix().adjoint())));
  } else {
    impl_->h = h.matrix();
  }
  const Index n = h.dimension();
  std::vector<Index> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), Index{0});
  auto find = [&](Index x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (Index r = 0; r < n; ++r) {
    for (SpMat::InnerIterator it(impl_->h, r); it; ++it) {
      if (it.col() == r || it.value() == cplx(0.0)) continue;
      Index a = find(r), b = find(it.col());
      if (a == b) continue;
      if (a < b) std::swap(a, b);
      parent[a] = b;
    }
  }
  impl_->block_of.assign(static_cast<std::size_t>(n), -1);
  std::vector<Index> root_block(static_cast<std::size_t>(n), -1);
  for (Index i = 0; i < n; ++i) {
    const Index root = find(i);
    if (root_block[root] < 0) {
      root_block[root] = static_cast<Index>(impl_->blocks.size());
      impl_->blocks.emplace_back();
    }
    impl_->block_of[i] = root_block[root];
    impl_->blocks[root_block[root]].push_back(i);
  }
  impl_->pos_in_block.assign(static_cast<std::size_t>(n), 0);
  for (const auto& blk : impl_->blocks) {
    for (std::size_t i = 0; i < blk.size(); ++i) impl_->pos_in_block[blk[i]] = static_cast<Index>(i);
  }
  impl_->cache.resize(impl_->blocks.size());
}

const ModeRegister& Propagator::reg() const { return impl_->reg; }
std::size_t Propagator::block_count() const { return impl_->blocks.size(); }

PureState Propagator::evolve(const PureState& psi0, double tau) const {
  if (psi0.reg != impl_->reg) throw std::invalid_argument("evolve: register mismatch");
  if (!std::isfinite(tau)) throw std::invalid_argument("evolve: tau must be finite");
  PureState out{psi0.reg, Vec::Zero(psi0.amplitudes.size()), psi0.leakage};
  for (std::size_t b = 0; b < impl_->blocks.size(); ++b) {
    const auto& idx = impl_->blocks[b];
    const Index m = static_cast<Index>(idx.size());
    Vec sub(m);
    bool any = false;
    for (Index i = 0; i < m; ++i) {
      sub[i] = psi0.amplitudes[idx[i]];
      any = any || sub[i] != cplx(0.0);
    }
    if (!any) continue;
    if (m == 1) {
      const double e = impl_->h.coeff(idx[0], idx[0]).real();
      out.amplitudes[idx[0]] = std::exp(cplx(0.0, -e * tau)) * sub[0];
      continue;
    }
    const auto d = impl_->decomposition(b);
    Vec coeff = d->vectors.adjoint() * sub;
    for (Index i = 0; i < m; ++i) coeff[i] *= std::exp(cplx(0.0, -d->values[i] * tau));
    const Vec res = d->vectors * coeff;
    for (Index i = 0; i < m; ++i) out.amplitudes[idx[i]] = res[i];
  }
  return out;
}

PureState evolve(const FockOperator& h, const PureState& psi0, double tau) {
  return Propagator(h).evolve(psi0, tau);
}

PureState evolve(const std::vector<FockOperator>& terms, const PureState& psi0, double tau) {
  PureState s = psi0;
  for (const auto& h : terms) s = Propagator(h).evolve(s, tau);
  return s;
}

PureState evolve(const std::vector<Propagator>& factors, const PureState& psi0, double tau) {
  PureState s = psi0;
  for (const auto& p : factors) s = p.evolve(s, tau);
  return s;
}

HeisenbergNumbers heisenberg_numbers(const SqueezeParam& gamma, double g, double tau) {
  const double gg = gamma.gamma();
  const double occ = gg * gg / (1.0 - gg * gg);
  const double s = std::sin(g * tau);
  const double c = std::cos(g * tau);
  return HeisenbergNumbers{occ * s * s, occ * c * c};
}

std::vector<double> linear_grid(double start, double stop, int points) {
  if (points < 1) throw std::invalid_argument("grid needs at least one point");
  std::vector<double> out(static_cast<std::size_t>(points));
  if (points == 1) {
    out[0] = start;
    return out;
  }
  for (int i = 0; i < points; ++i) {
    out[i] = start + (stop - start) * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  return out;
}

std::vector<double> default_tau_grid(double g, bool two_chain, int points) {
  if (g == 0.0) throw std::invalid_argument("default grid needs nonzero g");
  const double period = (two_chain ? M_PI : 2.0 * M_PI) / std::abs(g);
  return linear_grid(0.0, period, points);
}

}  // namespace rsim
