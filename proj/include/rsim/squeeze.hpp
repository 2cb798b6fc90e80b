#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "rsim/fock.hpp"

namespace rsim {

// S = exp(r (x^dag y^dag - x y)), so S x S^dag = cosh(r) x - sinh(r) y^dag and
// S|00> is the two-mode squeezed vacuum with gamma = tanh(r).
//
// Linear combinations such as (x - gamma y^dag)/sqrt(1-gamma^2) are unbounded and
// their polynomial exponentials blow up on a truncated space. The unitary itself
// is well behaved: within a block of fixed n_x - n_y it is the exponential of a
// real antisymmetric tridiagonal matrix, which we diagonalize exactly. Blocks are
// built on first use and cached.
class TwoModeSqueezer {
 public:
  TwoModeSqueezer(std::string mode_x, std::string mode_y, double r, int working_cutoff);

  const std::string& mode_x() const { return x_; }
  const std::string& mode_y() const { return y_; }
  double r() const { return r_; }
  int working_cutoff() const { return cutoff_; }

  // v <- S v (or S^dag v). Both modes must sit at the working cutoff in reg.
  void apply(const ModeRegister& reg, Vec& v, bool adjoint = false) const;

  // Dense block of S for n_x - n_y = d, ordered by increasing n_x.
  const Eigen::MatrixXd& block(int d) const;

 private:
  std::string x_, y_;
  double r_;
  int cutoff_;
  struct Cache {
    std::mutex mutex;
    std::map<int, Eigen::MatrixXd> blocks;
  };
  std::shared_ptr<Cache> cache_;
};

// Two modes that play the role of a frame's (first, second) pair. Without a
// squeezer the frame operators are the bare ladder operators of these modes;
// with one they are S (bare) S^dag.
struct FramePair {
  std::string first;
  std::string second;
  std::optional<TwoModeSqueezer> squeezer;
};

FramePair bare_pair(const std::string& first, const std::string& second);

// Builds f(frame^dag)|frame vacuum> on `target`: the caller writes the bare
// polynomial state on a padded register (squeezed pairs raised to their working
// cutoff), the squeezers map it into the physical basis, and the result is
// projected back. Leakage is the missing norm, 1 - |psi|^2.
using BareBuilder = std::function<Vec(const ModeRegister& padded)>;
PureState realize_from_bare(const ModeRegister& target, const std::vector<FramePair>& pairs,
                            const BareBuilder& builder);

// Padded register used by realize_from_bare.
ModeRegister padded_register(const ModeRegister& target, const std::vector<FramePair>& pairs);

}  // namespace rsim
