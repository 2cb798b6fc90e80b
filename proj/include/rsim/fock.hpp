#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "rsim/errors.hpp"

namespace rsim {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using SpMat = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;
using Index = std::ptrdiff_t;

// Ordered bosonic modes with per-mode occupation cutoffs. Basis index is
// row-major in declaration order: index(n) = sum_i n_i * prod_{j>i}(cut_j + 1).
class ModeRegister {
 public:
  ModeRegister() = default;
  ModeRegister(std::vector<std::string> labels, std::vector<int> cutoffs);

  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<int>& cutoffs() const { return cutoffs_; }
  std::size_t mode_count() const { return labels_.size(); }
  Index dimension() const { return dim_; }

  bool contains(const std::string& label) const;
  std::size_t position(const std::string& label) const;
  int cutoff(const std::string& label) const { return cutoffs_[position(label)]; }
  Index stride(std::size_t mode) const { return strides_[mode]; }

  Index index(const std::vector<int>& occupations) const;
  std::vector<int> occupations(Index index) const;
  int occupation(Index index, std::size_t mode) const {
    return static_cast<int>((index / strides_[mode]) % (cutoffs_[mode] + 1));
  }

  ModeRegister with_cutoff(const std::string& label, int cutoff) const;
  // Kept modes in this register's order.
  ModeRegister sub_register(const std::vector<std::string>& keep) const;
  ModeRegister relabeled(const std::vector<std::string>& labels) const;

  bool operator==(const ModeRegister& other) const {
    return labels_ == other.labels_ && cutoffs_ == other.cutoffs_;
  }
  bool operator!=(const ModeRegister& other) const { return !(*this == other); }

  std::string describe() const;

 private:
  std::vector<std::string> labels_;
  std::vector<int> cutoffs_;
  std::vector<Index> strides_;
  Index dim_ = 1;
};

ModeRegister make_register(const std::vector<std::string>& labels, const std::vector<int>& cutoffs);

class FockOperator {
 public:
  FockOperator() = default;
  FockOperator(ModeRegister reg, SpMat matrix);

  const ModeRegister& reg() const { return reg_; }
  const SpMat& matrix() const { return m_; }
  Index dimension() const { return reg_.dimension(); }

  FockOperator adjoint() const;
  Mat dense() const { return Mat(m_); }
  Vec apply(const Vec& v) const { return m_ * v; }

  // max |H - H^dagger| entry.
  double hermiticity_residual() const;
  // max |U^dagger U - 1| entry, dense; small registers only.
  double unitarity_residual() const;

  FockOperator operator+(const FockOperator& o) const;
  FockOperator operator-(const FockOperator& o) const;
  FockOperator operator*(const FockOperator& o) const;
  FockOperator operator*(cplx s) const;
  friend FockOperator operator*(cplx s, const FockOperator& op) { return op * s; }

 private:
  ModeRegister reg_;
  SpMat m_;
};

FockOperator annihilation(const ModeRegister& reg, const std::string& label);
FockOperator creation(const ModeRegister& reg, const std::string& label);
FockOperator number_operator(const ModeRegister& reg, const std::string& label);
FockOperator identity_operator(const ModeRegister& reg);
FockOperator zero_operator(const ModeRegister& reg);
FockOperator commutator(const FockOperator& a, const FockOperator& b);

// Amplitude vector plus explicit truncation leakage. Never renormalized.
struct PureState {
  ModeRegister reg;
  Vec amplitudes;
  double leakage = 0.0;

  double norm() const { return amplitudes.norm(); }
  cplx amplitude(const std::vector<int>& occupations) const {
    return amplitudes[reg.index(occupations)];
  }
};

struct DensityMatrix {
  ModeRegister reg;
  Mat rho;
  double leakage = 0.0;

  cplx trace() const { return rho.trace(); }
  // Throws std::invalid_argument when Hermiticity, trace or positivity fail.
  void validate(double tol = 1e-12) const;
};

PureState vacuum_state(const ModeRegister& reg);
PureState basis_state(const ModeRegister& reg, const std::vector<int>& occupations);

struct ExpSeriesInfo {
  int terms = 0;
  double last_term_norm = 0.0;
};

// e^A psi by Taylor application. Stops when a term vanishes exactly or when its
// norm falls below tol relative to the running sum past the norm bound of A.
PureState apply_exp_series(const FockOperator& a, const PureState& psi, double tol = 1e-16,
                           int max_terms = 20000, ExpSeriesInfo* info = nullptr);
Vec apply_exp_series(const SpMat& a, const Vec& v, double tol = 1e-16, int max_terms = 20000,
                     ExpSeriesInfo* info = nullptr);

// Sum of coefficient-weighted products of ladder operators, applied without
// materializing a matrix. Factors act right to left as written.
struct LadderFactor {
  std::string mode;
  bool dagger;
};

class LadderPolynomial {
 public:
  LadderPolynomial& add(cplx coef, std::vector<LadderFactor> factors);
  bool empty() const { return terms_.empty(); }
  FockOperator to_operator(const ModeRegister& reg) const;
  // Upper bound on the operator 2-norm on reg.
  double norm_bound(const ModeRegister& reg) const;

  struct Term {
    cplx coef;
    std::vector<LadderFactor> factors;
  };
  const std::vector<Term>& terms() const { return terms_; }

 private:
  std::vector<Term> terms_;
};

// Shorthands: create("b1") * create("b2") etc.
LadderPolynomial creation_monomial(cplx coef, const std::vector<std::string>& modes);

// e^P psi, touching only the support of each series term. Same stopping rule
// as the matrix version.
PureState apply_exp_series(const LadderPolynomial& p, const PureState& psi, double tol = 1e-16,
                           int max_terms = 20000, ExpSeriesInfo* info = nullptr);
Vec apply_exp_series(const LadderPolynomial& p, const ModeRegister& reg, const Vec& v, double tol = 1e-16,
                     int max_terms = 20000, ExpSeriesInfo* info = nullptr);

DensityMatrix density_matrix(const PureState& psi);
DensityMatrix partial_trace(const PureState& psi, const std::vector<std::string>& keep);
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::string>& keep);

cplx expectation(const PureState& psi, const FockOperator& a);
cplx expectation(const DensityMatrix& rho, const FockOperator& a);
cplx overlap(const PureState& psi, const PureState& phi);
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);
double fidelity(const PureState& psi, const DensityMatrix& rho);
double von_neumann_entropy(const DensityMatrix& rho);

// Eigenvalues of a Hermitian matrix, solved per connected block of its
// nonzero pattern. Ascending.
Eigen::VectorXd hermitian_eigenvalues(const Mat& h);

// Basis indices whose occupations all sit at least `excluded` below the cutoff.
std::vector<Index> interior_indices(const ModeRegister& reg, int excluded = 2);
// Basis indices whose summed occupation over `modes` is at most max_total.
std::vector<Index> excitation_indices(const ModeRegister& reg, const std::vector<std::string>& modes,
                                      int max_total);
Mat restrict_matrix(const Mat& m, const std::vector<Index>& rows, const std::vector<Index>& cols);
Vec restrict_vector(const Vec& v, const std::vector<Index>& rows);
double operator_two_norm(const Mat& m);

// Smallest n >= 1 with gamma^{2(n+1)}/(1-gamma^2) < tail_tol.
int tail_policy_cutoff(double gamma, double tail_tol = 1e-12);

// Same labels, larger cutoffs: zero-padded copy. Leakage carried over.
PureState embed(const PureState& psi, const ModeRegister& larger);
// Same labels, smaller cutoffs: truncated copy. Leakage grows by the dropped weight.
PureState project(const PureState& psi, const ModeRegister& smaller);
// Map amplitudes between registers with the same labels in a different order.
PureState reorder(const PureState& psi, const ModeRegister& target);

}  // namespace rsim
