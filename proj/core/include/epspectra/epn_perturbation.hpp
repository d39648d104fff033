#pragma once

// Unfolding of an N-fold EP under a perturbation lambda V of the Jordan block
// J^(N)(0): reduction to a triangular system with a scalar secular condition,
// its resolvent-series and exact evaluations, root finding, and the lambda
// exponent bookkeeping that separates benign from malign perturbations.

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "epspectra/numerics.hpp"

namespace epspectra::epn {

using numerics::ComplexMatrix;
using numerics::ComplexVector;
using numerics::cplx;
using numerics::Index;

/// Reduction of [J^(N)(0) + lambda V - eps] Psi = 0 under Psi_1 = 1 to
/// (A^-1 + lambda Z) y = r, where y = (Psi_2, ..., Psi_N, Omega_N) and the
/// slack Omega_N vanishes exactly at the eigenvalues.
struct ReducedSystem {
  Index N = 0;
  cplx epsilon{};
  double lambda = 0.0;
  ComplexMatrix A;      // unit lower triangular, A(i, j) = eps^(i - j)
  ComplexMatrix A_inv;  // unit lower bidiagonal, -eps on the subdiagonal
  ComplexMatrix Z;      // columns 2..N of V shifted left, last column zero
  ComplexVector r;      // (eps - lambda V_11, -lambda V_21, ..., -lambda V_N1)
};

ReducedSystem assemble_system(const ComplexMatrix& v, cplx epsilon, double lambda);

struct SecularMode {
  enum class Kind { series, direct };
  Kind kind = Kind::direct;
  int order = 0;

  static SecularMode direct() { return {Kind::direct, 0}; }
  static SecularMode series(int order) { return {Kind::series, order}; }
};

/// Spectral radius of lambda A Z; the resolvent series converges iff < 1.
double series_spectral_radius(const ReducedSystem& system);

/// ||lambda A Z||_2^(order+1) / (1 - ||lambda A Z||_2) * ||A r||, or +inf
/// when the 2-norm is not below one.
double series_tail_bound(const ReducedSystem& system, int order);

/// Series: y = sum_{k=0}^{order} (-lambda A Z)^k A r; throws SeriesDiverges when
/// the spectral radius of lambda A Z is >= 1.
/// Direct: solves (I + lambda A Z) y = A r; throws SingularMatrix.
ComplexVector secular_value(const ReducedSystem& system, SecularMode mode);

struct SecularSolution {
  std::vector<cplx> roots;
  std::vector<bool> reality_flags;
  std::vector<ComplexVector> y_vectors;
  SecularMode method;
  std::vector<double> compat_residuals;  // |y_N| / ||r|| per root
  double search_radius = 0.0;
};

struct SecularOptions {
  int newton_max_iterations = 100;
  double compat_tolerance = 1e-8;
};

/// Roots of y_N(eps) = 0. Real roots are listed first (ascending), then the
/// complex ones in eigenvalue order.
///
/// Direct mode seeds Newton on y_N with the eigenvalues of J^(N)(0) + lambda V.
/// Series mode runs deflated Newton from the N-th roots of lambda ||V||.
/// Throws RootFindingFailure when an iteration stalls or a root fails the
/// compatibility check.
SecularSolution solve_secular(const ComplexMatrix& v, double lambda, SecularMode mode,
                              const SecularOptions& options = {});

bool is_real_root(cplx epsilon);

/// lambda V with (lambda V)_jk = lambda^exponent_jk * mu_jk.
struct PerturbationFamily {
  Index N = 0;
  ComplexMatrix mu;
  Eigen::MatrixXd exponent;
  double bound = 1.0;

  void validate() const;
  ComplexMatrix scaled(double lambda) const;

  /// exponent_jk = (j - k + 1) / 2 on and below the diagonal, 0 above.
  static PerturbationFamily critical(const ComplexMatrix& mu);
};

struct Classification {
  bool benign = true;
  // 1-based (row, column) of the first violating entry in row-major order.
  std::optional<std::pair<Index, Index>> witness;
};

/// Necessary admissibility condition: every nonzero mu_jk with j >= k needs
/// exponent_jk >= (j - k + 1) / 2. The upper triangle is unconstrained.
Classification classify_perturbation(const PerturbationFamily& family);

struct ReducedPerturbation {
  ComplexMatrix V_reduced;
  double max_abs = 0.0;
  double reconstruction_error = 0.0;  // relative, of lambda^(1/2) B V_red B^-1 vs lambda V
};

/// V_reduced = lambda^(-1/2) B^-1 (lambda V) B with B = diag(lambda^(j/2)).
ReducedPerturbation rescale_reduced(const PerturbationFamily& family, double lambda);

struct ExponentFit {
  double slope = 0.0;
  double standard_error = 0.0;
  std::vector<double> lambdas;
  std::vector<double> displacements;
};

/// Least-squares slope of log(max eigenvalue displacement) against log(lambda)
/// for H_ep + lambda * direction. The grid must span at least three decades
/// and every displacement must stay below 0.1.
ExponentFit exponent_fit(const ComplexMatrix& h_ep, const ComplexMatrix& direction,
                         std::span<const double> lambda_grid);

/// Same fit for H_ep + family.scaled(lambda).
ExponentFit exponent_fit(const ComplexMatrix& h_ep, const PerturbationFamily& family,
                         std::span<const double> lambda_grid);

/// n points from lo to hi, equally spaced in log.
std::vector<double> geometric_grid(double lo, double hi, std::size_t n);

}  // namespace epspectra::epn
