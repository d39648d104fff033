#pragma once

// Reference computations that do not go through the library's own solvers.

#include <complex>
#include <utility>
#include <vector>

namespace oracles {

using cplx = std::complex<double>;

/// Eigenvalue of -psi'' + i x^3 psi on [-L, L] with Dirichlet ends closest to
/// `shift`, from second-order finite differences on n intervals, shifted
/// inverse iteration with a complex tridiagonal solver, and a final
/// transpose Rayleigh quotient (the discrete operator is complex symmetric).
cplx fd_cubic_level(double L, int n, cplx shift);

/// Richardson extrapolation of fd_cubic_level over n and 2n intervals.
cplx fd_cubic_level_extrapolated(double L, int n, cplx shift);

/// Spearman rank correlation (average ranks for ties).
double spearman(const std::vector<double>& x, const std::vector<double>& y);

/// Coupling pair (a, b) that collapses the 4-level chain with diagonal
/// (3, 1, -1, -3) and couplings (a, b, a) to a single point. Found by scanning
/// a on the curve tr H^2 = 0 (which fixes b) for a sign change of det H,
/// then bisecting. det is computed by the tridiagonal continuant.
std::pair<double, double> brute_force_j2_couplings(int samples);

/// Eigenvalues of a 2 x 2 complex matrix from the quadratic formula.
std::pair<cplx, cplx> eig2(cplx a, cplx b, cplx c, cplx d);

/// Real cube roots: lambda^(1/3) {1, omega, omega^2}, with the real one first.
std::vector<cplx> cube_roots(double lambda);

}  // namespace oracles
