#pragma once

// Dense complex linear-algebra kernel shared by every model in the library.
//
// Matrices are plain Eigen dense types. Eigen stores column-major; the
// row-major view used in reports is produced by the serializers, never here.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace epspectra::numerics {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Index = Eigen::Index;

/// Frobenius norm; the matrix norm used throughout the library unless a
/// function documents otherwise.
double norm(const ComplexMatrix& m);

/// Largest singular value.
double norm2(const ComplexMatrix& m);

bool all_finite(const ComplexMatrix& m);

/// Throws DomainError naming `what` when `m` has a NaN or Inf entry.
void require_finite(const ComplexMatrix& m, const char* what);

/// Throws DomainError unless `m` is square.
void require_square(const ComplexMatrix& m, const char* what);

/// Solve M x = b by LU with partial pivoting.
/// Throws SingularMatrix when a pivot falls below 1e-13 * ||M||.
ComplexVector solve_linear(const ComplexMatrix& m, const ComplexVector& b);
ComplexMatrix solve_linear(const ComplexMatrix& m, const ComplexMatrix& b);

/// Singular values in descending order.
std::vector<double> singular_values(const ComplexMatrix& m);

/// Smallest singular value of a square or rectangular matrix.
double min_singular_value(const ComplexMatrix& m);

/// Strict weak ordering used for every eigenvalue list: ascending real part,
/// ties broken by ascending imaginary part.
bool eigenvalue_less(cplx a, cplx b);

struct EigOptions {
  Index max_dimension = 512;
  // Eigenvalues closer than cluster_tolerance * ||M|| are treated as one
  // cluster when testing for defectiveness.
  double cluster_tolerance = 1e-8;
  // Normalized right vectors with |cos angle| above this are also clustered;
  // near a defective eigenvalue the computed eigenvalues split by
  // O(sqrt(eps)) while the vectors stay parallel to working precision.
  double parallel_tolerance = 1e-10;
};

/// Eigenvalues with paired right kets and left ketkets.
///
/// Columns of `right_vectors` have unit Euclidean norm. Columns of
/// `left_vectors` are scaled so that left_n^H right_n = 1 whenever that
/// product is not numerically zero.
struct SpectralData {
  std::vector<cplx> eigenvalues;
  ComplexMatrix right_vectors;
  ComplexMatrix left_vectors;
  bool defect_flag = false;
  double biorthogonality_residual = 0.0;
  // Per-level membership in a defective cluster; defect_flag is their union.
  std::vector<bool> defective_levels;

  Index size() const { return static_cast<Index>(eigenvalues.size()); }
};

/// Nonsymmetric eigendecomposition with left and right eigenvectors.
///
/// Left vectors come from an independent decomposition of M^H and are
/// matched to the right vectors by eigenvalue proximity. A matrix whose
/// entries are all real goes through the real Hessenberg-QR path, so
/// isolated real eigenvalues come back with an exactly zero imaginary part.
///
/// Throws DomainError for non-square, non-finite or oversized input and
/// NoConvergence when the QR iteration fails.
SpectralData eig_biorthogonal(const ComplexMatrix& m, const EigOptions& options = {});

/// Eigenvalues only, sorted with eigenvalue_less.
std::vector<cplx> eigenvalues(const ComplexMatrix& m);

/// Restrict spectral data to the given level indices, in the given order.
SpectralData select_levels(const SpectralData& sd, std::span<const Index> levels);

/// max |left_m^H right_n - delta_mn| over all pairs.
double biorthogonality_residual(const ComplexMatrix& left, const ComplexMatrix& right);

/// Reconstruct sum_n lambda_n right_n left_n^H.
ComplexMatrix reconstruct(const SpectralData& sd);

/// |<u|v>| / (||u|| ||v||), zero when either vector vanishes.
double normalized_overlap(const ComplexVector& u, const ComplexVector& v);

/// Scale each column to unit Euclidean norm (zero columns are left alone).
ComplexMatrix normalize_columns(ComplexMatrix m);

}  // namespace epspectra::numerics
