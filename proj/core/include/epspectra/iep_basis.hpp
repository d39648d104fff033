#pragma once

// Chain basis for a spectrum whose eigenvectors parallelize asymptotically:
// the first K eigenvectors are kept, the next ones are replaced by vectors
// f_{K+p} satisfying (H - E_{K+p}) f_{K+p} = f_{K+p-1}.

#include <span>
#include <vector>

#include "epspectra/numerics.hpp"

namespace epspectra::iep {

using numerics::ComplexMatrix;
using numerics::ComplexVector;
using numerics::cplx;
using numerics::Index;
using numerics::SpectralData;

/// Lower-triangular table c(k, m), 0 <= m <= k <= p_max, from
/// c(k, m) = c(k-1, m) / (E_{K+m} - E_{K+k}) for m < k.
/// Diagonal entries are taken from `diagonals` (size p_max + 1) when given,
/// otherwise they are 1.
/// Throws DegenerateSpectrum when two window energies are closer than 1e-10.
ComplexMatrix chain_coefficients(std::span<const cplx> energies, Index K, Index p_max,
                                 std::span<const cplx> diagonals = {});

/// diag(E_0 ... E_{K-1}) followed by the bidiagonal block with E_K ... E_{K+p_max}
/// on the diagonal and ones on its superdiagonal.
ComplexMatrix iep_canonical_form(std::span<const cplx> energies, Index K, Index p_max);

struct ChainBasis {
  Index K = 0;
  Index p_max = 0;
  std::vector<cplx> energies;  // E_0 ... E_{K+p_max}
  ComplexMatrix coefficients;  // (p_max + 1) x (p_max + 1)
  ComplexMatrix R;             // psi_0 ... psi_{K-1}, f_K ... f_{K+p_max}
  ComplexMatrix J_iep;
  // ||(H - E_{K+m}) f_{K+m} - f_{K+m-1}|| / ||f_{K+m-1}|| for m = 1 ... p_max - 1.
  std::vector<double> recurrence_residuals;
  double boundary_residual = 0.0;  // same quantity for m = p_max
  // ||H R - R J|| over all but the last column, over max(1, max|E|) ||R||.
  double similarity_residual = 0.0;
};

/// Uses the first K + p_max + 1 levels of `sd`, which the caller restricts to
/// a converged window. Eigenvector phases are aligned so that adjacent
/// overlaps are real and positive. Each diagonal coefficient is fixed so the
/// chain column has unit norm and a positive real overlap with its own
/// eigenvector. Throws ChainBreakdown when that is impossible.
ChainBasis assemble_chain_basis(const ComplexMatrix& h, const SpectralData& sd, Index K, Index p_max);

struct BasisDiagnostics {
  double sigma_min_chain = 0.0;
  double sigma_min_eig = 0.0;
  std::vector<double> overlaps_chain;
  std::vector<double> overlaps_eig;
};

/// Smallest singular values of the column-normalized chain basis and of the
/// first K + p_max + 1 normalized eigenvectors, with adjacent-column overlaps.
BasisDiagnostics basis_diagnostics(const ChainBasis& cb, const SpectralData& sd);

}  // namespace epspectra::iep
