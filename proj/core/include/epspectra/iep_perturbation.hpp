#pragma once

// First-order perturbation of the lowest level of the K = 0 canonical form
// J (E_j on the diagonal, ones above it) under lambda V.

#include <span>
#include <vector>

#include "epspectra/numerics.hpp"

namespace epspectra::iep {

using numerics::ComplexMatrix;
using numerics::ComplexVector;
using numerics::cplx;
using numerics::Index;
using numerics::SpectralData;

enum class Closure { prescribed_psi1_1, boundary_zero };

const char* to_string(Closure closure);

struct FirstOrderResult {
  cplx E0{};
  cplx E1{};
  // Components 0 ... N_trunc of the first-order correction. Component 0 is
  // fixed to zero; component N_trunc lies outside the truncated matrix and is
  // the boundary value the closure acts on.
  ComplexVector psi1;
  // Rows 0 ... N_trunc - 2 of the first-order equation, relative to the size
  // of the terms entering them.
  double residual = 0.0;
  double consistency_error = 0.0;  // |E1 - V00 - psi1_1 / psi0_0|
  cplx boundary_value{};
  Closure closure = Closure::prescribed_psi1_1;
};

/// Forward substitution: psi1_1 = (E1 - V00) psi0_0 and
/// psi1_{j+1} = (E_0 - E_j) psi1_j - V_j0 psi0_0 for j >= 1.
FirstOrderResult first_order_forward(std::span<const cplx> energies, const ComplexMatrix& v, cplx psi0_0,
                                     cplx E1, Index n_trunc);

/// E1 chosen so that psi1_{N_trunc} = 0. The boundary component is affine in
/// E1 with slope psi0_0 prod_{j=1}^{N-1} (E_0 - E_j); one Newton step from
/// V00 is exact. Throws DegenerateClosure when |slope| < 1e-14.
FirstOrderResult closure_boundary_zero(std::span<const cplx> energies, const ComplexMatrix& v, cplx psi0_0,
                                       Index n_trunc);

struct DirectReference {
  SpectralData sd;
  std::vector<cplx> unperturbed;
  // paired[n]: perturbed eigenvalue matched to unperturbed level n.
  std::vector<cplx> paired;
  std::vector<Index> pairing;
};

/// Eigendecomposition of J + lambda V with levels matched to the diagonal of J
/// by greedy minimal |difference|.
DirectReference direct_reference(const ComplexMatrix& j_iep, const ComplexMatrix& v, double lambda);

/// E(lambda) - E_level for the perturbed level continuing from diagonal entry
/// `level` of the triangular J. The level is located on the shifted matrix
/// J - E_level + lambda V and refined by a two-sided Rayleigh quotient, so the
/// result keeps relative accuracy when it is much smaller than ||J||.
cplx level_displacement(const ComplexMatrix& j_iep, const ComplexMatrix& v, double lambda, Index level = 0);

/// Bidiagonal J with the given diagonal and ones on the superdiagonal.
ComplexMatrix canonical_k0(std::span<const cplx> energies, Index n);

}  // namespace epspectra::iep
