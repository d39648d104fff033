#pragma once

// Finite matrices supporting an exceptional point of order N: Jordan blocks,
// the antisymmetric-coupling tridiagonal chain family, EP localization along a
// ray in coupling space and Jordan-chain canonicalization.

#include <optional>
#include <span>
#include <vector>

#include "epspectra/numerics.hpp"

namespace epspectra::epn {

using numerics::ComplexMatrix;
using numerics::cplx;
using numerics::Index;

/// N x N block with `eigenvalue` on the diagonal and 1 on the superdiagonal.
ComplexMatrix jordan_block(Index dimension, cplx eigenvalue);

struct LocatedEP {
  double t_ep = 0.0;
  cplx E_ep{};
  double gap_at_ep = 0.0;
};

/// Chain model of size N = 2J. The couplings at parameter t are
/// t * coupling_direction, listed from the outermost pair to the innermost one.
struct EPNModel {
  int half_dimension = 1;
  std::vector<double> coupling_direction{1.0};
  double parameter = 0.0;
  std::optional<LocatedEP> located_ep;

  Index dimension() const { return 2 * static_cast<Index>(half_dimension); }
  void validate() const;
};

/// Real tridiagonal matrix with diagonal (2J-1, 2J-3, ..., 1-2J), couplings
/// +c on the superdiagonal and -c on the subdiagonal, mirrored about the centre.
ComplexMatrix chain_hamiltonian(const EPNModel& model);
ComplexMatrix chain_hamiltonian(const EPNModel& model, double t);

/// Direction along which the chain family reaches a full 2J-fold coalescence
/// at t = 1: the k-th coupling from the outside is sqrt(k (2J - k)). This is
/// the spin-(N-1)/2 ladder pattern; sweeps locate t_ep numerically anyway.
std::vector<double> coalescing_direction(int half_dimension);

/// tr(H^2) for real H = sum of squared eigenvalues. For the chain family it is
/// positive while the spectrum is real and turns negative past a full
/// coalescence; it vanishes at any EP of order N because the spectrum is
/// symmetric about zero.
double second_spectral_moment(const ComplexMatrix& h);

struct SweepPoint {
  double t = 0.0;
  double min_gap = 0.0;
  double max_gap = 0.0;
  double max_overlap = 0.0;
  bool defect = false;
  double second_moment = 0.0;
};

struct SweepOptions {
  double bisection_rel_width = 1e-10;
  // Coalescence is accepted when max gap <= max(tol, 4 eps^(1/N)) * ||H||.
  // The eps^(1/N) floor is the splitting that rounding alone produces at an
  // N-fold EP.
  double coalescence_tolerance = 1e-4;
  int max_bracket_expansions = 60;
};

struct SweepReport {
  std::vector<SweepPoint> points;
  LocatedEP located;
  Index grid_minimizer = 0;
  int bisection_steps = 0;
  double coalescence_threshold = 0.0;
};

/// Scan t_grid (ascending, nonnegative), take the grid minimizer of the max
/// eigenvalue gap, then bisect on the sign of the second spectral moment to
/// the requested width. Grid points are evaluated concurrently.
///
/// Stores the result in model.located_ep. Throws NoCoalescence when the
/// spectrum at the refined point is not coalesced.
SweepReport ep_sweep(EPNModel& model, std::span<const double> t_grid,
                     const SweepOptions& options = {});

struct TransitionMatrix {
  ComplexMatrix R;
  cplx jordan_eigenvalue{};
  double similarity_residual = 0.0;
  double inverse_condition = 0.0;  // sigma_min(R) / sigma_max(R)
  double chain_residual = 0.0;     // max_k ||(H - E) R_k - R_{k-1}|| / ||H||
};

struct TransitionOptions {
  double rank_tolerance = 1e-8;
  double chain_tolerance = 1e-6;
};

/// Jordan chain of H at E_ep, normalized to the minimal-norm chain: the
/// kernel vector has unit norm with its first significant component real
/// positive, and every higher vector is orthogonal to it.
///
/// Throws NotAnEP unless H - E_ep has rank N - 1, and ChainBreakdown when the
/// chain does not close.
TransitionMatrix transition_matrix(const ComplexMatrix& h, cplx e_ep,
                                   const TransitionOptions& options = {});

/// ||R^-1 H R - J|| / ||H||.
double verify_jordan_form(const ComplexMatrix& h, const ComplexMatrix& r,
                          const ComplexMatrix& jordan);

}  // namespace epspectra::epn
