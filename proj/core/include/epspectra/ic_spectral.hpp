#pragma once

// Truncated harmonic-oscillator basis solver for H = p^2 + (ix)^delta x^2,
// delta in {0, 1}. delta = 1 is the imaginary cubic oscillator p^2 + i x^3.

#include <optional>
#include <span>
#include <vector>

#include "epspectra/numerics.hpp"

namespace epspectra::ic {

using numerics::ComplexMatrix;
using numerics::ComplexVector;
using numerics::cplx;
using numerics::Index;
using numerics::SpectralData;

struct OscillatorSpec {
  int delta = 1;
  Index basis_size = 64;
  // Frequency of the reference oscillator p^2 + omega^2 x^2 whose eigenbasis is
  // used. Zero selects the default: 1 for delta = 0, 2 for delta = 1.
  double basis_frequency = 0.0;

  void validate() const;
  double frequency() const;
};

/// x = (a + a^H) / sqrt(2 omega), p = i sqrt(omega / 2) (a^H - a), both
/// truncated to M x M; p^2 and x^3 are formed by truncated products.
ComplexMatrix build_bb_matrix(const OscillatorSpec& spec);

/// The same operator built with three extra basis states and six guard
/// states, cropped to (M + 3) x (M + 3). Applied to vectors supported on the
/// first M states it reproduces the untruncated action exactly.
ComplexMatrix build_bb_action(const OscillatorSpec& spec);

/// ||P H P - H^H|| / ||H|| with P = diag((-1)^n).
double pt_residual(const ComplexMatrix& h);

/// Eigendecomposition of a basis-oscillator matrix. When conjugation by
/// S = diag(i^n) makes the matrix real (true for delta = 1), the real solver
/// is used so the spectrum is exactly real or in conjugate pairs; vectors are
/// mapped back, and S is unitary so overlaps are unchanged.
SpectralData solve_spectrum(const ComplexMatrix& h, const numerics::EigOptions& options = {});

/// Indices (ascending in eigenvalue order) of levels of `coarse` that have a
/// partner in `refined` within tolerance * (1 + |E|). Truncation artefacts of
/// either size find no partner and are dropped.
std::vector<Index> converged_levels(const SpectralData& coarse, const SpectralData& refined,
                                    double tolerance = 1e-6);
std::vector<Index> converged_levels(std::span<const cplx> coarse, std::span<const cplx> refined,
                                    double tolerance = 1e-6);

struct ConvergenceTable {
  std::vector<Index> basis_sizes;
  // levels[n][i]: level n tracked at basis_sizes[i] by nearest eigenvalue.
  std::vector<std::vector<cplx>> levels;
  std::vector<bool> converged;
  std::size_t converged_count = 0;
  double max_converged_imag = 0.0;
};

/// Rows are the levels of the second-largest basis, in eigenvalue order.
/// A row is flagged when the two largest bases agree to 1e-6 (1 + |E|).
/// With a single basis size every flag is false.
ConvergenceTable convergence_study(int delta, std::span<const Index> basis_sizes,
                                   double basis_frequency = 0.0);

struct ParallelizationReport {
  std::vector<cplx> energies;
  std::vector<double> overlaps_right;
  std::vector<double> overlaps_left;
  std::vector<double> kappa;
  std::size_t converged_count = 0;
};

/// Adjacent-level overlaps and projector norms over the first n_max + 1
/// converged levels of `sd`, convergence judged against `sd_refined`.
/// Throws InsufficientConvergence when at most two levels converge.
ParallelizationReport parallelization_diagnostics(const SpectralData& sd, Index n_max,
                                                  const SpectralData& sd_refined);

struct MetricReport {
  ComplexMatrix Theta;
  double quasi_hermiticity_residual = 0.0;
  double min_eigenvalue = 0.0;        // Hermitian part of Theta, full space
  double span_min_eigenvalue = 0.0;   // Theta restricted to the ketket span
  double hermiticity_error = 0.0;     // ||Theta - Theta^H|| / ||Theta||
};

/// Theta = sum_{n<K} |chi_n><chi_n| from the first K levels of `sd`, with
/// <chi_n|psi_n> = 1. The residual ||Q^H (H^H Theta - Theta H) Q|| / ||Theta||
/// uses an orthonormal basis Q of the ketket span. `h` may be larger than the
/// vectors (see build_bb_action); vectors are zero-padded to its size.
MetricReport metric_operator(const ComplexMatrix& h, const SpectralData& sd, Index K);

/// Lowest n eigenvalues with |Im E| <= 1e-6 (1 + |E|), ascending.
std::vector<cplx> real_levels(const SpectralData& sd, std::size_t n);

}  // namespace epspectra::ic
