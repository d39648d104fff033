#include "epspectra/iep_basis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "epspectra/errors.hpp"

namespace epspectra::iep {

namespace {

void check_window(std::span<const cplx> energies, Index K, Index p_max) {
  if (K < 0 || p_max < 0) throw DomainError("K and p_max must be nonnegative");
  if (static_cast<Index>(energies.size()) < K + p_max + 1) {
    throw DomainError("need at least K + p_max + 1 = " + std::to_string(K + p_max + 1) + " energies");
  }
  for (Index i = 0; i <= p_max; ++i) {
    for (Index j = i + 1; j <= p_max; ++j) {
      if (std::abs(energies[K + i] - energies[K + j]) < 1e-10) {
        throw DegenerateSpectrum("energies " + std::to_string(K + i) + " and " + std::to_string(K + j) +
                                 " closer than 1e-10");
      }
    }
  }
}

std::vector<double> adjacent_overlaps(const ComplexMatrix& m) {
  std::vector<double> out;
  for (Index j = 0; j + 1 < m.cols(); ++j) out.push_back(numerics::normalized_overlap(m.col(j), m.col(j + 1)));
  return out;
}

}  // namespace

ComplexMatrix chain_coefficients(std::span<const cplx> energies, Index K, Index p_max,
                                 std::span<const cplx> diagonals) {
  check_window(energies, K, p_max);
  if (!diagonals.empty() && static_cast<Index>(diagonals.size()) != p_max + 1) {
    throw DomainError("diagonal coefficient list must have p_max + 1 entries");
  }
  ComplexMatrix c = ComplexMatrix::Zero(p_max + 1, p_max + 1);
  for (Index k = 0; k <= p_max; ++k) {
    for (Index m = 0; m < k; ++m) c(k, m) = c(k - 1, m) / (energies[K + m] - energies[K + k]);
    c(k, k) = diagonals.empty() ? cplx(1.0) : diagonals[k];
  }
  if (c(0, 0) == 0.0) throw DomainError("c(0, 0) must be nonzero");
  return c;
}

ComplexMatrix iep_canonical_form(std::span<const cplx> energies, Index K, Index p_max) {
  if (K < 0 || p_max < 0 || static_cast<Index>(energies.size()) < K + p_max + 1) {
    throw DomainError("iep_canonical_form: window exceeds the energy list");
  }
  const Index n = K + p_max + 1;
  ComplexMatrix j = ComplexMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) j(i, i) = energies[i];
  for (Index i = K; i + 1 < n; ++i) j(i, i + 1) = 1.0;
  return j;
}

ChainBasis assemble_chain_basis(const ComplexMatrix& h, const SpectralData& sd, Index K, Index p_max) {
  numerics::require_square(h, "assemble_chain_basis H");
  const Index width = K + p_max + 1;
  if (K < 0 || p_max < 0 || sd.size() < width) throw DomainError("assemble_chain_basis: window exceeds the levels");
  if (sd.right_vectors.rows() != h.rows()) throw DomainError("assemble_chain_basis: H and eigenvectors differ in size");

  ChainBasis cb;
  cb.K = K;
  cb.p_max = p_max;
  cb.energies.assign(sd.eigenvalues.begin(), sd.eigenvalues.begin() + width);
  check_window(cb.energies, K, p_max);

  ComplexMatrix psi = numerics::normalize_columns(sd.right_vectors.leftCols(width));
  for (Index n = 1; n < width; ++n) {
    const cplx ov = psi.col(n - 1).dot(psi.col(n));
    if (std::abs(ov) > 0.0) psi.col(n) *= std::conj(ov) / std::abs(ov);
  }

  const auto& e = cb.energies;
  cb.coefficients = ComplexMatrix::Zero(p_max + 1, p_max + 1);
  cb.coefficients(0, 0) = 1.0;
  cb.R.resize(h.rows(), width);
  cb.R.leftCols(K + 1) = psi.leftCols(K + 1);
  for (Index k = 1; k <= p_max; ++k) {
    ComplexVector w = ComplexVector::Zero(h.rows());
    for (Index m = 0; m < k; ++m) {
      cb.coefficients(k, m) = cb.coefficients(k - 1, m) / (e[K + m] - e[K + k]);
      w += cb.coefficients(k, m) * psi.col(K + m);
    }
    const ComplexVector u = psi.col(K + k);
    const cplx ov = u.dot(w);
    const double perp = (w - ov * u).norm();
    if (perp >= 1.0) {
      throw ChainBreakdown("chain column " + std::to_string(K + k) + " cannot be normalized (transverse norm " +
                           std::to_string(perp) + ")");
    }
    cb.coefficients(k, k) = std::sqrt(1.0 - perp * perp) - ov;
    cb.R.col(K + k) = w + cb.coefficients(k, k) * u;
  }

  cb.J_iep = iep_canonical_form(e, K, p_max);
  const ComplexMatrix defect = h * cb.R - cb.R * cb.J_iep;
  for (Index k = 1; k <= p_max; ++k) {
    const double r = defect.col(K + k).norm() / cb.R.col(K + k - 1).norm();
    if (k < p_max) {
      cb.recurrence_residuals.push_back(r);
    } else {
      cb.boundary_residual = r;
    }
  }
  double emax = 1.0;
  for (const cplx& v : e) emax = std::max(emax, std::abs(v));
  if (width > 1) {
    cb.similarity_residual = numerics::norm(defect.leftCols(width - 1)) / (emax * numerics::norm(cb.R.leftCols(width - 1)));
  }
  return cb;
}

BasisDiagnostics basis_diagnostics(const ChainBasis& cb, const SpectralData& sd) {
  const Index width = cb.R.cols();
  if (sd.size() < width || sd.right_vectors.rows() != cb.R.rows()) {
    throw DomainError("basis_diagnostics: spectral data does not cover the chain window");
  }
  const ComplexMatrix chain = numerics::normalize_columns(cb.R);
  const ComplexMatrix eig = numerics::normalize_columns(sd.right_vectors.leftCols(width));
  BasisDiagnostics d;
  d.sigma_min_chain = numerics::min_singular_value(chain);
  d.sigma_min_eig = numerics::min_singular_value(eig);
  d.overlaps_chain = adjacent_overlaps(chain);
  d.overlaps_eig = adjacent_overlaps(eig);
  return d;
}

}  // namespace epspectra::iep
