#include "epspectra/iep_perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <tuple>

#include "epspectra/errors.hpp"

namespace epspectra::iep {

namespace {

void check_inputs(std::span<const cplx> energies, const ComplexMatrix& v, cplx psi0_0, Index n_trunc) {
  if (n_trunc < 2) throw DomainError("N_trunc must be at least 2");
  if (static_cast<Index>(energies.size()) < n_trunc) throw DomainError("fewer energies than N_trunc");
  if (v.rows() < n_trunc || v.cols() < n_trunc) throw DomainError("perturbation smaller than N_trunc");
  numerics::require_finite(v, "perturbation V");
  if (psi0_0 == 0.0) throw DomainError("psi0_0 must be nonzero");
  for (Index i = 0; i < n_trunc; ++i) {
    for (Index j = i + 1; j < n_trunc; ++j) {
      if (std::abs(energies[i] - energies[j]) < 1e-10) {
        throw DomainError("energies " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
      }
    }
  }
}

std::vector<Index> greedy_pairing(const std::vector<cplx>& targets, const std::vector<cplx>& candidates) {
  const auto n = targets.size();
  std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < candidates.size(); ++j) pairs.emplace_back(std::abs(targets[i] - candidates[j]), i, j);
  }
  std::sort(pairs.begin(), pairs.end());
  std::vector<Index> out(n, -1);
  std::vector<bool> used(candidates.size(), false);
  for (const auto& [d, i, j] : pairs) {
    if (out[i] >= 0 || used[j]) continue;
    out[i] = static_cast<Index>(j);
    used[j] = true;
  }
  return out;
}

}  // namespace

const char* to_string(Closure closure) {
  return closure == Closure::boundary_zero ? "boundary_zero" : "prescribed_psi1_1";
}

ComplexMatrix canonical_k0(std::span<const cplx> energies, Index n) {
  if (n < 1 || static_cast<Index>(energies.size()) < n) throw DomainError("canonical_k0: not enough energies");
  ComplexMatrix j = ComplexMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) j(i, i) = energies[i];
  for (Index i = 0; i + 1 < n; ++i) j(i, i + 1) = 1.0;
  return j;
}

FirstOrderResult first_order_forward(std::span<const cplx> energies, const ComplexMatrix& v, cplx psi0_0,
                                     cplx E1, Index n_trunc) {
  check_inputs(energies, v, psi0_0, n_trunc);
  FirstOrderResult out;
  out.E0 = energies[0];
  out.E1 = E1;
  out.closure = Closure::prescribed_psi1_1;
  out.psi1 = ComplexVector::Zero(n_trunc + 1);
  out.psi1(1) = (E1 - v(0, 0)) * psi0_0;
  for (Index j = 1; j < n_trunc; ++j) {
    out.psi1(j + 1) = (out.E0 - energies[j]) * out.psi1(j) - v(j, 0) * psi0_0;
  }
  out.boundary_value = out.psi1(n_trunc);

  const ComplexMatrix j = canonical_k0(energies, n_trunc);
  ComplexVector eq = (j - out.E0 * ComplexMatrix::Identity(n_trunc, n_trunc)) * out.psi1.head(n_trunc) +
                     v.topLeftCorner(n_trunc, n_trunc).col(0) * psi0_0;
  eq(0) -= E1 * psi0_0;
  double gap = 1.0;
  for (Index i = 0; i < n_trunc; ++i) gap = std::max(gap, std::abs(energies[i] - out.E0));
  const double scale = gap * out.psi1.norm() + (v.col(0).head(n_trunc).norm() + std::abs(E1)) * std::abs(psi0_0);
  out.residual = eq.head(n_trunc - 1).norm() / scale;
  out.consistency_error = std::abs(E1 - v(0, 0) - out.psi1(1) / psi0_0);
  return out;
}

FirstOrderResult closure_boundary_zero(std::span<const cplx> energies, const ComplexMatrix& v, cplx psi0_0,
                                       Index n_trunc) {
  check_inputs(energies, v, psi0_0, n_trunc);
  cplx slope = psi0_0;
  for (Index j = 1; j < n_trunc; ++j) slope *= energies[0] - energies[j];
  if (!(std::abs(slope) >= 1e-14)) {
    throw DegenerateClosure("boundary component barely depends on E1 (slope " + std::to_string(std::abs(slope)) + ")");
  }
  const cplx seed = v(0, 0);
  const auto at_seed = first_order_forward(energies, v, psi0_0, seed, n_trunc);
  auto out = first_order_forward(energies, v, psi0_0, seed - at_seed.boundary_value / slope, n_trunc);
  out.closure = Closure::boundary_zero;
  return out;
}

DirectReference direct_reference(const ComplexMatrix& j_iep, const ComplexMatrix& v, double lambda) {
  numerics::require_square(j_iep, "direct_reference J");
  if (v.rows() != j_iep.rows() || v.cols() != j_iep.cols()) throw DomainError("direct_reference: shape mismatch");
  DirectReference out;
  out.sd = numerics::eig_biorthogonal(j_iep + lambda * v);
  for (Index i = 0; i < j_iep.rows(); ++i) out.unperturbed.push_back(j_iep(i, i));
  out.pairing = greedy_pairing(out.unperturbed, out.sd.eigenvalues);
  for (Index k : out.pairing) out.paired.push_back(out.sd.eigenvalues[k]);
  return out;
}

cplx level_displacement(const ComplexMatrix& j_iep, const ComplexMatrix& v, double lambda, Index level) {
  numerics::require_square(j_iep, "level_displacement J");
  const Index n = j_iep.rows();
  if (level < 0 || level >= n) throw DomainError("level_displacement: level out of range");
  if (v.rows() != n || v.cols() != n) throw DomainError("level_displacement: shape mismatch");

  const cplx e = j_iep(level, level);
  const ComplexMatrix shifted = j_iep - e * ComplexMatrix::Identity(n, n);
  const ComplexMatrix lv = lambda * v;
  const auto sd = numerics::eig_biorthogonal(shifted + lv);

  std::vector<cplx> diag(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) diag[i] = shifted(i, i);
  const Index k = greedy_pairing(diag, sd.eigenvalues)[level];

  const ComplexVector psi = sd.right_vectors.col(k);
  const ComplexVector chi = sd.left_vectors.col(k);
  const cplx norm = chi.dot(psi);
  if (std::abs(norm) == 0.0) return sd.eigenvalues[k];
  const ComplexVector action = shifted * psi + lv * psi;
  return chi.dot(action) / norm;
}

}  // namespace epspectra::iep
