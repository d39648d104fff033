#include "epspectra/ic_spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "epspectra/errors.hpp"
#include "epspectra/parallel.hpp"

namespace epspectra::ic {

namespace {

Eigen::MatrixXd lowering(Index m) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
  for (Index n = 1; n < m; ++n) a(n - 1, n) = std::sqrt(double(n));
  return a;
}

ComplexMatrix build_sized(int delta, Index m, double omega) {
  const Eigen::MatrixXd a = lowering(m);
  const Eigen::MatrixXd at = a.transpose();
  const Eigen::MatrixXd x = (a + at) / std::sqrt(2.0 * omega);
  const Eigen::MatrixXd q = at - a;  // p = i sqrt(omega / 2) q
  const Eigen::MatrixXd p2 = -(omega / 2.0) * (q * q);
  const Eigen::MatrixXd x2 = x * x;
  if (delta == 0) return (p2 + x2).cast<cplx>();
  const Eigen::MatrixXd x3 = x2 * x;
  ComplexMatrix h(m, m);
  h.real() = p2;
  h.imag() = x3;
  return h;
}

// S = diag(i^n) applied as a column scaling.
cplx gauge_phase(Index n) {
  switch (n % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

}  // namespace

void OscillatorSpec::validate() const {
  if (delta != 0 && delta != 1) throw DomainError("delta must be 0 or 1");
  if (basis_size < 4) throw DomainError("basis size M must be at least 4");
  if (!(basis_frequency >= 0.0) || !std::isfinite(basis_frequency)) {
    throw DomainError("basis frequency must be finite and nonnegative");
  }
}

double OscillatorSpec::frequency() const {
  if (basis_frequency > 0.0) return basis_frequency;
  return delta == 0 ? 1.0 : 2.0;
}

ComplexMatrix build_bb_matrix(const OscillatorSpec& spec) {
  spec.validate();
  return build_sized(spec.delta, spec.basis_size, spec.frequency());
}

ComplexMatrix build_bb_action(const OscillatorSpec& spec) {
  spec.validate();
  const Index m = spec.basis_size;
  return build_sized(spec.delta, m + 6, spec.frequency()).topLeftCorner(m + 3, m + 3);
}

double pt_residual(const ComplexMatrix& h) {
  numerics::require_square(h, "pt_residual input");
  const double scale = numerics::norm(h);
  if (scale == 0.0) return 0.0;
  ComplexMatrix php = h;
  for (Index i = 0; i < h.rows(); ++i) {
    for (Index j = 0; j < h.cols(); ++j) {
      if ((i + j) % 2 != 0) php(i, j) = -php(i, j);
    }
  }
  return numerics::norm(php - h.adjoint()) / scale;
}

SpectralData solve_spectrum(const ComplexMatrix& h, const numerics::EigOptions& options) {
  numerics::require_square(h, "solve_spectrum input");
  const Index m = h.rows();
  ComplexMatrix g(m, m);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < m; ++j) g(i, j) = std::conj(gauge_phase(i)) * h(i, j) * gauge_phase(j);
  }
  const double scale = numerics::norm(h);
  if (g.imag().cwiseAbs().maxCoeff() > 1e-14 * scale) return numerics::eig_biorthogonal(h, options);

  ComplexMatrix real_form = g.real().cast<cplx>();
  SpectralData sd = numerics::eig_biorthogonal(real_form, options);
  for (Index i = 0; i < m; ++i) {
    sd.right_vectors.row(i) *= gauge_phase(i);
    sd.left_vectors.row(i) *= gauge_phase(i);
  }
  return sd;
}

std::vector<Index> converged_levels(std::span<const cplx> coarse, std::span<const cplx> refined,
                                    double tolerance) {
  std::vector<Index> out;
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    double nearest = std::numeric_limits<double>::infinity();
    for (const cplx& e : refined) nearest = std::min(nearest, std::abs(e - coarse[i]));
    if (nearest <= tolerance * (1.0 + std::abs(coarse[i]))) out.push_back(static_cast<Index>(i));
  }
  std::sort(out.begin(), out.end(),
            [&](Index a, Index b) { return numerics::eigenvalue_less(coarse[a], coarse[b]); });
  return out;
}

std::vector<Index> converged_levels(const SpectralData& coarse, const SpectralData& refined, double tolerance) {
  return converged_levels(std::span<const cplx>(coarse.eigenvalues), std::span<const cplx>(refined.eigenvalues),
                          tolerance);
}

ConvergenceTable convergence_study(int delta, std::span<const Index> basis_sizes, double basis_frequency) {
  if (basis_sizes.empty()) throw DomainError("convergence_study: empty basis-size list");
  for (std::size_t i = 1; i < basis_sizes.size(); ++i) {
    if (basis_sizes[i] <= basis_sizes[i - 1]) throw DomainError("convergence_study: sizes must ascend");
  }
  const auto spectra = parallel_map(basis_sizes.size(), [&](std::size_t i) {
    OscillatorSpec spec{delta, basis_sizes[i], basis_frequency};
    return numerics::eigenvalues(build_bb_matrix(spec));
  });

  ConvergenceTable table;
  table.basis_sizes.assign(basis_sizes.begin(), basis_sizes.end());
  const std::size_t ref = basis_sizes.size() >= 2 ? basis_sizes.size() - 2 : 0;
  for (const cplx& e : spectra[ref]) {
    std::vector<cplx> row;
    for (const auto& spectrum : spectra) {
      cplx best = spectrum.front();
      for (const cplx& s : spectrum) {
        if (std::abs(s - e) < std::abs(best - e)) best = s;
      }
      row.push_back(best);
    }
    bool flag = false;
    if (basis_sizes.size() >= 2) flag = std::abs(row[ref + 1] - row[ref]) <= 1e-6 * (1.0 + std::abs(row[ref]));
    if (flag) {
      ++table.converged_count;
      table.max_converged_imag = std::max(table.max_converged_imag, std::abs(row[ref].imag()));
    }
    table.levels.push_back(std::move(row));
    table.converged.push_back(flag);
  }
  return table;
}

ParallelizationReport parallelization_diagnostics(const SpectralData& sd, Index n_max,
                                                  const SpectralData& sd_refined) {
  ParallelizationReport report;
  if (sd.size() <= 1) {
    report.converged_count = static_cast<std::size_t>(sd.size());
    if (sd.size() == 1) {
      report.energies.push_back(sd.eigenvalues.front());
      const double kappa = sd.right_vectors.col(0).norm() * sd.left_vectors.col(0).norm() /
                           std::abs(sd.left_vectors.col(0).dot(sd.right_vectors.col(0)));
      report.kappa.push_back(kappa);
    }
    return report;
  }
  const auto levels = converged_levels(sd, sd_refined);
  report.converged_count = levels.size();
  if (levels.size() <= 2) {
    throw InsufficientConvergence("only " + std::to_string(levels.size()) + " levels converged");
  }
  if (n_max < 0 || static_cast<std::size_t>(n_max) >= levels.size()) {
    throw DomainError("n_max must be below the converged count " + std::to_string(levels.size()));
  }
  for (Index n = 0; n <= n_max; ++n) {
    const Index k = levels[n];
    const ComplexVector& psi = sd.right_vectors.col(k);
    const ComplexVector& chi = sd.left_vectors.col(k);
    report.energies.push_back(sd.eigenvalues[k]);
    report.kappa.push_back(psi.norm() * chi.norm() / std::abs(chi.dot(psi)));
    if (n < n_max) {
      const Index k1 = levels[n + 1];
      report.overlaps_right.push_back(numerics::normalized_overlap(psi, sd.right_vectors.col(k1)));
      report.overlaps_left.push_back(numerics::normalized_overlap(chi, sd.left_vectors.col(k1)));
    }
  }
  return report;
}

MetricReport metric_operator(const ComplexMatrix& h, const SpectralData& sd, Index K) {
  numerics::require_square(h, "metric_operator H");
  const Index m = sd.right_vectors.rows();
  if (K < 1 || K > sd.size()) throw DomainError("metric_operator: K must be in [1, number of levels]");
  if (h.rows() < m) throw DomainError("metric_operator: H smaller than the eigenvectors");

  ComplexMatrix chi = ComplexMatrix::Zero(h.rows(), K);
  for (Index n = 0; n < K; ++n) {
    const cplx g = sd.left_vectors.col(n).dot(sd.right_vectors.col(n));
    if (std::abs(g) == 0.0) throw DegenerateSpectrum("ketket orthogonal to its ket at level " + std::to_string(n));
    chi.col(n).head(m) = sd.left_vectors.col(n) / std::conj(g);
  }

  MetricReport report;
  report.Theta = chi * chi.adjoint();
  const double theta_norm = numerics::norm(report.Theta);
  report.hermiticity_error = numerics::norm(report.Theta - report.Theta.adjoint()) / theta_norm;

  const ComplexMatrix q = Eigen::HouseholderQR<ComplexMatrix>(chi).householderQ() *
                          ComplexMatrix::Identity(h.rows(), K);
  const ComplexMatrix res = h.adjoint() * report.Theta - report.Theta * h;
  report.quasi_hermiticity_residual = numerics::norm(q.adjoint() * res * q) / theta_norm;

  const ComplexMatrix herm = 0.5 * (report.Theta + report.Theta.adjoint());
  report.min_eigenvalue = Eigen::SelfAdjointEigenSolver<ComplexMatrix>(herm.topLeftCorner(m, m),
                                                                       Eigen::EigenvaluesOnly)
                              .eigenvalues()
                              .minCoeff();
  const ComplexMatrix restricted = q.adjoint() * herm * q;
  report.span_min_eigenvalue =
      Eigen::SelfAdjointEigenSolver<ComplexMatrix>(restricted, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  return report;
}

std::vector<cplx> real_levels(const SpectralData& sd, std::size_t n) {
  std::vector<cplx> out;
  for (const cplx& e : sd.eigenvalues) {
    if (std::abs(e.imag()) <= 1e-6 * (1.0 + std::abs(e))) out.push_back(e);
    if (out.size() == n) break;
  }
  if (out.size() < n) {
    throw InsufficientConvergence("only " + std::to_string(out.size()) + " real levels available, " +
                                  std::to_string(n) + " requested");
  }
  return out;
}

}  // namespace epspectra::ic
