#include "epspectra/epn_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "epspectra/errors.hpp"
#include "epspectra/parallel.hpp"

namespace epspectra::epn {

namespace {

std::vector<double> mirrored_couplings(const EPNModel& model, double t) {
  const auto& d = model.coupling_direction;
  std::vector<double> c;
  c.reserve(2 * d.size() - 1);
  for (double v : d) c.push_back(t * v);
  for (auto it = d.rbegin() + 1; it != d.rend(); ++it) c.push_back(t * *it);
  return c;
}

SweepPoint evaluate_point(const EPNModel& model, double t) {
  const ComplexMatrix h = chain_hamiltonian(model, t);
  const auto sd = numerics::eig_biorthogonal(h);
  SweepPoint p;
  p.t = t;
  p.min_gap = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < sd.size(); ++i) {
    for (Index j = i + 1; j < sd.size(); ++j) {
      const double gap = std::abs(sd.eigenvalues[i] - sd.eigenvalues[j]);
      p.min_gap = std::min(p.min_gap, gap);
      p.max_gap = std::max(p.max_gap, gap);
      p.max_overlap = std::max(p.max_overlap, numerics::normalized_overlap(
                                                  sd.right_vectors.col(i), sd.right_vectors.col(j)));
    }
  }
  p.defect = sd.defect_flag;
  p.second_moment = second_spectral_moment(h);
  return p;
}

double max_gap(const std::vector<cplx>& values) {
  double g = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t j = i + 1; j < values.size(); ++j) {
      g = std::max(g, std::abs(values[i] - values[j]));
    }
  }
  return g;
}

}  // namespace

ComplexMatrix jordan_block(Index dimension, cplx eigenvalue) {
  if (dimension < 1) throw DomainError("jordan_block: dimension must be positive");
  ComplexMatrix j = ComplexMatrix::Zero(dimension, dimension);
  j.diagonal().setConstant(eigenvalue);
  if (dimension > 1) j.diagonal(1).setOnes();
  return j;
}

void EPNModel::validate() const {
  if (half_dimension < 1) throw DomainError("EPNModel: half_dimension J must be >= 1");
  if (static_cast<int>(coupling_direction.size()) != half_dimension) {
    throw DomainError("EPNModel: coupling_direction needs exactly J = " +
                      std::to_string(half_dimension) + " entries");
  }
  for (double v : coupling_direction) {
    if (!std::isfinite(v) || v < 0.0) {
      throw DomainError("EPNModel: coupling_direction entries must be finite and nonnegative");
    }
  }
  if (!std::isfinite(parameter)) throw DomainError("EPNModel: parameter must be finite");
}

ComplexMatrix chain_hamiltonian(const EPNModel& model) {
  return chain_hamiltonian(model, model.parameter);
}

ComplexMatrix chain_hamiltonian(const EPNModel& model, double t) {
  model.validate();
  const Index n = model.dimension();
  ComplexMatrix h = ComplexMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) h(i, i) = static_cast<double>(n - 1 - 2 * i);
  const auto c = mirrored_couplings(model, t);
  for (Index i = 0; i + 1 < n; ++i) {
    h(i, i + 1) = c[static_cast<std::size_t>(i)];
    h(i + 1, i) = -c[static_cast<std::size_t>(i)];
  }
  return h;
}

std::vector<double> coalescing_direction(int half_dimension) {
  if (half_dimension < 1) throw DomainError("coalescing_direction: J must be >= 1");
  const int n = 2 * half_dimension;
  std::vector<double> d;
  for (int k = 1; k <= half_dimension; ++k) d.push_back(std::sqrt(double(k) * double(n - k)));
  return d;
}

double second_spectral_moment(const ComplexMatrix& h) {
  // tr(H^2) = sum_ij H_ij H_ji without forming the product.
  cplx acc = 0.0;
  for (Index i = 0; i < h.rows(); ++i) {
    for (Index j = 0; j < h.cols(); ++j) acc += h(i, j) * h(j, i);
  }
  return acc.real();
}

SweepReport ep_sweep(EPNModel& model, std::span<const double> t_grid, const SweepOptions& options) {
  model.validate();
  if (t_grid.empty()) throw DomainError("ep_sweep: t_grid is empty");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!std::isfinite(t_grid[i]) || t_grid[i] < 0.0) {
      throw DomainError("ep_sweep: t_grid values must be finite and nonnegative");
    }
    if (i > 0 && !(t_grid[i] > t_grid[i - 1])) throw DomainError("ep_sweep: t_grid must be ascending");
  }

  SweepReport report;
  report.points = parallel_map(t_grid.size(), [&](std::size_t i) { return evaluate_point(model, t_grid[i]); });

  const auto best = std::min_element(report.points.begin(), report.points.end(),
                                     [](const SweepPoint& a, const SweepPoint& b) { return a.max_gap < b.max_gap; });
  report.grid_minimizer = best - report.points.begin();

  auto moment = [&](double t) { return second_spectral_moment(chain_hamiltonian(model, t)); };

  // Bracket [lo, hi] with moment(lo) > 0 >= moment(hi).
  double lo = 0.0;
  double hi = 0.0;
  const auto i0 = static_cast<std::size_t>(report.grid_minimizer);
  if (report.points[i0].second_moment > 0.0) {
    lo = t_grid[i0];
    std::size_t k = i0 + 1;
    while (k < t_grid.size() && report.points[k].second_moment > 0.0) lo = t_grid[k++];
    if (k < t_grid.size()) {
      hi = t_grid[k];
    } else {
      const double step = std::max({t_grid.back() - t_grid.front(), std::abs(t_grid.back()), 1.0});
      hi = t_grid.back() + step;
      int expansions = 0;
      while (moment(hi) > 0.0) {
        lo = hi;
        hi += step * std::ldexp(1.0, ++expansions);
        if (expansions > options.max_bracket_expansions) {
          throw NoCoalescence("second spectral moment never changes sign along this direction");
        }
      }
    }
  } else {
    hi = t_grid[i0];
    std::size_t k = i0;
    lo = 0.0;
    while (k > 0) {
      --k;
      if (report.points[k].second_moment > 0.0) {
        lo = t_grid[k];
        break;
      }
      hi = t_grid[k];
    }
    if (moment(lo) <= 0.0) throw NoCoalescence("no sign change of the second spectral moment");
  }

  while (hi - lo > options.bisection_rel_width * std::abs(hi)) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (moment(mid) > 0.0 ? lo : hi) = mid;
    ++report.bisection_steps;
  }
  // Final regula-falsi step inside the bracket.
  const double m_lo = moment(lo);
  const double m_hi = moment(hi);
  double t_ep = 0.5 * (lo + hi);
  if (m_lo != m_hi) t_ep = std::clamp(lo + (hi - lo) * m_lo / (m_lo - m_hi), lo, hi);

  const ComplexMatrix h = chain_hamiltonian(model, t_ep);
  const auto values = numerics::eigenvalues(h);
  const double n = static_cast<double>(h.rows());
  report.located.t_ep = t_ep;
  report.located.E_ep = h.trace() / n;
  report.located.gap_at_ep = max_gap(values);

  const double rounding_floor = 4.0 * std::pow(std::numeric_limits<double>::epsilon(), 1.0 / n);
  report.coalescence_threshold = std::max(options.coalescence_tolerance, rounding_floor) * numerics::norm(h);
  if (report.located.gap_at_ep > report.coalescence_threshold) {
    throw NoCoalescence("max gap " + std::to_string(report.located.gap_at_ep) + " at t = " +
                        std::to_string(t_ep) + " exceeds " + std::to_string(report.coalescence_threshold));
  }
  model.located_ep = report.located;
  return report;
}

TransitionMatrix transition_matrix(const ComplexMatrix& h, cplx e_ep, const TransitionOptions& options) {
  numerics::require_square(h, "transition_matrix H");
  numerics::require_finite(h, "transition_matrix H");
  const Index n = h.rows();
  const double scale = std::max(numerics::norm(h), std::numeric_limits<double>::min());
  const ComplexMatrix a = h - e_ep * ComplexMatrix::Identity(n, n);

  const auto s = numerics::singular_values(a);
  const double rank_tol = options.rank_tolerance * scale;
  const bool kernel_ok = s.back() <= rank_tol;
  const bool rank_ok = n == 1 || s[static_cast<std::size_t>(n - 2)] > rank_tol;
  if (!kernel_ok || !rank_ok) {
    throw NotAnEP("H - E_ep does not have rank N - 1 (smallest singular values " +
                  std::to_string(s.back()) + (n > 1 ? ", " + std::to_string(s[n - 2]) : std::string()) +
                  ", tolerance " + std::to_string(rank_tol) + ")");
  }

  // Top of the chain: dominant right singular vector of (H - E)^(N-1), then
  // walk down with R_{k-1} = (H - E) R_k.
  ComplexMatrix power = ComplexMatrix::Identity(n, n);
  for (Index k = 1; k < n; ++k) power = a * power;
  Eigen::JacobiSVD<ComplexMatrix> svd(power, Eigen::ComputeFullV);
  ComplexMatrix r(n, n);
  r.col(n - 1) = svd.matrixV().col(0);
  for (Index k = n - 1; k > 0; --k) r.col(k - 1) = a * r.col(k);

  const double head_norm = r.col(0).norm();
  if (head_norm == 0.0 || (a * r.col(0)).norm() > options.chain_tolerance * scale * head_norm) {
    throw ChainBreakdown("the Jordan chain does not terminate in the kernel of H - E_ep");
  }

  // Unit kernel vector, first significant component real positive.
  const auto& head = r.col(0);
  const double big = head.cwiseAbs().maxCoeff();
  Index lead = 0;
  while (std::abs(head(lead)) <= 1e-8 * big) ++lead;
  const cplx phase = std::conj(head(lead)) / std::abs(head(lead));
  r *= phase / head_norm;

  // Minimal-norm chain: R' = R T with T upper-triangular Toeplitz (commutes with J).
  std::vector<cplx> beta(static_cast<std::size_t>(n), 0.0);
  beta[0] = 1.0;
  for (Index k = 1; k < n; ++k) {
    cplx acc = 0.0;
    for (Index j = 0; j < k; ++j) acc += beta[j] * r.col(0).dot(r.col(k - j));
    beta[k] = -acc;
  }
  ComplexMatrix minimal(n, n);
  for (Index k = 0; k < n; ++k) {
    minimal.col(k).setZero();
    for (Index j = 0; j <= k; ++j) minimal.col(k) += beta[j] * r.col(k - j);
  }

  TransitionMatrix out;
  out.R = std::move(minimal);
  out.jordan_eigenvalue = e_ep;
  out.chain_residual = (a * out.R.col(0)).norm() / scale;
  for (Index k = 1; k < n; ++k) {
    out.chain_residual = std::max(out.chain_residual, (a * out.R.col(k) - out.R.col(k - 1)).norm() / scale);
  }
  if (out.chain_residual > options.chain_tolerance) {
    throw ChainBreakdown("chain residual " + std::to_string(out.chain_residual));
  }
  const auto rs = numerics::singular_values(out.R);
  out.inverse_condition = rs.back() / rs.front();
  out.similarity_residual = verify_jordan_form(h, out.R, jordan_block(n, e_ep));
  return out;
}

double verify_jordan_form(const ComplexMatrix& h, const ComplexMatrix& r, const ComplexMatrix& jordan) {
  numerics::require_square(h, "verify_jordan_form H");
  if (r.rows() != h.rows() || r.cols() != h.cols() || jordan.rows() != h.rows() || jordan.cols() != h.cols()) {
    throw DomainError("verify_jordan_form: shape mismatch");
  }
  const ComplexMatrix similar = numerics::solve_linear(r, ComplexMatrix(h * r));
  const double scale = numerics::norm(h);
  const double diff = numerics::norm(similar - jordan);
  return scale > 0.0 ? diff / scale : diff;
}

}  // namespace epspectra::epn
