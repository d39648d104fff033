#include "epspectra/epn_perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include "epspectra/epn_models.hpp"
#include "epspectra/errors.hpp"

namespace epspectra::epn {

namespace {

void require_perturbation(const ComplexMatrix& v) {
  numerics::require_square(v, "perturbation V");
  numerics::require_finite(v, "perturbation V");
  if (v.rows() < 2) throw DomainError("perturbation V must be at least 2 x 2");
}

// (I + lambda A Z) y' = A (e_1 + S y), the eps-derivative of the direct solution.
cplx secular_derivative(const ReducedSystem& system, const ComplexVector& y) {
  const Index n = system.N;
  ComplexVector rhs = ComplexVector::Zero(n);
  rhs(0) = 1.0;
  for (Index i = 1; i < n; ++i) rhs(i) += y(i - 1);
  const ComplexMatrix lhs = system.A_inv + system.lambda * system.Z;
  return numerics::solve_linear(lhs, rhs)(n - 1);
}

std::vector<std::size_t> root_order(const std::vector<cplx>& roots) {
  std::vector<std::size_t> order(roots.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const bool ra = is_real_root(roots[a]);
    const bool rb = is_real_root(roots[b]);
    if (ra != rb) return ra;
    return numerics::eigenvalue_less(roots[a], roots[b]);
  });
  return order;
}

ExponentFit fit_displacements(const ComplexMatrix& h_ep, std::span<const double> lambda_grid,
                              const std::function<ComplexMatrix(double)>& perturbation) {
  if (lambda_grid.size() < 3) throw DomainError("exponent_fit: need at least 3 lambda values");
  const auto [lo, hi] = std::minmax_element(lambda_grid.begin(), lambda_grid.end());
  if (!(*lo > 0.0)) throw DomainError("exponent_fit: lambda values must be positive");
  if (*hi / *lo < 1e3 * (1.0 - 1e-9)) throw DomainError("exponent_fit: lambda grid must span three decades");

  const auto unperturbed = numerics::eigenvalues(h_ep);
  ExponentFit fit;
  for (double lambda : lambda_grid) {
    const auto perturbed = numerics::eigenvalues(h_ep + perturbation(lambda));
    double disp = 0.0;
    for (const cplx& e : perturbed) {
      double nearest = std::numeric_limits<double>::infinity();
      for (const cplx& e0 : unperturbed) nearest = std::min(nearest, std::abs(e - e0));
      disp = std::max(disp, nearest);
    }
    fit.lambdas.push_back(lambda);
    fit.displacements.push_back(disp);
  }
  for (double d : fit.displacements) {
    if (!(d > 0.0)) throw DegenerateData("zero eigenvalue displacement; log-log fit undefined");
    if (d >= 0.1) throw DomainError("exponent_fit: displacement " + std::to_string(d) + " is not small (>= 0.1)");
  }

  const auto m = static_cast<double>(fit.lambdas.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < fit.lambdas.size(); ++i) {
    sx += std::log(fit.lambdas[i]);
    sy += std::log(fit.displacements[i]);
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < fit.lambdas.size(); ++i) {
    const double dx = std::log(fit.lambdas[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(fit.displacements[i]) - my);
  }
  fit.slope = sxy / sxx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < fit.lambdas.size(); ++i) {
    const double pred = my + fit.slope * (std::log(fit.lambdas[i]) - mx);
    const double res = std::log(fit.displacements[i]) - pred;
    ssr += res * res;
  }
  fit.standard_error = m > 2.0 ? std::sqrt(ssr / (m - 2.0) / sxx) : 0.0;
  return fit;
}

}  // namespace

ReducedSystem assemble_system(const ComplexMatrix& v, cplx epsilon, double lambda) {
  require_perturbation(v);
  const Index n = v.rows();
  ReducedSystem s;
  s.N = n;
  s.epsilon = epsilon;
  s.lambda = lambda;

  s.A = ComplexMatrix::Zero(n, n);
  std::vector<cplx> powers(static_cast<std::size_t>(n), 1.0);
  for (Index k = 1; k < n; ++k) powers[k] = powers[k - 1] * epsilon;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j <= i; ++j) s.A(i, j) = powers[i - j];
  }
  s.A_inv = ComplexMatrix::Identity(n, n);
  for (Index i = 1; i < n; ++i) s.A_inv(i, i - 1) = -epsilon;

  s.Z = ComplexMatrix::Zero(n, n);
  s.Z.leftCols(n - 1) = v.rightCols(n - 1);

  s.r = -lambda * v.col(0);
  s.r(0) += epsilon;
  return s;
}

double series_spectral_radius(const ReducedSystem& system) {
  const ComplexMatrix t = system.lambda * system.A * system.Z;
  double rho = 0.0;
  for (const cplx& e : numerics::eigenvalues(t)) rho = std::max(rho, std::abs(e));
  return rho;
}

double series_tail_bound(const ReducedSystem& system, int order) {
  const double q = numerics::norm2(system.lambda * system.A * system.Z);
  if (q >= 1.0) return std::numeric_limits<double>::infinity();
  return std::pow(q, order + 1) / (1.0 - q) * (system.A * system.r).norm();
}

ComplexVector secular_value(const ReducedSystem& system, SecularMode mode) {
  const ComplexVector ar = system.A * system.r;
  if (mode.kind == SecularMode::Kind::direct) {
    const ComplexMatrix lhs =
        ComplexMatrix::Identity(system.N, system.N) + system.lambda * system.A * system.Z;
    return numerics::solve_linear(lhs, ar);
  }
  if (mode.order < 0) throw DomainError("secular_value: series order must be nonnegative");
  const double rho = series_spectral_radius(system);
  if (rho >= 1.0) {
    throw SeriesDiverges("spectral radius of lambda A Z is " + std::to_string(rho));
  }
  const ComplexMatrix step = -system.lambda * system.A * system.Z;
  ComplexVector term = ar;
  ComplexVector sum = ar;
  for (int k = 1; k <= mode.order; ++k) {
    term = step * term;
    sum += term;
  }
  return sum;
}

bool is_real_root(cplx epsilon) { return std::abs(epsilon.imag()) <= 1e-8 + 1e-4 * std::abs(epsilon); }

SecularSolution solve_secular(const ComplexMatrix& v, double lambda, SecularMode mode,
                              const SecularOptions& options) {
  require_perturbation(v);
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("solve_secular: lambda must be >= 0");
  const Index n = v.rows();
  const double vnorm = numerics::norm2(v);

  SecularSolution out;
  out.method = mode;
  out.search_radius = 2.0 * (lambda * vnorm + std::pow(lambda, 1.0 / double(n)));

  auto y_of = [&](cplx eps) { return secular_value(assemble_system(v, eps, lambda), mode); };

  std::vector<cplx> roots;
  if (lambda * vnorm == 0.0) {
    roots.assign(static_cast<std::size_t>(n), 0.0);
  } else if (mode.kind == SecularMode::Kind::direct) {
    const auto seeds = numerics::eigenvalues(jordan_block(n, 0.0) + lambda * v);
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      double separation = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < seeds.size(); ++j) {
        if (j != i) separation = std::min(separation, std::abs(seeds[i] - seeds[j]));
      }
      cplx eps = seeds[i];
      for (int it = 0; it < 3; ++it) {
        const auto system = assemble_system(v, eps, lambda);
        ComplexVector y;
        cplx dy;
        try {
          y = secular_value(system, mode);
          dy = secular_derivative(system, y);
        } catch (const SingularMatrix&) {
          break;
        }
        if (y(n - 1) == 0.0 || dy == 0.0) break;
        const cplx next = eps - y(n - 1) / dy;
        if (!(std::abs(next - seeds[i]) < 0.1 * separation)) break;
        if (!(std::abs(y_of(next)(n - 1)) < std::abs(y(n - 1)))) break;
        eps = next;
      }
      roots.push_back(eps);
    }
  } else {
    const double rho = std::pow(lambda * vnorm, 1.0 / double(n));
    const double escape = 4.0 * std::max(out.search_radius, rho);
    auto deflated = [&](cplx z) {
      cplx value = y_of(z)(n - 1);
      for (const cplx& found : roots) value /= (z - found);
      return value;
    };
    auto newton = [&](cplx eps) -> std::optional<cplx> {
      for (int it = 0; it < options.newton_max_iterations; ++it) {
        const cplx f = deflated(eps);
        if (f == 0.0) return eps;
        const double h = 1e-6 * std::max(std::abs(eps), rho);
        const cplx df = (deflated(eps + h) - deflated(eps - h)) / (2.0 * h);
        if (df == 0.0 || !std::isfinite(std::abs(df))) return std::nullopt;
        const cplx step = f / df;
        eps -= step;
        if (std::abs(eps) > escape) return std::nullopt;
        if (std::abs(step) <= 1e-12 * std::max(std::abs(eps), rho)) return eps;
      }
      return std::nullopt;
    };
    // Seeds on the bisector of two roots cycle; retry from rotated seeds.
    constexpr int kRestarts = 8;
    for (Index k = 0; k < n; ++k) {
      std::optional<cplx> root;
      for (int attempt = 0; attempt < kRestarts && !root; ++attempt) {
        const double angle = (2.0 * std::numbers::pi * double(k) + 0.3 + 0.77 * attempt) / double(n);
        root = newton(std::polar(rho, angle));
      }
      if (!root) {
        throw RootFindingFailure("Newton iteration for root " + std::to_string(k + 1) + " did not converge");
      }
      const cplx eps = *root;
      roots.push_back(eps);
    }
  }

  for (const auto idx : root_order(roots)) {
    const cplx eps = roots[idx];
    const auto system = assemble_system(v, eps, lambda);
    ComplexVector y = secular_value(system, mode);
    const double rnorm = system.r.norm();
    const double compat = rnorm > 0.0 ? std::abs(y(n - 1)) / rnorm : std::abs(y(n - 1));
    if (!(compat <= options.compat_tolerance)) {
      throw RootFindingFailure("root " + std::to_string(eps.real()) + "+" + std::to_string(eps.imag()) +
                               "i violates Omega_N = 0 (relative " + std::to_string(compat) + ")");
    }
    out.roots.push_back(eps);
    out.reality_flags.push_back(is_real_root(eps));
    out.y_vectors.push_back(std::move(y));
    out.compat_residuals.push_back(compat);
  }
  return out;
}

void PerturbationFamily::validate() const {
  if (N < 1) throw DomainError("PerturbationFamily: N must be positive");
  if (mu.rows() != N || mu.cols() != N || exponent.rows() != N || exponent.cols() != N) {
    throw DomainError("PerturbationFamily: mu and exponent must both be N x N");
  }
  numerics::require_finite(mu, "PerturbationFamily mu");
  if (!exponent.allFinite()) throw DomainError("PerturbationFamily: exponents must be finite");
  for (Index j = 0; j < N; ++j) {
    for (Index k = 0; k < N; ++k) {
      const double twice = 2.0 * exponent(j, k);
      if (std::abs(twice - std::round(twice)) > 1e-12) {
        throw DomainError("PerturbationFamily: exponents must be half-integers");
      }
    }
  }
  if (mu.cwiseAbs().maxCoeff() > bound * (1.0 + 1e-12)) {
    throw DomainError("PerturbationFamily: |mu| exceeds the declared bound");
  }
}

ComplexMatrix PerturbationFamily::scaled(double lambda) const {
  validate();
  ComplexMatrix out(N, N);
  for (Index j = 0; j < N; ++j) {
    for (Index k = 0; k < N; ++k) out(j, k) = std::pow(lambda, exponent(j, k)) * mu(j, k);
  }
  return out;
}

PerturbationFamily PerturbationFamily::critical(const ComplexMatrix& mu) {
  PerturbationFamily f;
  f.N = mu.rows();
  f.mu = mu;
  f.exponent = Eigen::MatrixXd::Zero(f.N, f.N);
  for (Index j = 0; j < f.N; ++j) {
    for (Index k = 0; k <= j; ++k) f.exponent(j, k) = 0.5 * double(j - k + 1);
  }
  f.bound = std::max(1.0, mu.cwiseAbs().maxCoeff());
  return f;
}

Classification classify_perturbation(const PerturbationFamily& family) {
  family.validate();
  Classification c;
  for (Index j = 0; j < family.N; ++j) {
    for (Index k = 0; k <= j; ++k) {
      if (family.mu(j, k) == 0.0) continue;
      if (family.exponent(j, k) < 0.5 * double(j - k + 1) - 1e-12) {
        c.benign = false;
        c.witness = std::make_pair(j + 1, k + 1);
        return c;
      }
    }
  }
  return c;
}

ReducedPerturbation rescale_reduced(const PerturbationFamily& family, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("rescale_reduced: lambda must be > 0");
  const ComplexMatrix lv = family.scaled(lambda);
  const Index n = family.N;
  Eigen::VectorXd b(n);
  for (Index j = 0; j < n; ++j) b(j) = std::pow(lambda, 0.5 * double(j + 1));
  const double prefactor = std::pow(lambda, -0.5);

  ReducedPerturbation out;
  out.V_reduced.resize(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index k = 0; k < n; ++k) out.V_reduced(j, k) = prefactor * lv(j, k) * b(k) / b(j);
  }
  out.max_abs = out.V_reduced.cwiseAbs().maxCoeff();

  ComplexMatrix back(n, n);
  const double root = std::sqrt(lambda);
  for (Index j = 0; j < n; ++j) {
    for (Index k = 0; k < n; ++k) back(j, k) = root * b(j) * out.V_reduced(j, k) / b(k);
  }
  const double scale = numerics::norm(lv);
  out.reconstruction_error = scale > 0.0 ? numerics::norm(back - lv) / scale : numerics::norm(back - lv);
  return out;
}

ExponentFit exponent_fit(const ComplexMatrix& h_ep, const ComplexMatrix& direction,
                         std::span<const double> lambda_grid) {
  numerics::require_square(h_ep, "exponent_fit H_ep");
  if (direction.rows() != h_ep.rows() || direction.cols() != h_ep.cols()) {
    throw DomainError("exponent_fit: direction shape mismatch");
  }
  return fit_displacements(h_ep, lambda_grid, [&](double lambda) { return ComplexMatrix(lambda * direction); });
}

ExponentFit exponent_fit(const ComplexMatrix& h_ep, const PerturbationFamily& family,
                         std::span<const double> lambda_grid) {
  numerics::require_square(h_ep, "exponent_fit H_ep");
  if (family.N != h_ep.rows()) throw DomainError("exponent_fit: family dimension mismatch");
  return fit_displacements(h_ep, lambda_grid, [&](double lambda) { return family.scaled(lambda); });
}

std::vector<double> geometric_grid(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi > 0.0) || n < 2) throw DomainError("geometric_grid: need lo, hi > 0 and n >= 2");
  std::vector<double> out(n);
  const double llo = std::log(lo), lhi = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(llo + (lhi - llo) * double(i) / double(n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

}  // namespace epspectra::epn
