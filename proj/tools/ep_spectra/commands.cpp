#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <sstream>
#include <stdexcept>

#include "epspectra/epn_models.hpp"
#include "epspectra/epn_perturbation.hpp"
#include "epspectra/errors.hpp"
#include "epspectra/ic_spectral.hpp"
#include "epspectra/iep_basis.hpp"
#include "epspectra/iep_perturbation.hpp"
#include "epspectra/parallel.hpp"

namespace ep_cli {

namespace ep = epspectra;
using ep::numerics::Index;

std::vector<double> parse_grid(const std::string& spec, bool geometric) {
  std::stringstream ss(spec);
  std::string a, b, n;
  if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, n) || n.empty()) {
    throw ep::DomainError("grid '" + spec + "' is not of the form a:b:n");
  }
  double lo = 0.0, hi = 0.0;
  long count = 0;
  try {
    lo = std::stod(a);
    hi = std::stod(b);
    count = std::stol(n);
  } catch (const std::exception&) {
    throw ep::DomainError("grid '" + spec + "' has a non-numeric field");
  }
  if (count < 2) throw ep::DomainError("grid '" + spec + "' needs at least 2 points");
  if (geometric) return ep::epn::geometric_grid(lo, hi, static_cast<std::size_t>(count));
  std::vector<double> out(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) out[i] = lo + (hi - lo) * double(i) / double(count - 1);
  out.back() = hi;
  return out;
}

namespace {

ComplexMatrix gaussian_matrix(std::mt19937_64& rng, Index n, bool complex_entries) {
  std::normal_distribution<double> nd(0.0, 1.0);
  ComplexMatrix m(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      const double re = nd(rng);
      m(i, j) = complex_entries ? cplx(re, nd(rng)) : cplx(re, 0.0);
    }
  }
  return m;
}

json sweep_point_json(const ep::epn::SweepPoint& p) {
  return json{{"t", p.t},           {"min_gap", p.min_gap}, {"max_gap", p.max_gap},
              {"max_overlap", p.max_overlap}, {"defect", p.defect}, {"second_moment", p.second_moment}};
}

ep::epn::EPNModel chain_model(int J, const std::vector<double>& direction) {
  ep::epn::EPNModel model;
  model.half_dimension = J;
  model.coupling_direction = direction.empty() ? ep::epn::coalescing_direction(J) : direction;
  model.validate();
  return model;
}

// ---------------------------------------------------------------- epn-sweep

struct SweepArgs {
  int J = 1;
  std::vector<double> direction;
  std::string t_grid = "0:0.999:200";
  double bisection_width = 1e-10;
  double coalescence_tolerance = 1e-4;
};

CommandOutput run_sweep(const SweepArgs& args) {
  auto model = chain_model(args.J, args.direction);
  const auto grid = parse_grid(args.t_grid);
  ep::epn::SweepOptions options;
  options.bisection_rel_width = args.bisection_width;
  options.coalescence_tolerance = args.coalescence_tolerance;
  const auto report = ep::epn::ep_sweep(model, grid, options);

  CommandOutput out;
  json points = json::array();
  CsvTable table{"points", {"t", "min_gap", "max_gap", "max_overlap", "defect", "second_moment"}, {}};
  for (const auto& p : report.points) {
    points.push_back(sweep_point_json(p));
    table.add({fmt(p.t), fmt(p.min_gap), fmt(p.max_gap), fmt(p.max_overlap), fmt(p.defect), fmt(p.second_moment)});
  }
  out.payload = {{"model", {{"half_dimension", model.half_dimension}, {"coupling_direction", model.coupling_direction}}},
                 {"located_ep",
                  {{"t_ep", report.located.t_ep},
                   {"E_ep", to_json(report.located.E_ep)},
                   {"gap_at_ep", report.located.gap_at_ep}}},
                 {"coalescence_threshold", report.coalescence_threshold},
                 {"bisection_steps", report.bisection_steps},
                 {"grid_minimizer", report.grid_minimizer},
                 {"points", points}};
  out.tables.push_back(std::move(table));
  return out;
}

// ---------------------------------------------------------------- epn-canon

struct CanonArgs {
  int J = 1;
  std::vector<double> direction;
  double t = -1.0;
  int disguise = 0;
  double eigenvalue = 0.5;
};

CommandOutput run_canon(const CanonArgs& args, const RunContext& ctx) {
  ComplexMatrix h;
  cplx e_ep;
  json source;
  if (args.disguise > 0) {
    std::mt19937_64 rng(ctx.seed);
    const Index n = args.disguise;
    const ComplexMatrix s =
        ComplexMatrix::Identity(n, n) + 0.3 / std::sqrt(double(n)) * gaussian_matrix(rng, n, true);
    h = s * ep::epn::jordan_block(n, args.eigenvalue) * ep::numerics::solve_linear(s, ComplexMatrix(ComplexMatrix::Identity(n, n)));
    e_ep = args.eigenvalue;
    source = {{"kind", "disguised_jordan_block"}, {"N", n}, {"eigenvalue", args.eigenvalue}};
  } else {
    auto model = chain_model(args.J, args.direction);
    double t = args.t;
    if (t < 0.0) {
      const auto grid = parse_grid("0:0.999:200");
      t = ep::epn::ep_sweep(model, grid).located.t_ep;
    }
    h = ep::epn::chain_hamiltonian(model, t);
    e_ep = h.trace() / double(h.rows());
    source = {{"kind", "chain"}, {"half_dimension", model.half_dimension},
              {"coupling_direction", model.coupling_direction}, {"t", t}};
  }
  const auto tm = ep::epn::transition_matrix(h, e_ep);
  CommandOutput out;
  out.payload = {{"source", source},
                 {"H", to_json(h)},
                 {"R", to_json(tm.R)},
                 {"jordan_eigenvalue", to_json(tm.jordan_eigenvalue)},
                 {"similarity_residual", tm.similarity_residual},
                 {"inverse_condition", tm.inverse_condition},
                 {"chain_residual", tm.chain_residual}};
  CsvTable table{"chain", {"column", "norm"}, {}};
  for (Index k = 0; k < tm.R.cols(); ++k) table.add({fmt((long long)k), fmt(tm.R.col(k).norm())});
  out.tables.push_back(std::move(table));
  return out;
}

// ---------------------------------------------------------------- epn-perturb

struct PerturbArgs {
  int N = 3;
  std::string family = "corner";
  std::vector<double> lambdas{1e-6};
  std::string mode = "direct";
  int order = 8;
  bool fit = false;
};

ComplexMatrix perturbation_direction(const std::string& family, Index n, std::mt19937_64& rng) {
  if (family == "corner") {
    ComplexMatrix v = ComplexMatrix::Zero(n, n);
    v(n - 1, 0) = 1.0;
    return v;
  }
  if (family == "diagonal") {
    ComplexMatrix v = ComplexMatrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) v(i, i) = double(n - 1) / 2.0 - double(i);
    return v;
  }
  if (family == "random") {
    const ComplexMatrix g = gaussian_matrix(rng, n, true);
    return g / ep::numerics::norm2(g);
  }
  throw ep::DomainError("unknown perturbation family '" + family + "' (corner, diagonal, random)");
}

CommandOutput run_perturb(const PerturbArgs& args, const RunContext& ctx) {
  if (args.N < 2) throw ep::DomainError("N must be at least 2");
  std::mt19937_64 rng(ctx.seed);
  const ComplexMatrix v = perturbation_direction(args.family, args.N, rng);
  ep::epn::SecularMode mode;
  if (args.mode == "direct") {
    mode = ep::epn::SecularMode::direct();
  } else if (args.mode == "series") {
    mode = ep::epn::SecularMode::series(args.order);
  } else {
    throw ep::DomainError("mode must be direct or series");
  }

  const auto solutions = ep::parallel_map(args.lambdas.size(), [&](std::size_t i) {
    return ep::epn::solve_secular(v, args.lambdas[i], mode);
  });

  CommandOutput out;
  json runs = json::array();
  CsvTable table{"roots", {"lambda", "index", "re", "im", "reality_flag", "compat_residual"}, {}};
  for (std::size_t i = 0; i < solutions.size(); ++i) {
    const auto& sol = solutions[i];
    json y = json::array();
    for (const auto& vec : sol.y_vectors) y.push_back(to_json(vec));
    std::vector<bool> flags(sol.reality_flags.begin(), sol.reality_flags.end());
    const auto reference = ep::numerics::eigenvalues(ep::epn::jordan_block(args.N, 0.0) + args.lambdas[i] * v);
    runs.push_back({{"lambda", args.lambdas[i]},
                    {"roots", to_json(sol.roots)},
                    {"reality_flags", flags},
                    {"y_vectors", y},
                    {"compat_residuals", sol.compat_residuals},
                    {"search_radius", sol.search_radius},
                    {"eigenvalues", to_json(reference)}});
    for (std::size_t k = 0; k < sol.roots.size(); ++k) {
      table.add({fmt(args.lambdas[i]), fmt((long long)k), fmt(sol.roots[k].real()), fmt(sol.roots[k].imag()),
                 fmt(bool(sol.reality_flags[k])), fmt(sol.compat_residuals[k])});
    }
  }
  out.payload = {{"N", args.N},
                 {"family", args.family},
                 {"V", to_json(v)},
                 {"method", {{"kind", args.mode}, {"order", args.mode == "series" ? args.order : 0}}},
                 {"runs", runs}};
  if (args.fit) {
    const auto fit = ep::epn::exponent_fit(ep::epn::jordan_block(args.N, 0.0), v, args.lambdas);
    out.payload["exponent_fit"] = {{"slope", fit.slope},
                                   {"standard_error", fit.standard_error},
                                   {"lambdas", fit.lambdas},
                                   {"displacements", fit.displacements}};
  }
  out.tables.push_back(std::move(table));
  return out;
}

// ---------------------------------------------------------------- epn-classify

struct ClassifyArgs {
  int N = 3;
  std::string family = "critical";
  std::vector<double> lambdas{1e-2, 1e-4, 1e-6};
  int count = 1;
};

ep::epn::PerturbationFamily make_family(const std::string& kind, Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  ep::epn::PerturbationFamily f;
  if (kind == "critical") return ep::epn::PerturbationFamily::critical(ComplexMatrix::Ones(n, n));
  if (kind == "corner") {
    f.N = n;
    f.mu = ComplexMatrix::Zero(n, n);
    f.mu(n - 1, 0) = 1.0;
    f.exponent = Eigen::MatrixXd::Zero(n, n);
    f.exponent(n - 1, 0) = 1.0;
    return f;
  }
  if (kind == "random-benign" || kind == "random-malign") {
    ComplexMatrix mu(n, n);
    for (Index j = 0; j < n; ++j) {
      for (Index k = 0; k < n; ++k) mu(j, k) = cplx(unit(rng), unit(rng)) / std::sqrt(2.0);
    }
    f = ep::epn::PerturbationFamily::critical(mu);
    f.bound = 1.0;
    std::uniform_int_distribution<int> extra(0, 2);
    for (Index j = 0; j < n; ++j) {
      for (Index k = 0; k <= j; ++k) f.exponent(j, k) += 0.5 * extra(rng);
    }
    if (kind == "random-malign") {
      std::uniform_int_distribution<Index> row(1, n - 1);
      const Index j = row(rng);
      std::uniform_int_distribution<Index> col(0, j - 1);
      const Index k = col(rng);
      f.exponent(j, k) = 0.5 * double(j - k + 1) - 1.0;
      if (std::abs(f.mu(j, k)) < 0.1) f.mu(j, k) = 0.5;
    }
    return f;
  }
  throw ep::DomainError("unknown family '" + kind + "' (critical, corner, random-benign, random-malign)");
}

CommandOutput run_classify(const ClassifyArgs& args, const RunContext& ctx) {
  if (args.N < 2) throw ep::DomainError("N must be at least 2");
  if (args.count < 1) throw ep::DomainError("count must be positive");
  std::mt19937_64 rng(ctx.seed);
  CommandOutput out;
  json families = json::array();
  CsvTable table{"rescaled", {"family_index", "lambda", "benign", "max_abs", "reconstruction_error"}, {}};
  for (int i = 0; i < args.count; ++i) {
    const auto f = make_family(args.family, args.N, rng);
    const auto c = ep::epn::classify_perturbation(f);
    json witness = nullptr;
    if (c.witness) witness = {c.witness->first, c.witness->second};
    json scans = json::array();
    for (double lambda : args.lambdas) {
      const auto r = ep::epn::rescale_reduced(f, lambda);
      scans.push_back({{"lambda", lambda}, {"max_abs", r.max_abs}, {"reconstruction_error", r.reconstruction_error}});
      table.add({fmt((long long)i), fmt(lambda), fmt(c.benign), fmt(r.max_abs), fmt(r.reconstruction_error)});
    }
    std::vector<std::vector<double>> exponents(args.N, std::vector<double>(args.N));
    for (int j = 0; j < args.N; ++j) {
      for (int k = 0; k < args.N; ++k) exponents[j][k] = f.exponent(j, k);
    }
    families.push_back({{"mu", to_json(f.mu)},
                        {"exponent", exponents},
                        {"benign", c.benign},
                        {"witness", witness},
                        {"rescaled", scans}});
  }
  out.payload = {{"N", args.N}, {"family", args.family}, {"families", families}};
  out.tables.push_back(std::move(table));
  return out;
}

// ---------------------------------------------------------------- ic-spectrum

struct SpectrumArgs {
  int delta = 1;
  std::vector<Index> basis_sizes{64, 128};
  double omega = 0.0;
  int n_max = -1;
  int K = -1;
  bool with_theta = false;
};

CommandOutput run_spectrum(const SpectrumArgs& args) {
  if (args.basis_sizes.size() < 2) throw ep::DomainError("ic-spectrum needs at least two basis sizes");
  const auto table = ep::ic::convergence_study(args.delta, args.basis_sizes, args.omega);
  const std::size_t top = args.basis_sizes.size() - 1;
  const ep::ic::OscillatorSpec coarse{args.delta, args.basis_sizes[top - 1], args.omega};
  const ep::ic::OscillatorSpec fine{args.delta, args.basis_sizes[top], args.omega};
  const auto h = ep::ic::build_bb_matrix(coarse);
  const auto spectra = ep::parallel_map(2, [&](std::size_t i) {
    return ep::ic::solve_spectrum(i == 0 ? h : ep::ic::build_bb_matrix(fine));
  });

  json pt = json::array();
  for (Index m : args.basis_sizes) {
    pt.push_back({{"M", m}, {"pt_residual", ep::ic::pt_residual(ep::ic::build_bb_matrix({args.delta, m, args.omega}))}});
  }

  json levels = json::array();
  CsvTable csv{"levels", {"level"}, {}};
  for (Index m : args.basis_sizes) {
    csv.header.push_back("re_M" + std::to_string(m));
    csv.header.push_back("im_M" + std::to_string(m));
  }
  csv.header.push_back("converged");
  for (std::size_t n = 0; n < table.levels.size(); ++n) {
    if (!table.converged[n]) continue;
    const cplx e = table.levels[n][top];
    levels.push_back({{"by_M", to_json(table.levels[n])},
                      {"reality_flag", std::abs(e.imag()) <= 1e-6}});
    std::vector<std::string> row{fmt((long long)n)};
    for (const cplx& z : table.levels[n]) {
      row.push_back(fmt(z.real()));
      row.push_back(fmt(z.imag()));
    }
    row.push_back(fmt(true));
    csv.add(std::move(row));
  }

  const auto conv = ep::ic::converged_levels(spectra[0], spectra[1]);
  const Index n_max = args.n_max >= 0 ? args.n_max : static_cast<Index>(conv.size()) - 1;
  const auto par = ep::ic::parallelization_diagnostics(spectra[0], n_max, spectra[1]);
  CsvTable pcsv{"parallelization", {"n", "E_re", "E_im", "overlap_right", "overlap_left", "kappa"}, {}};
  for (std::size_t n = 0; n < par.kappa.size(); ++n) {
    const bool inner = n < par.overlaps_right.size();
    pcsv.add({fmt((long long)n), fmt(par.energies[n].real()), fmt(par.energies[n].imag()),
              inner ? fmt(par.overlaps_right[n]) : "", inner ? fmt(par.overlaps_left[n]) : "", fmt(par.kappa[n])});
  }

  const Index k_metric = args.K > 0 ? args.K : std::min<Index>(8, static_cast<Index>(conv.size()));
  const auto window = ep::numerics::select_levels(spectra[0], conv);
  const auto metric = ep::ic::metric_operator(ep::ic::build_bb_action(coarse), window, k_metric);

  CommandOutput out;
  json metric_json = {{"K", k_metric},
                      {"quasi_hermiticity_residual", metric.quasi_hermiticity_residual},
                      {"min_eigenvalue", metric.min_eigenvalue},
                      {"span_min_eigenvalue", metric.span_min_eigenvalue},
                      {"hermiticity_error", metric.hermiticity_error}};
  if (args.with_theta) metric_json["Theta"] = to_json(metric.Theta);
  out.payload = {{"spec", {{"delta", args.delta}, {"basis_sizes", args.basis_sizes},
                           {"basis_frequency", coarse.frequency()}}},
                 {"pt_residuals", pt},
                 {"convergence", {{"converged_count", table.converged_count},
                                  {"max_converged_imag", table.max_converged_imag},
                                  {"levels", levels}}},
                 {"parallelization", {{"energies", to_json(par.energies)},
                                      {"overlaps_right", par.overlaps_right},
                                      {"overlaps_left", par.overlaps_left},
                                      {"kappa", par.kappa},
                                      {"converged_count", par.converged_count}}},
                 {"metric", metric_json}};
  out.tables.push_back(std::move(csv));
  out.tables.push_back(std::move(pcsv));
  return out;
}

// ---------------------------------------------------------------- iep-basis

struct BasisArgs {
  int delta = 1;
  Index M = 128;
  double omega = 0.0;
  int K = -1;
  int p_max = -1;
};

CommandOutput run_basis(const BasisArgs& args) {
  const ep::ic::OscillatorSpec spec{args.delta, args.M, args.omega};
  const ep::ic::OscillatorSpec refined{args.delta, 2 * args.M, args.omega};
  const auto h = ep::ic::build_bb_matrix(spec);
  const auto spectra = ep::parallel_map(2, [&](std::size_t i) {
    return ep::ic::solve_spectrum(i == 0 ? h : ep::ic::build_bb_matrix(refined));
  });
  const auto conv = ep::ic::converged_levels(spectra[0], spectra[1]);
  const auto count = static_cast<Index>(conv.size());
  const Index K = args.K >= 0 ? args.K : std::max<Index>(2, count / 4);
  const Index p_max = args.p_max >= 0 ? args.p_max : count - K - 1;
  if (p_max < 0 || K + p_max + 1 > count) {
    throw ep::DomainError("window K + p_max + 1 = " + std::to_string(K + p_max + 1) + " exceeds the " +
                          std::to_string(count) + " converged levels");
  }
  const auto window = ep::numerics::select_levels(spectra[0], conv);
  const auto cb = ep::iep::assemble_chain_basis(h, window, K, p_max);
  const auto diag = ep::iep::basis_diagnostics(cb, window);

  CommandOutput out;
  out.payload = {{"spec", {{"delta", args.delta}, {"M", args.M}, {"basis_frequency", spec.frequency()}}},
                 {"converged_count", count},
                 {"K", K},
                 {"p_max", p_max},
                 {"energies", to_json(cb.energies)},
                 {"coefficients", to_json(cb.coefficients)},
                 {"J_iep", to_json(cb.J_iep)},
                 {"recurrence_residuals", cb.recurrence_residuals},
                 {"boundary_residual", cb.boundary_residual},
                 {"similarity_residual", cb.similarity_residual},
                 {"sigma_min_chain", diag.sigma_min_chain},
                 {"sigma_min_eig", diag.sigma_min_eig},
                 {"overlaps_chain", diag.overlaps_chain},
                 {"overlaps_eig", diag.overlaps_eig}};
  CsvTable table{"overlaps", {"column", "overlap_chain", "overlap_eig"}, {}};
  for (std::size_t i = 0; i < diag.overlaps_chain.size(); ++i) {
    table.add({fmt((long long)i), fmt(diag.overlaps_chain[i]), fmt(diag.overlaps_eig[i])});
  }
  out.tables.push_back(std::move(table));
  return out;
}

// ---------------------------------------------------------------- iep-perturb

struct IepPerturbArgs {
  std::string source = "ic";
  Index M = 128;
  double omega = 0.0;
  int n_trunc = 24;
  std::vector<int> n_trunc_sweep{16, 24, 32};
  std::string perturbation = "dense";
  std::vector<double> lambdas{1e-4, 1e-6, 1e-8};
};

CommandOutput run_iep_perturb(const IepPerturbArgs& args, const RunContext& ctx) {
  int n_top = args.n_trunc;
  for (int n : args.n_trunc_sweep) n_top = std::max(n_top, n);
  std::vector<cplx> energies;
  if (args.source == "ic") {
    const auto sd = ep::ic::solve_spectrum(ep::ic::build_bb_matrix({1, args.M, args.omega}));
    energies = ep::ic::real_levels(sd, static_cast<std::size_t>(n_top));
  } else if (args.source == "equidistant") {
    for (int j = 0; j < n_top; ++j) energies.emplace_back(double(j), 0.0);
  } else {
    throw ep::DomainError("source must be ic or equidistant");
  }

  std::mt19937_64 rng(ctx.seed);
  ComplexMatrix v;
  if (args.perturbation == "dense") {
    v = gaussian_matrix(rng, n_top, false) / std::sqrt(double(n_top));
  } else if (args.perturbation == "diagonal") {
    v = ComplexMatrix::Zero(n_top, n_top);
    std::normal_distribution<double> nd;
    for (int i = 0; i < n_top; ++i) v(i, i) = nd(rng);
  } else {
    throw ep::DomainError("perturbation must be dense or diagonal");
  }

  auto result_json = [](const ep::iep::FirstOrderResult& r) {
    return json{{"E0", to_json(r.E0)},
                {"E1", to_json(r.E1)},
                {"psi1", to_json(r.psi1)},
                {"residual", r.residual},
                {"consistency_error", r.consistency_error},
                {"boundary_value", to_json(r.boundary_value)},
                {"closure", ep::iep::to_string(r.closure)}};
  };

  const auto main = ep::iep::closure_boundary_zero(energies, v, 1.0, args.n_trunc);
  json sweep = json::array();
  for (int n : args.n_trunc_sweep) {
    const auto r = ep::iep::closure_boundary_zero(energies, v, 1.0, n);
    sweep.push_back({{"N_trunc", n}, {"E1", to_json(r.E1)}, {"residual", r.residual}});
  }

  const ComplexMatrix j = ep::iep::canonical_k0(energies, args.n_trunc);
  const ComplexMatrix vt = v.topLeftCorner(args.n_trunc, args.n_trunc);
  CsvTable table{"lambda_scan", {"lambda", "displacement_re", "displacement_im", "remainder_over_lambda"}, {}};
  json scan = json::array();
  for (double lambda : args.lambdas) {
    const cplx d = ep::iep::level_displacement(j, vt, lambda);
    const double rem = std::abs(d - lambda * main.E1) / lambda;
    scan.push_back({{"lambda", lambda}, {"displacement", to_json(d)}, {"remainder_over_lambda", rem}});
    table.add({fmt(lambda), fmt(d.real()), fmt(d.imag()), fmt(rem)});
  }

  // Richardson slope from lambda = 1e-6 and 2e-6; reported, not enforced.
  const cplx fd_slope = 2.0 * ep::iep::level_displacement(j, vt, 1e-6) / 1e-6 -
                        ep::iep::level_displacement(j, vt, 2e-6) / 2e-6;
  const double fd_gap = std::abs(fd_slope - main.E1) / std::max(std::abs(fd_slope), 1e-300);

  CommandOutput out;
  out.payload = {{"source", args.source},
                 {"perturbation", args.perturbation},
                 {"N_trunc", args.n_trunc},
                 {"energies", to_json(std::span<const cplx>(energies).first(args.n_trunc))},
                 {"result", result_json(main)},
                 {"N_trunc_sweep", sweep},
                 {"lambda_scan", scan},
                 {"finite_difference", {{"slope", to_json(fd_slope)}, {"relative_gap", fd_gap}}}};
  out.tables.push_back(std::move(table));
  return out;
}

template <typename Args>
std::shared_ptr<Args> make_args() {
  return std::make_shared<Args>();
}

}  // namespace

std::vector<Command> register_commands(CLI::App& app) {
  std::vector<Command> cmds;

  {
    auto a = make_args<SweepArgs>();
    auto* sub = app.add_subcommand("epn-sweep", "Locate the EP of a 2J-level chain model along a coupling ray");
    sub->add_option("--J", a->J, "Half dimension J (matrix size 2J)")->check(CLI::Range(1, 64));
    sub->add_option("--direction", a->direction, "Coupling direction, outermost first (default: coalescing ray)");
    sub->add_option("--t-grid", a->t_grid, "Scan grid a:b:n");
    sub->add_option("--bisection-width", a->bisection_width, "Relative bisection width");
    sub->add_option("--coalescence-tol", a->coalescence_tolerance, "Relative eigenvalue-gap tolerance");
    cmds.push_back({"epn-sweep", sub, [a](const RunContext&) { return run_sweep(*a); }});
  }
  {
    auto a = make_args<CanonArgs>();
    auto* sub = app.add_subcommand("epn-canon", "Jordan chain (transition matrix) at an EP");
    sub->add_option("--J", a->J, "Half dimension of the chain model")->check(CLI::Range(1, 64));
    sub->add_option("--direction", a->direction, "Coupling direction");
    sub->add_option("--t", a->t, "Coupling parameter (default: located by a sweep)");
    sub->add_option("--disguise", a->disguise, "Use a random similarity of an N x N Jordan block instead")
        ->check(CLI::Range(0, 64));
    sub->add_option("--eigenvalue", a->eigenvalue, "Eigenvalue of the disguised Jordan block");
    cmds.push_back({"epn-canon", sub, [a](const RunContext& c) { return run_canon(*a, c); }});
  }
  {
    auto a = make_args<PerturbArgs>();
    auto* sub = app.add_subcommand("epn-perturb", "Secular roots of a perturbed N x N Jordan block");
    sub->add_option("--N", a->N, "Jordan block size")->check(CLI::Range(2, 64));
    sub->add_option("--family", a->family, "corner, diagonal or random");
    sub->add_option("--lambda", a->lambdas, "Perturbation strengths")->delimiter(',');
    sub->add_option("--mode", a->mode, "direct or series");
    sub->add_option("--order", a->order, "Series order")->check(CLI::NonNegativeNumber);
    sub->add_flag("--fit", a->fit, "Fit the splitting exponent over the lambda values");
    cmds.push_back({"epn-perturb", sub, [a](const RunContext& c) { return run_perturb(*a, c); }});
  }
  {
    auto a = make_args<ClassifyArgs>();
    auto* sub = app.add_subcommand("epn-classify", "Benign/malign classification and rescaling of perturbation families");
    sub->add_option("--N", a->N, "Jordan block size")->check(CLI::Range(2, 64));
    sub->add_option("--family", a->family, "critical, corner, random-benign or random-malign");
    sub->add_option("--lambda", a->lambdas, "Rescaling strengths")->delimiter(',');
    sub->add_option("--count", a->count, "Number of random families");
    cmds.push_back({"epn-classify", sub, [a](const RunContext& c) { return run_classify(*a, c); }});
  }
  {
    auto a = make_args<SpectrumArgs>();
    auto* sub = app.add_subcommand("ic-spectrum", "Oscillator-basis spectrum, convergence and non-normality diagnostics");
    sub->add_option("--delta", a->delta, "0 (harmonic) or 1 (imaginary cubic)")->check(CLI::IsMember({0, 1}));
    sub->add_option("--M", a->basis_sizes, "Ascending basis sizes")->delimiter(',');
    sub->add_option("--omega", a->omega, "Basis frequency (0: default for delta)");
    sub->add_option("--n-max", a->n_max, "Last level of the parallelization report");
    sub->add_option("--K", a->K, "Levels in the metric operator");
    sub->add_flag("--with-theta", a->with_theta, "Include the metric matrix in the report");
    cmds.push_back({"ic-spectrum", sub, [a](const RunContext&) { return run_spectrum(*a); }});
  }
  {
    auto a = make_args<BasisArgs>();
    auto* sub = app.add_subcommand("iep-basis", "Chain basis over the converged oscillator levels");
    sub->add_option("--delta", a->delta, "0 or 1")->check(CLI::IsMember({0, 1}));
    sub->add_option("--M", a->M, "Basis size")->check(CLI::Range(4, 256));
    sub->add_option("--omega", a->omega, "Basis frequency (0: default for delta)");
    sub->add_option("--K", a->K, "Number of leading eigenvectors kept");
    sub->add_option("--p-max", a->p_max, "Number of chain columns after the first");
    cmds.push_back({"iep-basis", sub, [a](const RunContext&) { return run_basis(*a); }});
  }
  {
    auto a = make_args<IepPerturbArgs>();
    auto* sub = app.add_subcommand("iep-perturb", "First-order perturbation on the K = 0 canonical form");
    sub->add_option("--source", a->source, "ic or equidistant energies");
    sub->add_option("--M", a->M, "Basis size for ic energies")->check(CLI::Range(4, 512));
    sub->add_option("--omega", a->omega, "Basis frequency (0: default)");
    sub->add_option("--n-trunc", a->n_trunc, "Truncation size")->check(CLI::Range(2, 256));
    sub->add_option("--n-trunc-sweep", a->n_trunc_sweep, "Truncation sizes for the E1 report")->delimiter(',');
    sub->add_option("--perturbation", a->perturbation, "dense or diagonal");
    sub->add_option("--lambda", a->lambdas, "Strengths for the direct cross-check")->delimiter(',');
    cmds.push_back({"iep-perturb", sub, [a](const RunContext& c) { return run_iep_perturb(*a, c); }});
  }
  return cmds;
}

}  // namespace ep_cli
