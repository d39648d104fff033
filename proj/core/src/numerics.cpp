#include "epspectra/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <tuple>

#include "epspectra/errors.hpp"

namespace epspectra::numerics {

namespace {

constexpr double kPivotTolerance = 1e-13;

struct RawEigen {
  Eigen::VectorXcd values;
  ComplexMatrix vectors;
};

RawEigen raw_eigen(const ComplexMatrix& m, bool real_path) {
  if (real_path) {
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m.real(), true);
    if (solver.info() != Eigen::Success) {
      throw NoConvergence("real Hessenberg-QR iteration exceeded its budget");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
  }
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(m, true);
  if (solver.info() != Eigen::Success) {
    throw NoConvergence("complex Schur iteration exceeded its budget");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

// Greedy minimum-distance assignment of `targets` to `candidates`.
std::vector<Index> match_by_proximity(const std::vector<cplx>& targets,
                                      const std::vector<cplx>& candidates) {
  const auto n = static_cast<Index>(targets.size());
  std::vector<std::tuple<double, Index, Index>> pairs;
  pairs.reserve(static_cast<std::size_t>(n * n));
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      pairs.emplace_back(std::abs(targets[i] - candidates[j]), i, j);
    }
  }
  std::sort(pairs.begin(), pairs.end());
  std::vector<Index> assignment(n, -1);
  std::vector<bool> used(n, false);
  Index assigned = 0;
  for (const auto& [d, i, j] : pairs) {
    if (assignment[i] >= 0 || used[j]) continue;
    assignment[i] = j;
    used[j] = true;
    if (++assigned == n) break;
  }
  return assignment;
}

struct UnionFind {
  std::vector<Index> parent;
  explicit UnionFind(Index n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  Index find(Index i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  }
  void unite(Index a, Index b) { parent[find(a)] = find(b); }
};

}  // namespace

double norm(const ComplexMatrix& m) { return m.norm(); }

double norm2(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  return singular_values(m).front();
}

bool all_finite(const ComplexMatrix& m) { return m.allFinite(); }

void require_finite(const ComplexMatrix& m, const char* what) {
  if (!m.allFinite()) throw DomainError(std::string(what) + " has non-finite entries");
}

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw DomainError(std::string(what) + " must be a non-empty square matrix");
  }
}

ComplexMatrix solve_linear(const ComplexMatrix& m, const ComplexMatrix& b) {
  require_square(m, "solve_linear matrix");
  require_finite(m, "solve_linear matrix");
  require_finite(b, "solve_linear right-hand side");
  if (b.rows() != m.rows()) throw DomainError("solve_linear: right-hand side length mismatch");

  Eigen::PartialPivLU<ComplexMatrix> lu(m);
  const double floor = kPivotTolerance * norm(m);
  const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
  if (pivots.minCoeff() < floor || norm(m) == 0.0) {
    throw SingularMatrix("pivot magnitude " + std::to_string(pivots.minCoeff()) +
                         " below " + std::to_string(floor));
  }
  return lu.solve(b);
}

ComplexVector solve_linear(const ComplexMatrix& m, const ComplexVector& b) {
  return solve_linear(m, ComplexMatrix(b)).col(0);
}

std::vector<double> singular_values(const ComplexMatrix& m) {
  require_finite(m, "singular_values input");
  if (m.size() == 0) return {};
  Eigen::BDCSVD<ComplexMatrix> svd(m);
  const auto& s = svd.singularValues();
  return {s.data(), s.data() + s.size()};
}

double min_singular_value(const ComplexMatrix& m) {
  const auto s = singular_values(m);
  if (s.empty()) throw DomainError("min_singular_value of an empty matrix");
  return s.back();
}

bool eigenvalue_less(cplx a, cplx b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

double normalized_overlap(const ComplexVector& u, const ComplexVector& v) {
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return std::min(1.0, std::abs(u.dot(v)) / (nu * nv));
}

ComplexMatrix normalize_columns(ComplexMatrix m) {
  for (Index j = 0; j < m.cols(); ++j) {
    const double n = m.col(j).norm();
    if (n > 0.0) m.col(j) /= n;
  }
  return m;
}

double biorthogonality_residual(const ComplexMatrix& left, const ComplexMatrix& right) {
  if (left.cols() == 0) return 0.0;
  ComplexMatrix gram = left.adjoint() * right;
  gram -= ComplexMatrix::Identity(gram.rows(), gram.cols());
  return gram.cwiseAbs().maxCoeff();
}

SpectralData eig_biorthogonal(const ComplexMatrix& m, const EigOptions& options) {
  require_square(m, "eig_biorthogonal input");
  require_finite(m, "eig_biorthogonal input");
  const Index n = m.rows();
  if (n > options.max_dimension) {
    throw DomainError("eig_biorthogonal: dimension " + std::to_string(n) +
                      " exceeds configured maximum " + std::to_string(options.max_dimension));
  }

  const bool real_path = m.imag().cwiseAbs().maxCoeff() == 0.0;
  const RawEigen right = raw_eigen(m, real_path);
  const RawEigen left = raw_eigen(m.adjoint(), real_path);

  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    return eigenvalue_less(right.values[a], right.values[b]);
  });

  SpectralData sd;
  sd.eigenvalues.resize(n);
  sd.right_vectors.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    sd.eigenvalues[k] = right.values[order[k]];
    sd.right_vectors.col(k) = right.vectors.col(order[k]).normalized();
  }

  std::vector<cplx> left_values(n);
  for (Index j = 0; j < n; ++j) left_values[j] = std::conj(left.values[j]);
  const auto assignment = match_by_proximity(sd.eigenvalues, left_values);
  sd.left_vectors.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    sd.left_vectors.col(k) = left.vectors.col(assignment[k]).normalized();
  }

  // Clusters of numerically coincident levels.
  const double scale = norm(m);
  const double gap_tol = options.cluster_tolerance * scale;
  UnionFind clusters(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const bool close = std::abs(sd.eigenvalues[i] - sd.eigenvalues[j]) < gap_tol;
      const bool parallel =
          normalized_overlap(sd.right_vectors.col(i), sd.right_vectors.col(j)) >
          1.0 - options.parallel_tolerance;
      if (close || parallel) clusters.unite(i, j);
    }
  }
  std::vector<std::vector<Index>> groups(n);
  for (Index i = 0; i < n; ++i) groups[clusters.find(i)].push_back(i);

  sd.defective_levels.assign(n, false);
  for (const auto& group : groups) {
    if (group.empty()) continue;
    if (group.size() == 1) {
      const Index k = group.front();
      const cplx g = sd.left_vectors.col(k).dot(sd.right_vectors.col(k));
      if (std::abs(g) > 0.0) sd.left_vectors.col(k) /= std::conj(g);
      continue;
    }
    cplx centre = 0.0;
    for (Index k : group) centre += sd.eigenvalues[k];
    centre /= static_cast<double>(group.size());
    double spread = 0.0;
    for (Index k : group) spread = std::max(spread, std::abs(sd.eigenvalues[k] - centre));

    ComplexMatrix shifted = m - centre * ComplexMatrix::Identity(n, n);
    const auto s = singular_values(shifted);
    const double rank_tol = gap_tol + 10.0 * spread;
    const auto geometric = static_cast<std::size_t>(
        std::count_if(s.begin(), s.end(), [&](double v) { return v <= rank_tol; }));
    if (geometric < group.size()) {
      for (Index k : group) sd.defective_levels[k] = true;
      sd.defect_flag = true;
      continue;
    }
    // Non-defective but degenerate: biorthogonalize the left block against the right block.
    ComplexMatrix r_block(n, static_cast<Index>(group.size()));
    ComplexMatrix l_block(n, static_cast<Index>(group.size()));
    for (std::size_t c = 0; c < group.size(); ++c) {
      r_block.col(static_cast<Index>(c)) = sd.right_vectors.col(group[c]);
      l_block.col(static_cast<Index>(c)) = sd.left_vectors.col(group[c]);
    }
    const ComplexMatrix gram = l_block.adjoint() * r_block;
    Eigen::FullPivLU<ComplexMatrix> lu(gram);
    if (!lu.isInvertible()) continue;
    l_block = l_block * lu.inverse().adjoint();
    for (std::size_t c = 0; c < group.size(); ++c) {
      sd.left_vectors.col(group[c]) = l_block.col(static_cast<Index>(c));
    }
  }

  sd.biorthogonality_residual = biorthogonality_residual(sd.left_vectors, sd.right_vectors);
  return sd;
}

std::vector<cplx> eigenvalues(const ComplexMatrix& m) {
  require_square(m, "eigenvalues input");
  require_finite(m, "eigenvalues input");
  Eigen::VectorXcd values;
  if (m.imag().cwiseAbs().maxCoeff() == 0.0) {
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m.real(), false);
    if (solver.info() != Eigen::Success) throw NoConvergence("real QR iteration failed");
    values = solver.eigenvalues();
  } else {
    Eigen::ComplexEigenSolver<ComplexMatrix> solver(m, false);
    if (solver.info() != Eigen::Success) throw NoConvergence("complex Schur iteration failed");
    values = solver.eigenvalues();
  }
  std::vector<cplx> out(values.data(), values.data() + values.size());
  std::sort(out.begin(), out.end(), eigenvalue_less);
  return out;
}

SpectralData select_levels(const SpectralData& sd, std::span<const Index> levels) {
  SpectralData out;
  const auto k = static_cast<Index>(levels.size());
  out.eigenvalues.reserve(levels.size());
  out.right_vectors.resize(sd.right_vectors.rows(), k);
  out.left_vectors.resize(sd.left_vectors.rows(), k);
  out.defective_levels.reserve(levels.size());
  for (Index c = 0; c < k; ++c) {
    const Index src = levels[static_cast<std::size_t>(c)];
    if (src < 0 || src >= sd.size()) throw DomainError("select_levels: level index out of range");
    out.eigenvalues.push_back(sd.eigenvalues[src]);
    out.right_vectors.col(c) = sd.right_vectors.col(src);
    out.left_vectors.col(c) = sd.left_vectors.col(src);
    const bool defective = !sd.defective_levels.empty() && sd.defective_levels[src];
    out.defective_levels.push_back(defective);
    out.defect_flag = out.defect_flag || defective;
  }
  out.biorthogonality_residual = biorthogonality_residual(out.left_vectors, out.right_vectors);
  return out;
}

ComplexMatrix reconstruct(const SpectralData& sd) {
  const Index n = sd.right_vectors.rows();
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  for (Index k = 0; k < sd.size(); ++k) {
    out += sd.eigenvalues[k] * sd.right_vectors.col(k) * sd.left_vectors.col(k).adjoint();
  }
  return out;
}

}  // namespace epspectra::numerics
