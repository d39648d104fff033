#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "epspectra/errors.hpp"
#include "epspectra/iep_perturbation.hpp"

using namespace epspectra;
using namespace epspectra::iep;

namespace {

std::vector<cplx> spectrum(int n) {
  std::vector<cplx> e;
  for (int j = 0; j < n; ++j) e.emplace_back(1.0 + 2.3 * j + 0.05 * j * j, 0.0);
  return e;
}

ComplexMatrix dense(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  ComplexMatrix v(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) v(i, j) = nd(rng) / std::sqrt(double(n));
  return v;
}

}  // namespace

TEST(FirstOrder, DiagonalPerturbationDecouples) {
  const auto e = spectrum(10);
  ComplexMatrix v = ComplexMatrix::Zero(10, 10);
  v.diagonal().setLinSpaced(10, 0.3, 1.2);
  const auto r = closure_boundary_zero(e, v, 1.0, 10);
  EXPECT_NEAR(std::abs(r.E1 - v(0, 0)), 0.0, 1e-14);
  EXPECT_EQ(r.psi1.size(), 11);
  for (int j = 0; j <= 10; ++j) EXPECT_NEAR(std::abs(r.psi1(j)), 0.0, 1e-14);
}

TEST(FirstOrder, ZeroPerturbation) {
  const auto e = spectrum(8);
  const ComplexMatrix v = ComplexMatrix::Zero(8, 8);
  const auto fwd = first_order_forward(e, v, 1.0, 0.7, 8);
  // psi1_{j+1} = (E0 - E_j) psi1_j with psi1_1 = E1.
  cplx expected = 0.7;
  EXPECT_NEAR(std::abs(fwd.psi1(1) - expected), 0.0, 1e-15);
  for (int j = 1; j < 8; ++j) {
    expected *= e[0] - e[j];
    EXPECT_NEAR(std::abs(fwd.psi1(j + 1) - expected), 0.0, 1e-12 * std::abs(expected));
  }
  EXPECT_EQ(closure_boundary_zero(e, v, 1.0, 8).E1, cplx(0.0));
}

TEST(FirstOrder, BoundaryIsAffineInE1) {
  const auto e = spectrum(12);
  const auto v = dense(12, 3);
  const auto a = first_order_forward(e, v, 1.0, 0.0, 12).boundary_value;
  const auto b = first_order_forward(e, v, 1.0, 1.0, 12).boundary_value;
  const auto c = first_order_forward(e, v, 1.0, cplx(-2.5, 0.5), 12).boundary_value;
  const cplx predicted = a + cplx(-2.5, 0.5) * (b - a);
  EXPECT_LE(std::abs(c - predicted), 1e-10 * (std::abs(a) + std::abs(b)));
  const auto closed = closure_boundary_zero(e, v, 1.0, 12);
  EXPECT_LE(std::abs(closed.boundary_value), 1e-10 * (std::abs(a) + std::abs(b)));
  EXPECT_EQ(closed.closure, Closure::boundary_zero);
}

TEST(FirstOrder, ConsistencyAndResidual) {
  const auto e = spectrum(24);
  const auto v = dense(24, 4);
  for (int n : {8, 16, 24}) {
    const auto r = closure_boundary_zero(e, v, cplx(0.8, 0.1), n);
    EXPECT_LE(r.consistency_error, 1e-12);
    EXPECT_LE(r.residual, 1e-12);
  }
}

TEST(FirstOrder, DegenerateClosure) {
  const auto e = spectrum(3);
  EXPECT_THROW(closure_boundary_zero(e, dense(3, 5), 1e-20, 3), DegenerateClosure);
  std::vector<cplx> repeated{1.0, 1.0, 3.0};
  EXPECT_THROW(closure_boundary_zero(repeated, dense(3, 5), 1.0, 3), DomainError);
}

TEST(FirstOrder, ClosureMatchesEigenvalueDerivative) {
  const int n = 16;
  const auto e = spectrum(n);
  const auto v = dense(n, 6);
  const auto j = canonical_k0(e, n);
  const auto r = closure_boundary_zero(e, v, 1.0, n);
  const double h = 1e-7;
  const cplx slope = level_displacement(j, v, h) / h;
  EXPECT_LE(std::abs(slope - r.E1), 0.1 * std::abs(r.E1));
}

TEST(DirectReference, UnperturbedPairing) {
  const auto e = spectrum(6);
  const auto j = canonical_k0(e, 6);
  const auto ref = direct_reference(j, dense(6, 7), 0.0);
  for (int k = 0; k < 6; ++k) EXPECT_NEAR(std::abs(ref.paired[k] - e[k]), 0.0, 1e-12);
}

TEST(LevelDisplacement, DiagonalIsExact) {
  const auto e = spectrum(10);
  const auto j = canonical_k0(e, 10);
  ComplexMatrix v = ComplexMatrix::Zero(10, 10);
  v.diagonal().setLinSpaced(10, -0.4, 0.9);
  for (double lambda : {1e-2, 1e-4, 1e-6, 1e-8}) {
    const cplx d = level_displacement(j, v, lambda);
    EXPECT_LE(std::abs(d - lambda * v(0, 0)), 1e-12 * lambda);
  }
}

TEST(LevelDisplacement, RemainderIsSuperlinear) {
  const int n = 20;
  const auto e = spectrum(n);
  const auto v = dense(n, 8);
  const auto j = canonical_k0(e, n);
  const auto r = closure_boundary_zero(e, v, 1.0, n);
  double previous = 1e300;
  for (double lambda : {1e-4, 1e-6, 1e-8}) {
    const double rem = std::abs(level_displacement(j, v, lambda) - lambda * r.E1) / lambda;
    EXPECT_LT(rem, previous);
    previous = rem;
  }
}
