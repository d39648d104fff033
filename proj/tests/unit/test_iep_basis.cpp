#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "epspectra/errors.hpp"
#include "epspectra/ic_spectral.hpp"
#include "epspectra/iep_basis.hpp"

using namespace epspectra;
using namespace epspectra::iep;

namespace {

std::vector<cplx> equidistant(int n, double step = 1.0) {
  std::vector<cplx> e;
  for (int j = 0; j < n; ++j) e.emplace_back(step * j, 0.0);
  return e;
}

struct IcWindow {
  ComplexMatrix h;
  SpectralData window;
  SpectralData full;
};

const IcWindow& ic_window() {
  static const IcWindow w = [] {
    IcWindow out;
    out.h = ic::build_bb_matrix({1, 128});
    out.full = ic::solve_spectrum(out.h);
    const auto ref = ic::solve_spectrum(ic::build_bb_matrix({1, 256}));
    out.window = numerics::select_levels(out.full, ic::converged_levels(out.full, ref));
    return out;
  }();
  return w;
}

}  // namespace

TEST(ChainCoefficients, HandRecursion) {
  const std::vector<cplx> two{0.0, 2.0};
  const auto c2 = chain_coefficients(two, 0, 1);
  EXPECT_EQ(c2(1, 0), cplx(-0.5));
  EXPECT_EQ(c2(0, 1), cplx(0.0));

  const auto c = chain_coefficients(equidistant(3), 0, 2);
  EXPECT_EQ(c(0, 0), cplx(1.0));
  EXPECT_EQ(c(1, 0), cplx(-1.0));
  EXPECT_EQ(c(2, 0), cplx(0.5));
  EXPECT_EQ(c(2, 1), cplx(-1.0));
  EXPECT_EQ(c(2, 2), cplx(1.0));
}

TEST(ChainCoefficients, OffsetWindowAndDiagonals) {
  const auto e = equidistant(6);
  const std::vector<cplx> d{2.0, 3.0};
  const auto c = chain_coefficients(e, 4, 1, d);
  EXPECT_EQ(c(0, 0), cplx(2.0));
  EXPECT_EQ(c(1, 1), cplx(3.0));
  EXPECT_EQ(c(1, 0), cplx(-2.0));
}

TEST(ChainCoefficients, ZeroDepth) {
  const auto c = chain_coefficients(equidistant(3), 1, 0);
  ASSERT_EQ(c.rows(), 1);
  EXPECT_EQ(c(0, 0), cplx(1.0));
}

TEST(ChainCoefficients, DegenerateSpectrum) {
  const std::vector<cplx> e{0.0, 1.0, 1.0 + 1e-12};
  EXPECT_THROW(chain_coefficients(e, 0, 2), DegenerateSpectrum);
  EXPECT_THROW(chain_coefficients(equidistant(3), 1, 3), DomainError);
}

TEST(ChainCoefficients, ScaleCovariance) {
  std::vector<cplx> e{0.3, 1.7, cplx(2.2, 0.1), 4.0, 5.5, 7.25};
  const auto c = chain_coefficients(e, 0, 5);
  for (double s : {0.5, 3.0, -2.0}) {
    std::vector<cplx> es;
    for (const auto& x : e) es.push_back(s * x);
    const auto cs = chain_coefficients(es, 0, 5);
    for (int k = 0; k <= 5; ++k) {
      // First column follows s^-k; in general the entry carries s^-(k-m).
      const cplx literal = std::pow(s, -k) * c(k, 0);
      EXPECT_LE(std::abs(cs(k, 0) - literal), 1e-12 * std::abs(literal));
      for (int m = 0; m <= k; ++m) {
        const cplx expected = std::pow(s, -(k - m)) * c(k, m);
        EXPECT_LE(std::abs(cs(k, m) - expected), 1e-12 * std::abs(expected));
      }
    }
  }
}

TEST(CanonicalForm, Structure) {
  const auto e = equidistant(5);
  const auto j = iep_canonical_form(e, 2, 2);
  ASSERT_EQ(j.rows(), 5);
  EXPECT_EQ(j(0, 1), cplx(0.0));
  EXPECT_EQ(j(1, 2), cplx(0.0));
  EXPECT_EQ(j(2, 3), cplx(1.0));
  EXPECT_EQ(j(3, 4), cplx(1.0));
  EXPECT_EQ(j(4, 4), cplx(4.0));
}

TEST(ChainBasis, DiagonalHamiltonian) {
  const int n = 6;
  ComplexMatrix h = ComplexMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) h(i, i) = 1.0 + 5.0 * i;
  const auto sd = numerics::eig_biorthogonal(h);
  const auto cb = assemble_chain_basis(h, sd, 2, 3);
  for (double r : cb.recurrence_residuals) EXPECT_LT(r, 1e-12);
  EXPECT_LT(cb.similarity_residual, 1e-12);
  for (int k = 0; k < cb.R.cols(); ++k) EXPECT_NEAR(cb.R.col(k).norm(), 1.0, 1e-12);
}

TEST(ChainBasis, OrthogonalCloseLevelsBreakDown) {
  // With orthonormal eigenvectors the lower chain components alone exceed
  // unit norm once the gaps are small.
  ComplexMatrix h = ComplexMatrix::Zero(4, 4);
  for (int i = 0; i < 4; ++i) h(i, i) = 0.5 * i;
  const auto sd = numerics::eig_biorthogonal(h);
  EXPECT_THROW(assemble_chain_basis(h, sd, 0, 3), ChainBreakdown);
}

TEST(ChainBasis, ImaginaryCubicTail) {
  const auto& w = ic_window();
  ASSERT_GE(w.window.size(), 13);
  const auto cb = assemble_chain_basis(w.h, w.window, 4, 8);
  ASSERT_EQ(cb.recurrence_residuals.size(), 7u);
  for (double r : cb.recurrence_residuals) EXPECT_LE(r, 1e-6);
  EXPECT_LE(cb.similarity_residual, 1e-6);
  const auto d = basis_diagnostics(cb, w.window);
  EXPECT_GT(d.sigma_min_chain, d.sigma_min_eig);
  EXPECT_EQ(d.overlaps_chain.size(), 12u);
}

TEST(ChainBasis, SingleColumn) {
  const auto& w = ic_window();
  const auto cb = assemble_chain_basis(w.h, w.window, 0, 0);
  const auto d = basis_diagnostics(cb, w.window);
  EXPECT_NEAR(d.sigma_min_chain, 1.0, 1e-12);
  EXPECT_NEAR(d.sigma_min_eig, 1.0, 1e-12);
}

TEST(ChainBasis, WindowTooLarge) {
  const auto& w = ic_window();
  EXPECT_THROW(assemble_chain_basis(w.h, w.window, 4, w.window.size()), DomainError);
}
