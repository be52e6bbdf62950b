#include <doctest.h>

#include <cmath>
#include <numbers>

#include <unsupported/Eigen/MatrixFunctions>

#include "parabolic/spectral_analysis.hpp"
#include "test_support.hpp"

using namespace parabolic;
using parabolic::testing::Gen;

namespace {

CMatrix m2(Complex a, Complex b, Complex c, Complex d) {
  CMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

const CMatrix kRot = m2(0, -1, 1, 0);

BlockOperator block(const Grid& grid, const PotentialField& v, double a = 1.0) {
  return assemble_block(DiffusionField::identical(grid, Coefficients::constant(grid, a), v.components()), v);
}

PotentialField quasi_positive(const Grid& grid) {
  return PotentialField::sample(grid, [](double x, double) {
    return CMatrix((1 + x) * m2(-1, 2, 2, -4) + x * m2(-1, 2, 1, -2));
  });
}

// Independent oracle: e^{T L} for T far beyond the decay time of the nonzero spectrum.
CMatrix long_time_limit(const BlockOperator& l, double t) {
  const CMatrix a = t * l.materialize();
  return a.exp();
}

}  // namespace

TEST_CASE("spectrum_block: scalar Laplacian") {
  const Grid grid = Grid::interval(1.0, 64);
  const auto r = spectrum_block(block(grid, PotentialField::constant(grid, SquareMatrix::zero(1))));
  REQUIRE(r.eigenvalues.size() == 64);
  CHECK(std::abs(r.spectral_bound) <= 1e-9);
  REQUIRE(r.boundary_spectrum.size() == 1);
  CHECK(std::abs(r.boundary_spectrum[0]) <= 1e-9);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  CHECK(std::abs(r.eigenvalues[1].real() + pi2) / pi2 < 0.01);
  CHECK(r.gap == doctest::Approx(-r.eigenvalues[1].real()));
  for (std::size_t i = 1; i < r.eigenvalues.size(); ++i) CHECK(r.eigenvalues[i - 1].real() >= r.eigenvalues[i].real());
}

TEST_CASE("spectrum_block: constant rotation keeps +-i") {
  const Grid grid = Grid::interval(1.0, 32);
  const auto r = spectrum_block(block(grid, PotentialField::constant(grid, SquareMatrix(kRot))));
  const auto axis = imaginary_axis_eigenvalues(r);
  REQUIRE(axis.size() == 2);
  for (const auto& z : axis) {
    CHECK(std::abs(z.real()) <= 1e-12);
    CHECK(std::abs(std::abs(z.imag()) - 1.0) <= 1e-12);
  }
  CHECK(r.boundary_spectrum.size() == 2);
}

TEST_CASE("spectrum_block: variable rotation has nothing on the axis") {
  const Grid grid = Grid::interval(1.0, 64);
  const auto v = PotentialField::sample(grid, [](double x, double) { return CMatrix((1 + x) * kRot); });
  const auto r = spectrum_block(block(grid, v));
  CHECK(imaginary_axis_eigenvalues(r).empty());
  CHECK(r.spectral_bound < -1e-6);
}

TEST_CASE("spectrum_block: report invariants") {
  Gen g(79);
  for (int trial = 0; trial < 20; ++trial) {
    const Grid grid = Grid::interval(1.0, g.integer(2, 16));
    const Eigen::Index n = g.integer(1, 3);
    const auto v = PotentialField::sample(grid, [&](double x, double) { return CMatrix(g.complex_gaussian(n) * (1 + x)); });
    const auto r = spectrum_block(block(grid, v));
    CHECK_FALSE(r.boundary_spectrum.empty());
    CHECK(r.gap >= 0.0);
    CHECK(r.spectral_bound == r.eigenvalues.front().real());
  }
  const Grid big = Grid::interval(1.0, 4097);
  CHECK_THROWS_AS(spectrum_block(block(big, PotentialField::constant(big, SquareMatrix::zero(1)))), ScenarioError);
}

TEST_CASE("limit_projection examples") {
  const Grid grid = Grid::interval(1.0, 16);

  SUBCASE("negative spectrum gives P = 0") {
    const auto l = block(grid, PotentialField::constant(grid, SquareMatrix::identity(2).scaled(-1.0)));
    const auto p = limit_projection(l, spectrum_block(l));
    CHECK(p.rank == 0);
    CHECK(p.matrix.cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("quasi-positive field: rank one") {
    const auto l = block(grid, quasi_positive(grid));
    const auto p = limit_projection(l, spectrum_block(l));
    CHECK(p.rank == 1);
    const CMatrix oracle = long_time_limit(l, 200.0);
    CHECK((p.matrix - oracle).cwiseAbs().maxCoeff() <= 1e-8);
  }

  SUBCASE("V = 0, N = 2: rank two, projection onto the means") {
    const auto l = block(grid, PotentialField::constant(grid, SquareMatrix::zero(2)));
    const auto p = limit_projection(l, spectrum_block(l));
    CHECK(p.rank == 2);
    CMatrix vals(16, 2);
    for (Eigen::Index c = 0; c < 16; ++c) {
      vals(c, 0) = grid.center(c)[0];
      vals(c, 1) = Complex(0, 3.0);
    }
    const auto pu = p.apply(StateField(grid, vals));
    CHECK((pu.values().col(0).array() - 0.5).abs().maxCoeff() <= 1e-12);
    CHECK((pu.values().col(1).array() - Complex(0, 3.0)).abs().maxCoeff() <= 1e-12);
  }

  SUBCASE("rotation: NoLimitError carries beta") {
    const auto l = block(grid, PotentialField::constant(grid, SquareMatrix(kRot)));
    try {
      limit_projection(l, spectrum_block(l));
      FAIL("expected NoLimitError");
    } catch (const NoLimitError& e) {
      CHECK(std::abs(std::abs(e.beta()) - 1.0) <= 1e-10);
    }
  }

  SUBCASE("positive spectral bound has no limit") {
    const auto l = block(grid, PotentialField::constant(grid, SquareMatrix::identity(1).scaled(0.5)));
    CHECK_THROWS_AS(limit_projection(l, spectrum_block(l)), NoLimitError);
  }

  SUBCASE("non-semisimple zero has no limit") {
    const auto l = block(grid, PotentialField::constant(grid, SquareMatrix(m2(0, 1, 0, 0))));
    CHECK_THROWS_AS(limit_projection(l, spectrum_block(l)), NoLimitError);
  }
}

TEST_CASE("limit_projection invariants on random Metzler potentials") {
  Gen g(83);
  const Grid grid = Grid::interval(1.0, 8);
  for (int trial = 0; trial < 25; ++trial) {
    const Eigen::Index n = g.integer(1, 3);
    // Zero column sums with nonnegative off-diagonals: 1^T V = 0, so s = 0 and
    // the limit exists (Markov generator coupling).
    RMatrix m0(n, n), m1(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        m0(i, j) = i == j ? 0.0 : g.uniform(0.0, 2.0);
        m1(i, j) = i == j ? 0.0 : g.uniform(0.0, 1.0);
      }
    for (Eigen::Index j = 0; j < n; ++j) {
      m0(j, j) = -m0.col(j).sum();
      m1(j, j) = -m1.col(j).sum();
    }
    const auto v = PotentialField::sample(grid, [&](double x, double) { return CMatrix((m0 + x * m1).cast<Complex>()); });
    const auto l = block(grid, v, g.uniform(0.5, 2.0));
    const auto r = spectrum_block(l);
    const auto p = limit_projection(l, r);
    const double pn = std::max(1e-300, p.matrix.norm());
    CHECK((p.matrix * p.matrix - p.matrix).norm() <= 1e-8 * pn);
    CHECK(std::abs(p.matrix.trace().real() - static_cast<double>(p.rank)) <= 1e-6);
    const CMatrix lm = l.materialize();
    CHECK((lm * p.matrix - p.matrix * lm).norm() <= 1e-8 * lm.norm());
    CHECK((p.matrix - long_time_limit(l, 400.0)).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("eigenvector_constancy") {
  const Grid grid = Grid::interval(1.0, 16);
  const auto rot = block(grid, PotentialField::constant(grid, SquareMatrix(kRot)));
  const CVector z = (CVector(2) << 1.0, Complex(0, -1)).finished();
  CHECK(eigenvector_constancy(rot, Complex(0, 1), StateField::constant(grid, z)) <= 1e-10);

  const auto qp = block(grid, quasi_positive(grid));
  CHECK(eigenvector_constancy(qp, 0.0, StateField::constant(grid, (CVector(2) << 2.0, 1.0).finished())) <= 1e-10);

  StateField bumped = StateField::constant(grid, z);
  bumped.values()(3, 0) += 0.5;
  CHECK(eigenvector_constancy(rot, Complex(0, 1), bumped) > 1e-4);

  CHECK_THROWS(eigenvector_constancy(rot, Complex(-1.0, 1.0), bumped));

  SUBCASE("eigenvectors from the solver at axis eigenvalues are constant") {
    const auto r = spectrum_block(rot, true);
    for (std::size_t j = 0; j < r.eigenvalues.size(); ++j) {
      if (std::abs(r.eigenvalues[j].real()) > r.tolerance) continue;
      const auto v = unflatten(grid, 2, r.eigenvectors.col(static_cast<Eigen::Index>(j)));
      CHECK(eigenvector_constancy(rot, r.eigenvalues[j], v) <= 1e-10);
    }
  }
}
