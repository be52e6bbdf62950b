#include <doctest.h>

#include <cmath>
#include <numbers>

#include <unsupported/Eigen/MatrixFunctions>

#include "parabolic/matrix_analysis.hpp"
#include "test_support.hpp"

using namespace parabolic;
using parabolic::testing::Gen;

namespace {

SquareMatrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  RMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return SquareMatrix(m);
}

const SquareMatrix kRotation = mat({{0, -1}, {1, 0}});
const SquareMatrix kPDiss = mat({{-1, -1}, {-2, -2}});
const SquareMatrix kQuasi = mat({{-1, 2}, {2, -4}});

// phi(xi) = sum_i sgn(xi_i) |xi_i|^{p-1} (M xi)_i, written out independently.
double phi(const RMatrix& m, const RVector& xi, double p) {
  const RVector mx = m * xi;
  double s = 0.0;
  for (Eigen::Index i = 0; i < xi.size(); ++i) {
    const double sg = xi(i) > 0 ? 1.0 : (xi(i) < 0 ? -1.0 : 0.0);
    s += sg * std::pow(std::abs(xi(i)), p - 1.0) * mx(i);
  }
  return s;
}

double max_abs_entry(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("SquareMatrix invariants") {
  CHECK(kRotation.is_real());
  CHECK(kRotation.size() == 2);
  CMatrix c = CMatrix::Zero(2, 2);
  c(0, 1) = Complex(0.0, 1e-300);
  CHECK_FALSE(SquareMatrix(c).is_real());
  CHECK_THROWS_AS(SquareMatrix(CMatrix(2, 3)), InvalidInput);
  CHECK_THROWS_AS(SquareMatrix(CMatrix(0, 0)), InvalidInput);
  RMatrix bad = RMatrix::Zero(2, 2);
  bad(1, 1) = std::nan("");
  CHECK_THROWS_AS(SquareMatrix{bad}, InvalidInput);
  bad(1, 1) = kInf;
  CHECK_THROWS_AS(SquareMatrix{bad}, InvalidInput);
}

TEST_CASE("is_quasi_positive") {
  CHECK(is_quasi_positive(kQuasi));
  CHECK(is_quasi_positive(SquareMatrix::identity(3)));
  CHECK_FALSE(is_quasi_positive(kRotation));
  CMatrix c = kRotation.entries();
  c(0, 0) = Complex(0, 1);
  CHECK_THROWS_AS(is_quasi_positive(SquareMatrix(c)), InvalidInput);
}

TEST_CASE("l1 and l-inf dissipativity") {
  CHECK(is_l1_dissipative(SquareMatrix::identity(3).scaled(-1.0)));
  CHECK_FALSE(is_l1_dissipative(kPDiss));
  CHECK(is_l1_dissipative(SquareMatrix::zero(4)));

  CHECK(is_linf_dissipative(kPDiss));
  CHECK_FALSE(is_linf_dissipative(kRotation));
  CHECK(is_linf_dissipative(SquareMatrix::zero(4)));

  // Column 1 of the p-dissipative matrix: -1 + |-2| = 1, so the margin is -1.
  CHECK(l1_margin(kPDiss) == doctest::Approx(-1.0));
  CHECK(linf_margin(kPDiss) == doctest::Approx(0.0));

  const SquareMatrix complex_m(CMatrix(kRotation.entries() * Complex(0, 1)));
  CHECK_THROWS_AS(is_l1_dissipative(complex_m), InvalidInput);
  CHECK_THROWS_AS(is_linf_dissipative(complex_m), InvalidInput);
}

TEST_CASE("l2 dissipativity") {
  CHECK(is_l2_dissipative(kRotation));
  CHECK_FALSE(is_l2_dissipative(kPDiss));
  CHECK(is_l2_dissipative(SquareMatrix::identity(2).scaled(-1.0)));
  // Hermitian part of i*I is zero.
  CHECK(is_l2_dissipative(SquareMatrix::identity(2).scaled(Complex(0, 1))));
  CHECK_FALSE(is_l2_dissipative(SquareMatrix::identity(2).scaled(Complex(1e-6, 1))));
  // Symmetric part of [[-1,-1],[-2,-2]] is [[-1,-1.5],[-1.5,-2]] with top eigenvalue (-3+sqrt(10))/2.
  CHECK(l2_margin(kPDiss) == doctest::Approx(-(-3.0 + std::sqrt(10.0)) / 2.0).epsilon(1e-12));
}

TEST_CASE("sampled l^p dissipativity") {
  const auto neg = is_lp_dissipative_numeric(SquareMatrix::identity(3).scaled(-1.0), 3.0, {1000, 7});
  CHECK(neg.dissipative);
  CHECK_FALSE(neg.witness);

  const auto rot = is_lp_dissipative_numeric(kRotation, 4.0, {10000, 0});
  CHECK_FALSE(rot.dissipative);
  REQUIRE(rot.witness);
  CHECK(phi(kRotation.real_entries(), *rot.witness, 4.0) > 1e-10);

  // Brute-force maximum of phi on the l^4 unit circle is strictly positive.
  double best = -kInf;
  for (int k = 0; k < 20000; ++k) {
    const double th = 2.0 * std::numbers::pi * k / 20000.0;
    RVector xi(2);
    xi << std::cos(th), std::sin(th);
    xi /= std::pow(std::pow(std::abs(xi(0)), 4) + std::pow(std::abs(xi(1)), 4), 0.25);
    best = std::max(best, phi(kRotation.real_entries(), xi, 4.0));
  }
  CHECK(best > 0.1);
  CHECK(rot.max_phi <= best * (1.0 + 1e-6));
  CHECK(rot.max_phi >= 0.9 * best);

  CHECK(is_lp_dissipative_numeric(SquareMatrix::zero(3), 1.5).dissipative);
  CHECK_THROWS_AS(is_lp_dissipative_numeric(kRotation, 0.5), InvalidInput);
  CHECK_THROWS_AS(is_lp_dissipative_numeric(kRotation, kInf), InvalidInput);

  SUBCASE("p = 2 agrees with the symmetric-part test") {
    Gen g(11);
    int disagreements = 0;
    for (int trial = 0; trial < 200; ++trial) {
      const Eigen::Index n = g.integer(2, 5);
      RMatrix m = g.gaussian(n);
      const double top = Eigen::SelfAdjointEigenSolver<RMatrix>(0.5 * (m + m.transpose())).eigenvalues().maxCoeff();
      m -= (top + (g.coin() ? -1.0 : 1.0) * g.uniform(1e-3, 1.0)) * RMatrix::Identity(n, n);
      const SquareMatrix sm(m);
      const auto verdict = is_lp_dissipative_numeric(sm, 2.0, {2000, static_cast<std::uint64_t>(trial)});
      if (verdict.dissipative != is_l2_dissipative(sm)) ++disagreements;
    }
    CHECK(disagreements == 0);
  }
}

TEST_CASE("lp pairing") {
  RVector xi(2);
  xi << 1.0, -2.0;
  CHECK(lp_pairing(kPDiss.real_entries(), xi, 3.0) == doctest::Approx(phi(kPDiss.real_entries(), xi, 3.0)));
}

TEST_CASE("operator norms") {
  for (double p : {1.0, 2.0, kInf}) CHECK(operator_norm(SquareMatrix::identity(3), p) == doctest::Approx(1.0));
  CHECK(operator_norm(kRotation, 1.0) == doctest::Approx(1.0));
  CHECK(operator_norm(kPDiss, kInf) == doctest::Approx(4.0));
  CHECK(operator_norm(kPDiss, 1.0) == doctest::Approx(3.0));
  // ||[[-1,-1],[-2,-2]]||_2 = sqrt(10) (rank one: |(1,2)| * |(1,1)|).
  CHECK(operator_norm(kPDiss, 2.0) == doctest::Approx(std::sqrt(10.0)).epsilon(1e-13));
  CHECK_THROWS_AS(operator_norm(kPDiss, 3.0), InvalidInput);
}

TEST_CASE("matrix exponential closed forms") {
  Gen g(3);
  CHECK(matrix_exp(SquareMatrix(g.gaussian(4)), 0.0) == SquareMatrix::identity(4));
  for (double t : {1e-6, 0.3, 1.0, 2.5, 10.0, 100.0, 1000.0}) {
    CMatrix expected(2, 2);
    expected << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
    CHECK(max_abs_entry(matrix_exp(kRotation, t).entries() - expected) <= 1e-12 * std::max(1.0, t));
    CMatrix nil(2, 2);
    nil << 1.0, t, 0.0, 1.0;
    CHECK(testing::rel_err(matrix_exp(mat({{0, 1}, {0, 0}}), t).entries(), nil) <= 1e-13);
  }
  CHECK(matrix_exp(kRotation, 1.0).is_real());
  CHECK_THROWS_AS(matrix_exp(kRotation, -1.0), InvalidInput);
  CHECK_THROWS_AS(matrix_exp(kRotation, std::nan("")), InvalidInput);
}

TEST_CASE("matrix exponential against an independent implementation") {
  Gen g(5);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index n = g.integer(1, 8);
    const double scale = std::pow(10.0, g.uniform(-3.0, 3.0)) / static_cast<double>(n);
    CMatrix a = g.complex_gaussian(n, scale);
    if (g.coin()) a = a.real().cast<Complex>();
    // Keep the spectrum near the axis so that e^A stays well scaled.
    const double shift = Eigen::ComplexEigenSolver<CMatrix>(a).eigenvalues().real().maxCoeff();
    a -= shift * CMatrix::Identity(n, n);
    const CMatrix ours = expm(a);
    const CMatrix ref = a.exp();
    const double cond = std::max(1.0, a.norm());
    CHECK(testing::rel_err(ours, ref) <= 1e-12 * cond);
  }
}

TEST_CASE("matrix exponential accuracy on normal matrices with ||tM|| up to 1e3") {
  Gen g(8);
  for (int trial = 0; trial < 40; ++trial) {
    const Eigen::Index n = g.integer(2, 6);
    RMatrix s = g.gaussian(n);
    s = (0.5 * (s - s.transpose())).eval();
    s *= std::pow(10.0, g.uniform(-2.0, 3.0)) / std::max(1e-12, s.norm());
    // e^S is orthogonal for skew S; its exact spectral norm is 1.
    const RMatrix e = matrix_exp(SquareMatrix(s), 1.0).real_entries();
    CHECK((e.transpose() * e - RMatrix::Identity(n, n)).norm() <= 1e-12 * std::max(1.0, s.norm()));
  }
}

TEST_CASE("semigroup and determinant identities") {
  Gen g(13);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = g.integer(1, 6);
    RMatrix m = g.gaussian(n, 1.0 / std::sqrt(static_cast<double>(n)));
    m -= 0.5 * RMatrix::Identity(n, n);
    const SquareMatrix sm(m);
    const double s = g.uniform(0.0, 3.0), t = g.uniform(0.0, 3.0);
    const CMatrix lhs = matrix_exp(sm, s + t).entries();
    const CMatrix rhs = matrix_exp(sm, s).entries() * matrix_exp(sm, t).entries();
    CHECK(testing::rel_err(lhs, rhs) <= 1e-10);
    const Complex det = matrix_exp(sm, t).entries().determinant();
    const double expected = std::exp(t * m.trace());
    CHECK(std::abs(det - expected) <= 1e-10 * expected);
  }
}

TEST_CASE("quasi-positive generators have positive exponentials") {
  Gen g(17);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index n = g.integer(2, 6);
    RMatrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) m(i, j) = i == j ? g.uniform(-5.0, 1.0) : (g.coin(0.3) ? 0.0 : g.uniform(0.0, 2.0));
    const SquareMatrix sm(m);
    REQUIRE(is_quasi_positive(sm));
    for (double t : {1e-3, 0.1, 1.0, 5.0}) {
      const RMatrix e = matrix_exp(sm, t).real_entries();
      CHECK(e.minCoeff() >= -1e-12 * std::max(1.0, e.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("contractivity oracle") {
  const std::vector<double> ts{0.001, 0.1, 1.0, 10.0};
  CHECK(contractivity_oracle(SquareMatrix::identity(2).scaled(-1.0), 1.0, ts).contractive);

  const std::vector<double> small{0.01};
  CHECK_THROWS_AS(contractivity_oracle(kRotation, kInf, small), InvalidInput);  // needs t <= 1e-3
  const std::vector<double> with_small{0.01, 1e-3};
  const auto r = contractivity_oracle(kRotation, kInf, with_small);
  CHECK_FALSE(r.contractive);
  REQUIRE(r.violating_t);
  // ||e^{tM}||_inf = cos t + sin t for the rotation.
  CHECK(std::cos(*r.violating_t) + std::sin(*r.violating_t) > 1.0 + 1e-9);

  const auto grid = dyadic_grid(-10, 4);
  CHECK(grid.size() == 15);
  CHECK(grid.front() == std::ldexp(1.0, -10));
  CHECK(contractivity_oracle(kPDiss, kInf, grid).contractive);
  CHECK_FALSE(contractivity_oracle(kPDiss, 2.0, grid).contractive);

  const std::vector<double> empty;
  CHECK_THROWS_AS(contractivity_oracle(kPDiss, 1.0, empty), InvalidInput);
  const std::vector<double> negative{-1.0, 1e-4};
  CHECK_THROWS_AS(contractivity_oracle(kPDiss, 1.0, negative), InvalidInput);
  CHECK_THROWS_AS(contractivity_oracle(kPDiss, 3.0, grid), InvalidInput);
}

TEST_CASE("analytic checks agree with the contractivity oracle") {
  Gen g(23);
  const auto grid = dyadic_grid();
  int mismatches = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const Eigen::Index n = g.integer(2, 6);
    const SquareMatrix m(g.gaussian(n, 0.5));
    if (is_l1_dissipative(m) != contractivity_oracle(m, 1.0, grid).contractive) ++mismatches;
    if (is_linf_dissipative(m) != contractivity_oracle(m, kInf, grid).contractive) ++mismatches;
    if (is_l2_dissipative(m) != contractivity_oracle(m, 2.0, grid).contractive) ++mismatches;
    // Shifted copy: dissipative in all three senses.
    const double shift = std::max({-l1_margin(m), -linf_margin(m), -l2_margin(m)}) + 0.2;
    const SquareMatrix d(RMatrix(m.real_entries() - shift * RMatrix::Identity(n, n)));
    CHECK(is_l1_dissipative(d));
    CHECK(is_linf_dissipative(d));
    CHECK(is_l2_dissipative(d));
    CHECK(contractivity_oracle(d, 1.0, grid).contractive);
    CHECK(contractivity_oracle(d, kInf, grid).contractive);
    CHECK(contractivity_oracle(d, 2.0, grid).contractive);
  }
  CHECK(mismatches == 0);
}

TEST_CASE("dissipativity report") {
  const std::vector<double> ps{3.0};
  const auto r = dissipativity_report(kPDiss, ps, {500, 1});
  REQUIRE(r.l1);
  CHECK_FALSE(*r.l1);
  CHECK(*r.linf);
  CHECK_FALSE(r.l2);
  CHECK_FALSE(*r.quasi_positive);
  REQUIRE(r.numeric.size() == 1);
  CHECK(r.numeric[0].p == 3.0);
  for (const auto& v : r.numeric) CHECK(v.dissipative != v.witness.has_value());

  const auto c = dissipativity_report(SquareMatrix::identity(2).scaled(Complex(0, 1)));
  CHECK_FALSE(c.l1);
  CHECK_FALSE(c.linf);
  CHECK_FALSE(c.quasi_positive);
  CHECK(c.l2);
}

TEST_CASE("spectrum") {
  for (double a : {0.5, 1.0, 3.0}) {
    const auto eigs = spectrum(kRotation.scaled(a));
    REQUIRE(eigs.size() == 2);
    CHECK(std::abs(eigs[0] - Complex(0, a)) < 1e-12);
    CHECK(std::abs(eigs[1] - Complex(0, -a)) < 1e-12);

    const auto e2 = spectrum(mat({{1, 2}, {1, 2}}).scaled(-a));
    CHECK(std::abs(e2[0]) < 1e-12);
    CHECK(std::abs(e2[1] - Complex(-3 * a, 0)) < 1e-12);
  }
  const auto z = spectrum(SquareMatrix::zero(3));
  CHECK(z.size() == 3);
  for (const auto& e : z) CHECK(e == Complex(0, 0));
  CHECK(spectral_bound(SquareMatrix::zero(3)) == 0.0);
  CHECK(spectral_bound(kPDiss) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("exp_converges") {
  const auto zero = exp_converges(SquareMatrix::zero(2));
  CHECK(zero.converges);
  CHECK(zero.zero_semisimple);

  const auto rot = exp_converges(kRotation);
  CHECK_FALSE(rot.converges);
  CHECK(rot.imaginary_axis_eigs.size() == 2);

  const auto jordan = exp_converges(mat({{0, 1}, {0, 0}}));
  CHECK_FALSE(jordan.converges);
  CHECK_FALSE(jordan.zero_semisimple);

  CHECK(exp_converges(kPDiss).converges);
  CHECK(exp_converges(SquareMatrix::identity(2).scaled(-1.0)).converges);
  CHECK_FALSE(exp_converges(SquareMatrix::identity(2).scaled(1e-3)).converges);

  SUBCASE("invariant: converges implies bounded spectrum on the axis") {
    Gen g(29);
    for (int trial = 0; trial < 200; ++trial) {
      const Eigen::Index n = g.integer(1, 5);
      RMatrix m = g.gaussian(n);
      if (g.coin()) m.col(0).setZero();  // force a zero eigenvalue sometimes
      const auto v = exp_converges(SquareMatrix(m));
      if (v.converges) {
        CHECK(v.spectral_bound <= axis_tolerance(m.cast<Complex>()));
        for (double b : v.imaginary_axis_eigs) CHECK(std::abs(b) <= 1e-8 * std::max(1.0, m.norm()));
      }
    }
  }
}

TEST_CASE("spectral necessity for l1 / l-inf dissipative matrices") {
  Gen g(31);
  int violations = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const Eigen::Index n = g.integer(2, 6);
    RMatrix m = g.gaussian(n);
    // Markov-type generator: zero column sums, so l1-dissipative with margin 0.
    for (Eigen::Index k = 0; k < n; ++k) {
      m(k, k) = 0.0;
      m(k, k) = -m.col(k).cwiseAbs().sum();
    }
    const SquareMatrix sm(m);
    REQUIRE(is_l1_dissipative(sm));
    for (const auto& e : spectrum(sm)) {
      if (std::abs(e.real()) <= 1e-10 && std::abs(e.imag()) > 1e-8) ++violations;
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("canonical order is stable under tiny perturbations") {
  const std::vector<Complex> a{{0, 1}, {0, -1}, {-1, 0}, {0, 0}};
  const std::vector<Complex> b{{1e-15, 1}, {0, -1 + 1e-14}, {-1, 1e-16}, {-1e-15, 0}};
  CHECK(canonical_order(a, 1.0, EigenOrder::RealDescending) ==
        canonical_order(b, 1.0, EigenOrder::RealDescending));
  const auto m = canonical_order(a, 1.0, EigenOrder::ModulusAscending);
  CHECK(m.front() == 3);
}
