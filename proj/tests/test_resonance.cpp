#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <complex>
#include <numbers>

#include "kgres/resonance.hpp"
#include "test_util.hpp"

using namespace kgres;
using kgres::testing::random_form;
using kgres::testing::random_omega;
using kgres::testing::uniform;
using cd = std::complex<double>;

namespace {

// Trapezoid rule for int_0^1 Q_j(V, W) e^{-2 pi i j theta} d theta with the free oscillation
// written out by hand.
cd quadrature(const QuadraticForm& q, const Masses& m, const HyperboloidPoint& w, int j, int nodes) {
  cd sum{0.0, 0.0};
  for (int n = 0; n < nodes; ++n) {
    const double th = static_cast<double>(n) / nodes;
    FieldValues x;
    for (int k = 1; k <= 2; ++k) {
      x.v[k - 1] = std::cos(2 * std::numbers::pi * k * th);
      for (int a = 0; a < 3; ++a) x.w[k - 1][a] = -w[a] * m.m(k) * std::sin(2 * std::numbers::pi * k * th);
    }
    double val = 0.0;
    for (const auto& [key, c] : q.terms()) val += to_double(c) * x[key.first] * x[key.second];
    sum += val * std::polar(1.0, -2 * std::numbers::pi * j * th);
  }
  return sum / static_cast<double>(nodes);
}

NonlinearSystem yukawa() { return parse_system("Q1 = v1*v2; Q2 = v1^2", Masses{}); }

NonlinearSystem system_of(const QuadraticForm& q1, const QuadraticForm& q2) {
  NonlinearSystem s;
  s.q1 = q1;
  s.q2 = q2;
  return s;
}

const ComplexRational kQuarter{Rational(1, 4)};

}  // namespace

TEST(Psi, YukawaResonantEntryIsQuarter) {
  const auto psi = psi_coefficients(yukawa(), 1);
  EXPECT_EQ(psi.at(PsiIndex{1, 2, -1, 1}), PhiPolynomial::constant(kQuarter));
  EXPECT_EQ(psi.size(), 12u);
}

TEST(Psi, ZeroFormGivesZeroCoefficients) {
  const auto psi = psi_coefficients(NonlinearSystem{}, 2);
  for (const auto& [idx, p] : psi) EXPECT_TRUE(p.is_zero()) << idx.to_string();
}

TEST(Psi, RejectsNonResonantMassesAndBadIndex) {
  NonlinearSystem s = yukawa();
  s.masses.m2 = Rational(3);
  EXPECT_THROW(psi_coefficients(s, 1), std::invalid_argument);
  EXPECT_THROW(phi(s, 2), std::invalid_argument);
  EXPECT_THROW(psi_coefficients(yukawa(), 3), std::invalid_argument);
}

TEST(Psi, ReconstructsQAtUnitAmplitudes) {
  for (int trial = 0; trial < 30; ++trial) {
    const auto sys = system_of(random_form(6), random_form(6));
    for (int j = 1; j <= 2; ++j) {
      const auto psi = psi_coefficients(sys, j);
      for (int i = 0; i < 5; ++i) {
        const auto w = random_omega(3.0);
        for (int s = 0; s < 64; ++s) {
          const double th = s / 64.0;
          const double direct = circle_sample(sys.q(j), sys.masses, w, th);
          const cd sum = psi_expansion(psi, w, {cd(1, 0), cd(1, 0)}, 2 * std::numbers::pi * th);
          EXPECT_NEAR(sum.real(), direct, 1e-12 * (1 + std::abs(direct)));
          EXPECT_NEAR(sum.imag(), 0.0, 1e-12 * (1 + std::abs(direct)));
        }
      }
    }
  }
}

TEST(Psi, ReconstructsQAtGeneralAmplitudes) {
  // v_k = Re(alpha_k e^{i k phase}), omega d_tau v_k built directly.
  for (int trial = 0; trial < 30; ++trial) {
    const auto sys = system_of(random_form(6), random_form(6));
    const std::array<cd, 2> alpha{cd(uniform(-1, 1), uniform(-1, 1)), cd(uniform(-1, 1), uniform(-1, 1))};
    const auto w = random_omega(2.0);
    for (int j = 1; j <= 2; ++j) {
      const auto psi = psi_coefficients(sys, j);
      for (int s = 0; s < 16; ++s) {
        const double phase = uniform(0, 2 * std::numbers::pi);
        FieldValues x;
        for (int k = 1; k <= 2; ++k) {
          const cd e = alpha[k - 1] * std::polar(1.0, k * phase);
          x.v[k - 1] = e.real();
          for (int a = 0; a < 3; ++a) x.w[k - 1][a] = w[a] * (cd(0, sys.masses.m(k)) * e).real();
        }
        const double direct = sys.q(j).evaluate(x);
        const cd sum = psi_expansion(psi, w, alpha, phase);
        EXPECT_NEAR(sum.real(), direct, 1e-12 * (1 + std::abs(direct)));
        EXPECT_NEAR(sum.imag(), 0.0, 1e-12 * (1 + std::abs(direct)));
      }
    }
  }
}

TEST(Phi, YukawaGoldenValues) {
  const auto sys = yukawa();
  EXPECT_EQ(phi(sys, 1), PhiPolynomial::constant(kQuarter));
  EXPECT_EQ(phi(sys, 2), PhiPolynomial::constant(kQuarter));
  for (int i = 0; i < 20; ++i) {
    const auto w = random_omega(3.0);
    for (int j = 1; j <= 2; ++j) {
      const cd q = quadrature(sys.q(j), sys.masses, w, j, 1024);
      EXPECT_NEAR(q.real(), 0.25, 1e-12);
      EXPECT_NEAR(q.imag(), 0.0, 1e-12);
    }
  }
}

TEST(Phi, CounterexampleFirstCoefficientVanishes) {
  const auto sys = parse_system("F1 = 0; F2 = u1^2", Masses{});
  EXPECT_TRUE(phi(sys, 1).is_zero());
  EXPECT_EQ(phi(sys, 2), PhiPolynomial::constant(kQuarter));
}

TEST(Phi, TimeDerivativeProduct) {
  const auto sys = parse_system("Q1 = w(1,0)*w(2,0)", Masses{});
  const PhiPolynomial p = phi(sys, 1);
  EXPECT_TRUE(p.is_reduced());
  const HyperboloidPoint w{std::cosh(1.0), -std::sinh(1.0), 0.0};
  const double expected = std::cosh(1.0) * std::cosh(1.0) / 2.0;
  EXPECT_NEAR(p.evaluate(w).real(), expected, 1e-12);
  EXPECT_NEAR(p.evaluate(w).imag(), 0.0, 1e-12);
  const cd q = quadrature(sys.q1, sys.masses, w, 1, 1024);
  EXPECT_NEAR(q.real(), expected, 1e-12);
  // Reduced form of w0^2 / 2.
  PhiPolynomial expect_poly;
  expect_poly.add({0, 0, 0}, ComplexRational{Rational(1, 2)});
  expect_poly.add({0, 2, 0}, ComplexRational{Rational(1, 2)});
  expect_poly.add({0, 0, 2}, ComplexRational{Rational(1, 2)});
  EXPECT_EQ(p, expect_poly);
}

TEST(Phi, NullCombinationReducesToZero) {
  const auto sys = parse_system("Q2 = m1^2*v1^2 + w(1,0)^2 - w(1,1)^2 - w(1,2)^2", Masses{});
  EXPECT_TRUE(phi(sys, 2).is_zero());
  for (int i = 0; i < 5; ++i) {
    const auto w = random_omega(3.0);
    EXPECT_LE(std::abs(quadrature(sys.q2, sys.masses, w, 2, 1024)), 1e-12);
  }
}

TEST(Phi, EqualsResonantPsiEntry) {
  for (int trial = 0; trial < 50; ++trial) {
    const auto sys = system_of(random_form(6), random_form(6));
    for (int j = 1; j <= 2; ++j) {
      const auto sel = resonant_selection(j);
      ASSERT_EQ(sel.size(), 1u);
      EXPECT_EQ(phi(sys, j), psi_coefficients(sys, j).at(*sel.begin()));
    }
  }
}

TEST(Phi, QuadratureAgreementAtRandomPoints) {
  for (int trial = 0; trial < 20; ++trial) {
    Masses m;
    m.m1 = Rational(static_cast<int>(uniform(1, 7)), static_cast<int>(uniform(1, 4)));
    m.m2 = 2 * m.m1;
    NonlinearSystem sys = system_of(random_form(6), random_form(6));
    sys.masses = m;
    for (int i = 0; i < 20; ++i) {
      const auto w = random_omega(2.0);
      for (int j = 1; j <= 2; ++j) {
        const cd exact = phi(sys, j).evaluate(w);
        const cd q = quadrature(sys.q(j), sys.masses, w, j, 256);
        EXPECT_LE(std::abs(exact - q), 1e-11 * (1 + std::abs(exact)));
        EXPECT_LE(std::abs(phi_quadrature(sys, j, w) - exact), 1e-11 * (1 + std::abs(exact)));
      }
    }
  }
}

TEST(Reduction, AgreesOnHyperboloid) {
  for (int trial = 0; trial < 100; ++trial) {
    PhiPolynomial p;
    for (int t = 0; t < 6; ++t) {
      const OmegaMonomial m{static_cast<int>(uniform(0, 5)), static_cast<int>(uniform(0, 3)),
                            static_cast<int>(uniform(0, 3))};
      p.add(m, ComplexRational{Rational(static_cast<int>(uniform(-9, 10)), 4), Rational(static_cast<int>(uniform(-9, 10)), 4)});
    }
    const PhiPolynomial r = p.reduced();
    EXPECT_TRUE(r.is_reduced());
    for (int i = 0; i < 10; ++i) {
      const auto w = random_omega(1.5);
      const cd a = p.evaluate(w);
      const cd b = r.evaluate(w);
      EXPECT_LE(std::abs(a - b), 1e-12 * (1 + std::abs(a)));
    }
  }
}

TEST(ResonantSelection, Indices) {
  EXPECT_EQ(resonant_selection(1), (std::set<PsiIndex>{{1, 2, -1, 1}}));
  EXPECT_EQ(resonant_selection(2), (std::set<PsiIndex>{{1, 1, 1, 1}}));
  for (int s1 : {1, -1}) {
    for (int s2 : {1, -1}) EXPECT_FALSE(resonant_selection(1).contains(PsiIndex{1, 1, s1, s2}));
  }
  EXPECT_THROW(resonant_selection(0), std::invalid_argument);
  EXPECT_THROW(resonant_selection(3), std::invalid_argument);
}

TEST(Classify, Yukawa) {
  const auto sys = yukawa();
  const auto c = classify(phi(sys, 1), phi(sys, 2));
  EXPECT_EQ(c.tag, ConditionTag::PositiveB);
  EXPECT_DOUBLE_EQ(c.infimum_re, 1.0 / 16.0);
  EXPECT_EQ(c.max_abs_im, 0.0);
  EXPECT_EQ(c.product, PhiPolynomial::constant(ComplexRational{Rational(1, 16)}));
}

TEST(Classify, CounterexampleIsNeither) {
  const auto c = classify(PhiPolynomial{}, PhiPolynomial::constant(kQuarter));
  EXPECT_EQ(c.tag, ConditionTag::Neither);
}

TEST(Classify, BothZeroIsNullA) {
  const auto c = classify(PhiPolynomial{}, PhiPolynomial{});
  EXPECT_EQ(c.tag, ConditionTag::NullA);
  const auto sys = parse_system("Q1 = 0; Q2 = m1^2*v1^2 + w(1,0)^2 - w(1,1)^2 - w(1,2)^2", Masses{});
  EXPECT_EQ(classify(phi(sys, 1), phi(sys, 2)).tag, ConditionTag::NullA);
}

TEST(Classify, NegativeProductIsNeither) {
  const PhiPolynomial w0sq = [] {
    PhiPolynomial p;
    p.add({2, 0, 0}, ComplexRational{Rational(1)});
    return p;
  }();
  const auto p1 = (w0sq * PhiPolynomial::constant(ComplexRational{Rational(1, 2)})).reduced();
  const auto p2 = (w0sq * PhiPolynomial::constant(ComplexRational{Rational(-1, 4)})).reduced();
  const auto c = classify(p1, p2);
  EXPECT_EQ(c.tag, ConditionTag::Neither);
  EXPECT_LT(c.infimum_re, 0.0);
}

TEST(Classify, ImaginaryProductIsNeither) {
  const auto c = classify(PhiPolynomial::constant(ComplexRational{Rational(1), Rational(1)}),
                          PhiPolynomial::constant(kQuarter));
  EXPECT_EQ(c.tag, ConditionTag::Neither);
  EXPECT_FALSE(c.im_identically_zero);
}

TEST(Classify, ConjugatePairIsPositive) {
  // Phi1 = 1 + i, Phi2 = 1 - i: product 2, purely real.
  const auto c = classify(PhiPolynomial::constant(ComplexRational{Rational(1), Rational(1)}),
                          PhiPolynomial::constant(ComplexRational{Rational(1), Rational(-1)}));
  EXPECT_EQ(c.tag, ConditionTag::PositiveB);
}

TEST(Classify, VanishingInfimumIsUncertain) {
  // Re P = w1^2 vanishes on the line w1 = 0 of the hyperboloid.
  PhiPolynomial p1;
  p1.add({0, 1, 0}, ComplexRational{Rational(1)});
  const auto c = classify(p1, p1);
  EXPECT_EQ(c.tag, ConditionTag::Uncertain);
}

TEST(Classify, NegativeLeadingPartIsNeither) {
  // Re P = 1 - 1e-10 w1^4 stays positive on the disc rho <= 5 but the quartic wins at infinity.
  PhiPolynomial p;
  p.add({0, 0, 0}, ComplexRational{Rational(1)});
  PhiPolynomial q;
  q.add({0, 0, 0}, ComplexRational{Rational(1)});
  q.add({0, 4, 0}, ComplexRational{Rational(-1) / Rational(10000000000LL)});
  const auto c = classify(p, q, {}, SamplingDomain{5.0, 50, 32});
  EXPECT_GT(c.infimum_re, 0.0);
  EXPECT_EQ(c.tag, ConditionTag::Neither);
}

TEST(Classify, RejectsUnreduced) {
  PhiPolynomial p;
  p.add({2, 0, 0}, ComplexRational{Rational(1)});
  EXPECT_THROW(classify(p, p), std::invalid_argument);
}

TEST(Classify, StableUnderToleranceScaling) {
  const auto yk = yukawa();
  const auto cex = parse_system("Q1 = 0; Q2 = v1^2", Masses{});
  const auto null = parse_system("Q1 = 0; Q2 = m1^2*v1^2 + w(1,0)^2 - w(1,1)^2 - w(1,2)^2", Masses{});
  for (double s : {0.5, 1.0, 2.0}) {
    const ClassifyTolerances tol{1e-12 * s, 1e-9 * s};
    EXPECT_EQ(classify(phi(yk, 1), phi(yk, 2), tol).tag, ConditionTag::PositiveB);
    EXPECT_EQ(classify(phi(cex, 1), phi(cex, 2), tol).tag, ConditionTag::Neither);
    EXPECT_EQ(classify(phi(null, 1), phi(null, 2), tol).tag, ConditionTag::NullA);
  }
}

TEST(Classify, ReportCarriesDiagnostics) {
  const auto sys = yukawa();
  const auto p1 = phi(sys, 1), p2 = phi(sys, 2);
  const auto j = classification_report(p1, p2, classify(p1, p2));
  EXPECT_EQ(j["tag"], "PositiveB");
  EXPECT_EQ(j["phi1"][0]["re"], "1/4");
  EXPECT_EQ(j["diagnostics"]["argmin_omega"].size(), 3u);
  EXPECT_DOUBLE_EQ(j["diagnostics"]["infimum_re"].get<double>(), 0.0625);
}

TEST(PeriodAverage, YukawaUnitAmplitudes) {
  const auto sys = yukawa();
  for (int i = 0; i < 10; ++i) {
    const cd a = period_average(sys, 1, {cd(1, 0), cd(1, 0)}, random_omega(3.0));
    EXPECT_NEAR(a.real(), 0.25, 1e-14);
    EXPECT_NEAR(a.imag(), 0.0, 1e-14);
  }
}

TEST(PeriodAverage, VanishesWithoutFirstAmplitude) {
  const auto sys = system_of(random_form(6), random_form(6));
  EXPECT_LE(std::abs(period_average(sys, 2, {cd(0, 0), cd(0.3, -0.7)}, random_omega(2.0))), 1e-15);
}

TEST(PeriodAverage, MatchesPsiPredictionAndFineQuadrature) {
  for (int trial = 0; trial < 50; ++trial) {
    NonlinearSystem sys = system_of(random_form(6), random_form(6));
    sys.masses.m1 = Rational(static_cast<int>(uniform(1, 5)), 2);
    sys.masses.m2 = 2 * sys.masses.m1;
    const std::array<cd, 2> alpha{cd(uniform(-1, 1), uniform(-1, 1)), cd(uniform(-1, 1), uniform(-1, 1))};
    const auto w = random_omega(2.0);
    for (int j = 1; j <= 2; ++j) {
      const cd avg = period_average(sys, j, alpha, w);
      const cd weight = j == 1 ? std::conj(alpha[0]) * alpha[1] : alpha[0] * alpha[0];
      const cd predicted = phi(sys, j).evaluate(w) * weight;
      // Brute force with 4096 nodes over one period in tau.
      const double m1 = sys.masses.m(1);
      const double period = 2 * std::numbers::pi / m1;
      cd brute{0, 0};
      for (int n = 0; n < 4096; ++n) {
        const double tau = period * n / 4096.0;
        FieldValues x;
        for (int k = 1; k <= 2; ++k) {
          const double mk = sys.masses.m(k);
          const cd e = alpha[k - 1] * std::polar(1.0, mk * tau);
          x.v[k - 1] = e.real();
          for (int a = 0; a < 3; ++a) x.w[k - 1][a] = w[a] * (cd(0, mk) * e).real();
        }
        brute += sys.q(j).evaluate(x) * std::polar(1.0, -j * m1 * tau);
      }
      brute /= 4096.0;
      EXPECT_LE(std::abs(avg - predicted), 1e-12 * (1 + std::abs(predicted)));
      EXPECT_LE(std::abs(brute - predicted), 1e-12 * (1 + std::abs(predicted)));
    }
  }
}

TEST(PhiPolynomialText, RoundTripShapes) {
  PhiPolynomial p;
  p.add({1, 0, 0}, ComplexRational{Rational(1, 2), Rational(-3)});
  EXPECT_EQ(p.to_string(), "(1/2 - 3i)*w0");
  EXPECT_EQ(PhiPolynomial{}.to_string(), "0");
  EXPECT_EQ(p.degree(), 1);
  EXPECT_EQ(p.homogeneous_part(0), PhiPolynomial{});
  EXPECT_EQ(p.real_part().coefficient({1, 0, 0}), ComplexRational{Rational(1, 2)});
  EXPECT_EQ(p.imag_part().coefficient({1, 0, 0}), ComplexRational{Rational(-3)});
}
