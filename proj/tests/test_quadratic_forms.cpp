#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "kgres/quadratic_form.hpp"
#include "test_util.hpp"

using namespace kgres;
using kgres::testing::random_form;
using kgres::testing::random_omega;
using kgres::testing::random_values;
using kgres::testing::uniform;

TEST(MakeForm, YukawaFirstEquation) {
  const auto q = make_form({{Factor::v(1), Factor::v(2), Rational(1)}});
  ASSERT_EQ(q.terms().size(), 1u);
  EXPECT_EQ(q.terms().begin()->first, (QuadraticForm::Key{Factor::v(1), Factor::v(2)}));
  EXPECT_EQ(q.terms().begin()->second, Rational(1));
  EXPECT_EQ(q.to_string(), "v1*v2");
}

TEST(MakeForm, EmptyIsZeroEverywhere) {
  const auto q = make_form(std::initializer_list<FormTerm>{});
  EXPECT_TRUE(q.is_zero());
  for (int i = 0; i < 20; ++i) EXPECT_EQ(q.evaluate(random_values()), 0.0);
}

TEST(MakeForm, MergesRepeatedPairs) {
  const auto q = make_form({{Factor::v(1), Factor::v(1), Rational(1)}, {Factor::v(1), Factor::v(1), Rational(2)}});
  ASSERT_EQ(q.terms().size(), 1u);
  EXPECT_EQ(q.terms().begin()->second, Rational(3));
}

TEST(MakeForm, SwappedPairsMergeAndCancel) {
  const auto a = make_form({{Factor::v(2), Factor::w(1, 2), Rational(5, 3)}});
  const auto b = make_form({{Factor::w(1, 2), Factor::v(2), Rational(5, 3)}});
  EXPECT_EQ(a, b);
  const auto zero = make_form({{Factor::v(2), Factor::w(1, 2), Rational(1)}, {Factor::w(1, 2), Factor::v(2), Rational(-1)}});
  EXPECT_TRUE(zero.is_zero());
}

TEST(MakeForm, RejectsInvalidIndexWithLocation) {
  try {
    make_form({{Factor::v(1), Factor::v(1), Rational(1)}, {Factor::v(3), Factor::v(1), Rational(1)}});
    FAIL() << "expected rejection";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("term 1"), std::string::npos) << e.what();
  }
  EXPECT_THROW(make_form({{Factor::w(1, 3), Factor::v(1), Rational(1)}}), std::invalid_argument);
  EXPECT_THROW(make_form({{Factor{Factor::Kind::V, 1, 1}, Factor::v(1), Rational(1)}}), std::invalid_argument);
}

TEST(Evaluate, DirectProducts) {
  FieldValues x;
  x.v = {1.0, 2.0};
  EXPECT_EQ(make_form({{Factor::v(1), Factor::v(2), Rational(1)}}).evaluate(x), 2.0);
  x.v = {3.0, 0.0};
  EXPECT_EQ(make_form({{Factor::v(1), Factor::v(1), Rational(1)}}).evaluate(x), 9.0);
}

TEST(Evaluate, HomogeneityAtFixedLambda) {
  const double lambda = 0.37;
  for (int i = 0; i < 200; ++i) {
    const auto q = random_form();
    const auto x = random_values();
    FieldValues y = x;
    for (auto& v : y.v) v *= lambda;
    for (auto& row : y.w) {
      for (auto& v : row) v *= lambda;
    }
    const double base = q.evaluate(x);
    EXPECT_NEAR(q.evaluate(y), lambda * lambda * base, 1e-14 * (1.0 + std::abs(base)));
  }
}

TEST(Evaluate, HomogeneityAcrossScales) {
  for (int i = 0; i < 100; ++i) {
    const auto q = random_form();
    const auto x = random_values();
    const double lambda = std::exp(uniform(-5, 5));
    FieldValues y = x;
    for (auto& v : y.v) v *= lambda;
    for (auto& row : y.w) {
      for (auto& v : row) v *= lambda;
    }
    const double base = q.evaluate(x);
    EXPECT_NEAR(q.evaluate(y), lambda * lambda * base, 1e-13 * lambda * lambda * (1.0 + std::abs(base)));
  }
}

TEST(Evaluate, SymmetricUnderFactorSwap) {
  for (int i = 0; i < 100; ++i) {
    std::vector<FormTerm> terms, swapped;
    for (int t = 0; t < 4; ++t) {
      const Factor a = kgres::testing::random_factor();
      const Factor b = kgres::testing::random_factor();
      const Rational c(static_cast<int>(uniform(-9, 10)), 4);
      terms.push_back({a, b, c});
      swapped.push_back({b, a, c});
    }
    EXPECT_EQ(make_form(terms), make_form(swapped));
  }
}

TEST(QuadraticPart, DropsCubicTerms) {
  const auto f = parse_polynomial("v1*v2 + v1^3", Masses{});
  EXPECT_EQ(quadratic_part(f), make_form({{Factor::v(1), Factor::v(2), Rational(1)}}));
}

TEST(QuadraticPart, KeepsPureQuadratic) {
  const auto f = parse_polynomial("v1^2", Masses{});
  EXPECT_EQ(quadratic_part(f), make_form({{Factor::v(1), Factor::v(1), Rational(1)}}));
}

TEST(QuadraticPart, MatchesScaledLimit) {
  const auto f = parse_polynomial("v1*w(2,0) + v1^2*v2", Masses{});
  const auto q = quadratic_part(f);
  EXPECT_EQ(q, make_form({{Factor::v(1), Factor::w(2, 0), Rational(1)}}));
  // lambda^-2 F(lambda x) computed straight from the monomials.
  for (int i = 0; i < 20; ++i) {
    const auto x = random_values();
    const double exact = q.evaluate(x);
    if (std::abs(exact) < 1e-3) continue;
    for (double lambda : {1e-4, 1e-5, 1e-6}) {
      double F = 0.0;
      for (const auto& term : f) {
        double m = to_double(term.coefficient);
        for (const auto& fac : term.factors) m *= lambda * x[fac];
        F += m;
      }
      EXPECT_NEAR(F / (lambda * lambda), exact, 1e-3 * std::abs(exact));
      EXPECT_LE(std::abs(F / (lambda * lambda) - exact), 20.0 * lambda * (1.0 + std::abs(exact)));
    }
  }
}

TEST(QuadraticPart, RejectsLowDegree) {
  EXPECT_THROW(quadratic_part(parse_polynomial("v1 + v1^2", Masses{})), std::invalid_argument);
  EXPECT_THROW(quadratic_part(parse_polynomial("1 + v1^2", Masses{})), std::invalid_argument);
  EXPECT_THROW(quadratic_part(parse_polynomial("w(1,1)", Masses{})), std::invalid_argument);
}

TEST(CircleSample, YukawaAtZeroPhase) {
  const auto q = make_form({{Factor::v(1), Factor::v(2), Rational(1)}});
  for (int i = 0; i < 10; ++i) EXPECT_EQ(circle_sample(q, Masses{}, random_omega(3.0), 0.0), 1.0);
}

TEST(CircleSample, TimeDerivativeProductAtQuarterPhase) {
  const auto q = make_form({{Factor::w(1, 0), Factor::w(2, 0), Rational(1)}});
  EXPECT_NEAR(circle_sample(q, Masses{}, HyperboloidPoint{1, 0, 0}, 0.25), 0.0, 1e-15);
}

TEST(CircleSample, MatchesHandBuiltValues) {
  for (int i = 0; i < 200; ++i) {
    const auto q = random_form();
    const Masses masses{Rational(static_cast<int>(uniform(1, 5)), 3), Rational(0)};
    Masses m = masses;
    m.m2 = 2 * m.m1;
    const HyperboloidPoint w = random_omega(3.0);
    const double theta = uniform(0.0, 1.0);
    FieldValues x;
    for (int k = 1; k <= 2; ++k) {
      x.v[k - 1] = std::cos(2 * std::numbers::pi * k * theta);
      for (int a = 0; a < 3; ++a) x.w[k - 1][a] = -w[a] * m.m(k) * std::sin(2 * std::numbers::pi * k * theta);
    }
    double hand = 0.0;
    for (const auto& [key, c] : q.terms()) hand += to_double(c) * x[key.first] * x[key.second];
    EXPECT_NEAR(circle_sample(q, m, w, theta), hand, 1e-14 * (1.0 + std::abs(hand)));
  }
}

TEST(CircleSample, OnePeriodic) {
  for (int i = 0; i < 100; ++i) {
    const auto q = random_form();
    const auto w = random_omega(2.0);
    const double theta = uniform(0.0, 1.0);
    const double a = circle_sample(q, Masses{}, w, theta);
    EXPECT_NEAR(circle_sample(q, Masses{}, w, theta + 1.0), a, 1e-12 * (1.0 + std::abs(a)));
  }
}

TEST(NonlinearSystem, ResonanceIsExact) {
  NonlinearSystem s;
  EXPECT_TRUE(s.resonant());
  s.masses.m1 = parse_rational("0.1");
  s.masses.m2 = parse_rational("0.2");
  EXPECT_TRUE(s.resonant());
  s.masses.m2 = rational_from_double(0.2);  // the double nearest 0.2 is not exactly twice 1/10
  EXPECT_FALSE(s.resonant());
  s.masses.m2 = Rational(3, 2);
  s.masses.m1 = Rational(1);
  EXPECT_FALSE(s.resonant());
}

TEST(Parser, YukawaSystem) {
  const auto sys = parse_system("Q1 = v1*v2; Q2 = v1^2", Masses{});
  EXPECT_EQ(sys.q1, make_form({{Factor::v(1), Factor::v(2), Rational(1)}}));
  EXPECT_EQ(sys.q2, make_form({{Factor::v(1), Factor::v(1), Rational(1)}}));
}

TEST(Parser, AliasesMassesAndDerivatives) {
  const auto sys = parse_system("F1 = 0\nQ2 = m1^2*u1^2 + w(1,0)^2 - w(1,1)^2 - w(1,2)^2", Masses{});
  EXPECT_TRUE(sys.q1.is_zero());
  EXPECT_EQ(sys.q2, make_form({{Factor::v(1), Factor::v(1), Rational(1)},
                               {Factor::w(1, 0), Factor::w(1, 0), Rational(1)},
                               {Factor::w(1, 1), Factor::w(1, 1), Rational(-1)},
                               {Factor::w(1, 2), Factor::w(1, 2), Rational(-1)}}));
}

TEST(Parser, ExactRationalCoefficients) {
  const auto q = parse_form("0.1*v1*v2 + v2^2/3 - 2.5e-1*(v1 + w(2,1))*v1", Masses{});
  EXPECT_EQ(q, make_form({{Factor::v(1), Factor::v(2), Rational(1, 10)},
                          {Factor::v(2), Factor::v(2), Rational(1, 3)},
                          {Factor::v(1), Factor::v(1), Rational(-1, 4)},
                          {Factor::v(1), Factor::w(2, 1), Rational(-1, 4)}}));
}

TEST(Parser, FormTextRejectsNonQuadraticMonomials) {
  EXPECT_THROW(parse_system("Q1 = v1*v2 + v1^3", Masses{}), ParseError);
  EXPECT_THROW(parse_system("Q2 = v1", Masses{}), ParseError);
  // F text keeps the quadratic part and drops the cubic term.
  EXPECT_EQ(parse_system("F1 = v1*v2 + v1^3", Masses{}).q1, make_form({{Factor::v(1), Factor::v(2), Rational(1)}}));
}

TEST(Parser, ReportsColumn) {
  try {
    parse_system("Q1 = v1*v2; Q2 = v1*x3", Masses{});
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 20u) << e.what();
  }
  EXPECT_THROW(parse_system("Q3 = v1^2", Masses{}), ParseError);
  EXPECT_THROW(parse_system("Q1 = v1^2; Q1 = v2^2", Masses{}), ParseError);
  EXPECT_THROW(parse_system("Q1 = w(3,0)*v1", Masses{}), ParseError);
  EXPECT_THROW(parse_system("Q1 = v1*v2/v1", Masses{}), ParseError);
  EXPECT_THROW(parse_system("Q1 = (v1*v2", Masses{}), ParseError);
}
