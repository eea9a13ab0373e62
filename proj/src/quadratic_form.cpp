#include "kgres/quadratic_form.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace kgres {

std::string Factor::name() const {
  if (kind == Kind::V) return "v" + std::to_string(k);
  return "w(" + std::to_string(k) + "," + std::to_string(a) + ")";
}

QuadraticForm make_form(std::span<const FormTerm> terms) {
  QuadraticForm q;
  std::size_t index = 0;
  for (const auto& term : terms) {
    for (const Factor& f : {term.first, term.second}) {
      if (!f.valid()) {
        throw std::invalid_argument("term " + std::to_string(index) + ": invalid factor index (k=" +
                                    std::to_string(f.k) + ", a=" + std::to_string(f.a) + ")");
      }
    }
    QuadraticForm::Key key = term.first <= term.second ? QuadraticForm::Key{term.first, term.second}
                                                       : QuadraticForm::Key{term.second, term.first};
    q.terms_[key] += term.coefficient;
    ++index;
  }
  std::erase_if(q.terms_, [](const auto& kv) { return kv.second == 0; });
  for (const auto& [key, c] : q.terms_) {
    q.real_terms_.emplace_back(key.first, key.second, to_double(c));
  }
  return q;
}

QuadraticForm make_form(std::initializer_list<FormTerm> terms) {
  return make_form(std::span<const FormTerm>(terms.begin(), terms.size()));
}

bool QuadraticForm::uses_time_derivative() const {
  for (const auto& [key, c] : terms_) {
    for (const Factor& f : {key.first, key.second}) {
      if (f.kind == Factor::Kind::W && f.a == 0) return true;
    }
  }
  return false;
}

bool QuadraticForm::uses_space_derivative() const {
  for (const auto& [key, c] : terms_) {
    for (const Factor& f : {key.first, key.second}) {
      if (f.kind == Factor::Kind::W && f.a != 0) return true;
    }
  }
  return false;
}

std::string QuadraticForm::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [key, c] : terms_) {
    const bool negative = c < 0;
    if (!first) os << (negative ? " - " : " + ");
    else if (negative) os << "-";
    const Rational mag = negative ? Rational(-c) : c;
    if (mag != 1) os << kgres::to_string(mag) << "*";
    if (key.first == key.second) {
      os << key.first.name() << "^2";
    } else {
      os << key.first.name() << "*" << key.second.name();
    }
    first = false;
  }
  return os.str();
}

double QuadraticForm::evaluate(const FieldValues& x) const {
  double sum = 0.0;
  for (const auto& [a, b, c] : real_terms_) sum += c * x[a] * x[b];
  return sum;
}

QuadraticForm quadratic_part(std::span<const PolyTerm> polynomial) {
  std::vector<FormTerm> quadratic;
  std::size_t index = 0;
  for (const auto& term : polynomial) {
    for (const Factor& f : term.factors) {
      if (!f.valid()) {
        throw std::invalid_argument("monomial " + std::to_string(index) + ": invalid factor " + f.name());
      }
    }
    if (term.coefficient != 0) {
      if (term.factors.size() < 2) {
        throw std::invalid_argument("monomial " + std::to_string(index) + " has degree " +
                                    std::to_string(term.factors.size()) +
                                    "; the nonlinearity must vanish to second order at the origin");
      }
      if (term.factors.size() == 2) {
        quadratic.push_back({term.factors[0], term.factors[1], term.coefficient});
      }
    }
    ++index;
  }
  return make_form(quadratic);
}

FieldValues circle_point(const Masses& masses, const HyperboloidPoint& omega, double theta) {
  FieldValues x;
  for (int k = 1; k <= 2; ++k) {
    const double phase = 2.0 * std::numbers::pi * k * theta;
    x.v[k - 1] = std::cos(phase);
    const double s = std::sin(phase);
    for (int a = 0; a < 3; ++a) x.w[k - 1][a] = -omega[a] * masses.m(k) * s;
  }
  return x;
}

double circle_sample(const QuadraticForm& q, const Masses& masses, const HyperboloidPoint& omega, double theta) {
  return q.evaluate(circle_point(masses, omega, theta));
}

}  // namespace kgres
