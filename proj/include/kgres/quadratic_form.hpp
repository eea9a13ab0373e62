#pragma once

#include <array>
#include <map>
#include <span>
#include <stdexcept>
#include <string_view>
#include <tuple>
#include <string>
#include <utility>
#include <vector>

#include "kgres/hyperbolic.hpp"
#include "kgres/rational.hpp"

namespace kgres {

/// One symbol of the semilinear alphabet: v_k (the field) or w_{k,a} (its a-th derivative).
struct Factor {
  enum class Kind { V, W };
  Kind kind = Kind::V;
  int k = 1;  // component, 1 or 2
  int a = 0;  // derivative index 0..2, only meaningful for W

  static constexpr Factor v(int k) { return {Kind::V, k, 0}; }
  static constexpr Factor w(int k, int a) { return {Kind::W, k, a}; }

  [[nodiscard]] bool valid() const {
    return (k == 1 || k == 2) && (kind == Kind::V ? a == 0 : (a >= 0 && a <= 2));
  }
  [[nodiscard]] std::string name() const;

  friend auto operator<=>(const Factor&, const Factor&) = default;
};

/// Values of (v, w) at a point: v_k and w_{k,a} = d_a u_k.
struct FieldValues {
  std::array<double, 2> v{};
  std::array<std::array<double, 3>, 2> w{};

  [[nodiscard]] double operator[](const Factor& f) const {
    return f.kind == Factor::Kind::V ? v[f.k - 1] : w[f.k - 1][f.a];
  }
};

struct FormTerm {
  Factor first;
  Factor second;
  Rational coefficient;
};

/// Symmetric homogeneous quadratic form in (v, w). Keys are canonically ordered pairs.
class QuadraticForm {
 public:
  using Key = std::pair<Factor, Factor>;

  QuadraticForm() = default;

  [[nodiscard]] const std::map<Key, Rational>& terms() const { return terms_; }
  [[nodiscard]] bool is_zero() const { return terms_.empty(); }
  [[nodiscard]] bool uses_time_derivative() const;
  [[nodiscard]] bool uses_space_derivative() const;
  [[nodiscard]] std::string to_string() const;

  [[nodiscard]] double evaluate(const FieldValues& x) const;

  friend bool operator==(const QuadraticForm&, const QuadraticForm&) = default;

 private:
  friend QuadraticForm make_form(std::span<const FormTerm> terms);
  std::map<Key, Rational> terms_;
  std::vector<std::tuple<Factor, Factor, double>> real_terms_;
};

/// Canonicalizes and merges terms. Throws std::invalid_argument naming the offending term.
QuadraticForm make_form(std::span<const FormTerm> terms);
QuadraticForm make_form(std::initializer_list<FormTerm> terms);

/// Monomial of a general polynomial nonlinearity F(v, w).
struct PolyTerm {
  std::vector<Factor> factors;
  Rational coefficient;
};

/// Degree-2 part of F. Rejects constant and linear terms; drops cubic and higher.
QuadraticForm quadratic_part(std::span<const PolyTerm> polynomial);

struct Masses {
  Rational m1{1};
  Rational m2{2};

  [[nodiscard]] bool resonant() const { return m2 == 2 * m1; }
  [[nodiscard]] double m(int k) const { return to_double(k == 1 ? m1 : m2); }
  [[nodiscard]] const Rational& exact(int k) const { return k == 1 ? m1 : m2; }
};

struct NonlinearSystem {
  QuadraticForm q1;
  QuadraticForm q2;
  Masses masses;

  [[nodiscard]] const QuadraticForm& q(int j) const { return j == 1 ? q1 : q2; }
  [[nodiscard]] bool resonant() const { return masses.resonant(); }
};

/// The free oscillation sample V(theta) = cos(2 pi k theta), W = -omega_a m_k sin(2 pi k theta).
FieldValues circle_point(const Masses& masses, const HyperboloidPoint& omega, double theta);

/// Q evaluated along the free oscillation at phase theta.
double circle_sample(const QuadraticForm& q, const Masses& masses, const HyperboloidPoint& omega, double theta);

// Text form, e.g. "Q1 = v1*v2; Q2 = v1^2" or "F2 = u1^2 + v1^3".

class ParseError : public std::invalid_argument {
 public:
  ParseError(const std::string& message, std::size_t position)
      : std::invalid_argument(message + " (at column " + std::to_string(position + 1) + ")"), position_(position) {}
  [[nodiscard]] std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Parses one polynomial expression in v1, v2, u1, u2 (aliases of v), w(k,a),
/// numeric constants and the symbols m1, m2 (replaced by the exact masses).
std::vector<PolyTerm> parse_polynomial(std::string_view text, const Masses& masses);

/// Parses a full nonlinearity description. "Qj = ..." must be exactly quadratic;
/// "Fj = ..." goes through quadratic_part. Unspecified equations default to zero.
NonlinearSystem parse_system(std::string_view text, const Masses& masses);

/// Parses a single right-hand side that must be exactly quadratic.
QuadraticForm parse_form(std::string_view text, const Masses& masses);

}  // namespace kgres
