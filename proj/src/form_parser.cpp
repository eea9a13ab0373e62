#include <cctype>
#include <map>

#include "kgres/quadratic_form.hpp"

namespace kgres {

namespace {

using Poly = std::map<std::vector<Factor>, Rational>;

Poly constant(const Rational& c) {
  Poly p;
  if (c != 0) p[{}] = c;
  return p;
}

void add_into(Poly& acc, const Poly& other, int sign) {
  for (const auto& [mono, c] : other) {
    acc[mono] += sign > 0 ? c : Rational(-c);
  }
  std::erase_if(acc, [](const auto& kv) { return kv.second == 0; });
}

Poly multiply(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [ma, ca] : a) {
    for (const auto& [mb, cb] : b) {
      std::vector<Factor> mono = ma;
      mono.insert(mono.end(), mb.begin(), mb.end());
      std::sort(mono.begin(), mono.end());
      out[mono] += ca * cb;
    }
  }
  std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
  return out;
}

// Recursive-descent parser over a single expression. Positions are offsets into the
// original text so errors point at the right column of a multi-statement input.
class ExprParser {
 public:
  ExprParser(std::string_view text, std::size_t offset, const Masses& masses)
      : text_(text), offset_(offset), masses_(masses) {}

  Poly parse() {
    Poly p = expression();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, offset_ + pos_); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  Poly expression() {
    Poly acc;
    int sign = 1;
    if (accept('-')) sign = -1;
    else accept('+');
    add_into(acc, term(), sign);
    while (true) {
      if (accept('+')) add_into(acc, term(), 1);
      else if (accept('-')) add_into(acc, term(), -1);
      else break;
    }
    return acc;
  }

  Poly term() {
    Poly acc = power();
    while (true) {
      if (accept('*')) {
        acc = multiply(acc, power());
      } else if (accept('/')) {
        const std::size_t at = pos_;
        Poly d = power();
        if (d.size() != 1 || !d.begin()->first.empty()) {
          pos_ = at;
          fail("division is only allowed by a nonzero constant");
        }
        acc = multiply(acc, constant(1 / d.begin()->second));
      } else {
        break;
      }
    }
    return acc;
  }

  Poly power() {
    Poly base = primary();
    if (accept('^')) {
      skip_space();
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (start == pos_) fail("expected integer exponent");
      const int e = std::stoi(std::string(text_.substr(start, pos_ - start)));
      if (e > 16) fail("exponent too large");
      Poly out = constant(1);
      for (int i = 0; i < e; ++i) out = multiply(out, base);
      return out;
    }
    return base;
  }

  int small_int() {
    skip_space();
    if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) fail("expected index");
    return text_[pos_++] - '0';
  }

  Poly primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Poly inner = expression();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
        std::size_t look = pos_ + 1;
        if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
        if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
          pos_ = look;
          while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        }
      }
      try {
        return constant(parse_rational(text_.substr(start, pos_ - start)));
      } catch (const std::invalid_argument& e) {
        pos_ = start;
        fail(e.what());
      }
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      const std::string_view ident = text_.substr(start, pos_ - start);
      if (ident == "v1" || ident == "u1") return {{{Factor::v(1)}, Rational{1}}};
      if (ident == "v2" || ident == "u2") return {{{Factor::v(2)}, Rational{1}}};
      if (ident == "m1") return constant(masses_.m1);
      if (ident == "m2") return constant(masses_.m2);
      if (ident == "w") {
        expect('(');
        const std::size_t k_at = pos_;
        const int k = small_int();
        expect(',');
        const std::size_t a_at = pos_;
        const int a = small_int();
        expect(')');
        if (k < 1 || k > 2) {
          pos_ = k_at;
          fail("component index must be 1 or 2");
        }
        if (a < 0 || a > 2) {
          pos_ = a_at;
          fail("derivative index must be 0, 1 or 2");
        }
        return {{{Factor::w(k, a)}, Rational{1}}};
      }
      pos_ = start;
      fail("unknown symbol '" + std::string(ident) + "'");
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  std::string_view text_;
  std::size_t offset_;
  const Masses& masses_;
  std::size_t pos_ = 0;
};

std::vector<PolyTerm> to_terms(const Poly& p) {
  std::vector<PolyTerm> out;
  out.reserve(p.size());
  for (const auto& [mono, c] : p) out.push_back({mono, c});
  return out;
}

QuadraticForm exactly_quadratic(const Poly& p, std::size_t position) {
  std::vector<FormTerm> terms;
  for (const auto& [mono, c] : p) {
    if (mono.size() != 2) {
      throw ParseError("monomial of degree " + std::to_string(mono.size()) +
                           " in a quadratic form; only degree-2 terms are allowed",
                       position);
    }
    terms.push_back({mono[0], mono[1], c});
  }
  return make_form(terms);
}

}  // namespace

std::vector<PolyTerm> parse_polynomial(std::string_view text, const Masses& masses) {
  return to_terms(ExprParser(text, 0, masses).parse());
}

QuadraticForm parse_form(std::string_view text, const Masses& masses) {
  return exactly_quadratic(ExprParser(text, 0, masses).parse(), 0);
}

NonlinearSystem parse_system(std::string_view text, const Masses& masses) {
  NonlinearSystem sys;
  sys.masses = masses;
  bool seen[2] = {false, false};
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find_first_of(";\n", start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view stmt = text.substr(start, end - start);
    std::size_t lead = 0;
    while (lead < stmt.size() && std::isspace(static_cast<unsigned char>(stmt[lead]))) ++lead;
    if (lead < stmt.size()) {
      const std::size_t at = start + lead;
      const auto eq = stmt.find('=');
      if (eq == std::string_view::npos) throw ParseError("expected 'Q1 = ...' or 'F1 = ...'", at);
      std::string_view lhs = stmt.substr(lead, eq - lead);
      while (!lhs.empty() && std::isspace(static_cast<unsigned char>(lhs.back()))) lhs.remove_suffix(1);
      if (lhs.size() != 2 || (lhs[0] != 'Q' && lhs[0] != 'F') || (lhs[1] != '1' && lhs[1] != '2')) {
        throw ParseError("left-hand side must be Q1, Q2, F1 or F2", at);
      }
      const int j = lhs[1] - '0';
      if (seen[j - 1]) throw ParseError("equation " + std::string(lhs) + " given twice", at);
      seen[j - 1] = true;
      const std::size_t rhs_at = start + eq + 1;
      const Poly p = ExprParser(stmt.substr(eq + 1), rhs_at, masses).parse();
      QuadraticForm q;
      if (lhs[0] == 'Q') {
        q = exactly_quadratic(p, rhs_at);
      } else {
        try {
          const auto terms = to_terms(p);
          q = quadratic_part(terms);
        } catch (const std::invalid_argument& e) {
          throw ParseError(e.what(), rhs_at);
        }
      }
      (j == 1 ? sys.q1 : sys.q2) = std::move(q);
    }
    if (end == text.size()) break;
    start = end + 1;
  }
  return sys;
}

}  // namespace kgres
