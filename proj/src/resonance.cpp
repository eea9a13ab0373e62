#include "kgres/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace kgres {

PhiPolynomial PhiPolynomial::constant(const ComplexRational& c) {
  PhiPolynomial p;
  p.add({0, 0, 0}, c);
  return p;
}

ComplexRational PhiPolynomial::coefficient(const OmegaMonomial& m) const {
  auto it = coeffs_.find(m);
  return it == coeffs_.end() ? ComplexRational{} : it->second;
}

int PhiPolynomial::degree() const {
  int d = -1;
  for (const auto& [m, c] : coeffs_) d = std::max(d, m[0] + m[1] + m[2]);
  return d;
}

bool PhiPolynomial::is_reduced() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](const auto& kv) { return kv.first[0] <= 1; });
}

void PhiPolynomial::add(const OmegaMonomial& m, const ComplexRational& c) {
  if (c.is_zero()) return;
  auto& slot = coeffs_[m];
  slot += c;
  if (slot.is_zero()) coeffs_.erase(m);
}

PhiPolynomial PhiPolynomial::reduced() const {
  // Repeatedly replace w0^2 by 1 + w1^2 + w2^2 until every w0 exponent is at most one.
  PhiPolynomial current = *this;
  while (!current.is_reduced()) {
    PhiPolynomial next;
    for (const auto& [m, c] : current.coeffs_) {
      if (m[0] <= 1) {
        next.add(m, c);
        continue;
      }
      const int e0 = m[0] - 2;
      next.add({e0, m[1], m[2]}, c);
      next.add({e0, m[1] + 2, m[2]}, c);
      next.add({e0, m[1], m[2] + 2}, c);
    }
    current = std::move(next);
  }
  return current;
}

PhiPolynomial PhiPolynomial::real_part() const {
  PhiPolynomial p;
  for (const auto& [m, c] : coeffs_) p.add(m, ComplexRational{c.re});
  return p;
}

PhiPolynomial PhiPolynomial::imag_part() const {
  PhiPolynomial p;
  for (const auto& [m, c] : coeffs_) p.add(m, ComplexRational{c.im});
  return p;
}

PhiPolynomial PhiPolynomial::homogeneous_part(int d) const {
  PhiPolynomial p;
  for (const auto& [m, c] : coeffs_) {
    if (m[0] + m[1] + m[2] == d) p.add(m, c);
  }
  return p;
}

std::complex<double> PhiPolynomial::evaluate(double w0, double w1, double w2) const {
  std::complex<double> sum{0.0, 0.0};
  for (const auto& [m, c] : coeffs_) {
    sum += c.to_complex() * (std::pow(w0, m[0]) * std::pow(w1, m[1]) * std::pow(w2, m[2]));
  }
  return sum;
}

std::complex<double> PhiPolynomial::evaluate(const HyperboloidPoint& w) const { return evaluate(w.w0, w.w1, w.w2); }

std::string PhiPolynomial::to_string() const {
  if (coeffs_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : coeffs_) {
    if (!first) os << " + ";
    first = false;
    os << "(" << kgres::to_string(c.re);
    if (c.im != 0) os << (c.im < 0 ? " - " : " + ") << kgres::to_string(c.im < 0 ? Rational(-c.im) : c.im) << "i";
    os << ")";
    for (int a = 0; a < 3; ++a) {
      if (m[a] == 1) os << "*w" << a;
      else if (m[a] > 1) os << "*w" << a << "^" << m[a];
    }
  }
  return os.str();
}

nlohmann::json PhiPolynomial::to_json() const {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [m, c] : coeffs_) {
    terms.push_back({{"exponents", {m[0], m[1], m[2]}},
                     {"re", kgres::to_string(c.re)},
                     {"im", kgres::to_string(c.im)},
                     {"re_value", to_double(c.re)},
                     {"im_value", to_double(c.im)}});
  }
  return terms;
}

PhiPolynomial operator+(const PhiPolynomial& a, const PhiPolynomial& b) {
  PhiPolynomial out = a;
  for (const auto& [m, c] : b.coeffs_) out.add(m, c);
  return out;
}

PhiPolynomial operator*(const PhiPolynomial& a, const PhiPolynomial& b) {
  PhiPolynomial out;
  for (const auto& [ma, ca] : a.coeffs_) {
    for (const auto& [mb, cb] : b.coeffs_) {
      out.add({ma[0] + mb[0], ma[1] + mb[1], ma[2] + mb[2]}, ca * cb);
    }
  }
  return out;
}

std::string PsiIndex::to_string() const {
  auto sign = [](int s) { return s > 0 ? '+' : '-'; };
  std::string out = "(";
  out += std::to_string(k1) + "," + std::to_string(k2) + "," + sign(s1) + "," + sign(s2) + ")";
  return out;
}

std::vector<PsiIndex> all_psi_indices() {
  std::vector<PsiIndex> out;
  for (int k1 = 1; k1 <= 2; ++k1) {
    for (int k2 = k1; k2 <= 2; ++k2) {
      for (int s1 : {1, -1}) {
        for (int s2 : {1, -1}) out.push_back({k1, k2, s1, s2});
      }
    }
  }
  return out;
}

namespace {

void require_index(int j) {
  if (j != 1 && j != 2) throw std::invalid_argument("equation index j must be 1 or 2, got " + std::to_string(j));
}

void require_resonant(const Masses& masses) {
  if (!masses.resonant()) {
    throw std::invalid_argument("resonance expansion requires m2 = 2 m1 (got m1 = " + to_string(masses.m1) +
                                ", m2 = " + to_string(masses.m2) + ")");
  }
}

// Coefficient of alpha^{(sigma)} e^{i sigma k m1 tau} in one factor.
// v_k = (alpha e + conj(alpha) conj(e))/2, omega_a d_tau v_k = omega_a (i m_k alpha e - i m_k conj(alpha) conj(e))/2.
PhiPolynomial factor_part(const Factor& f, const Masses& masses, int sigma) {
  const Rational half{Rational(1) / 2};
  if (f.kind == Factor::Kind::V) return PhiPolynomial::constant(ComplexRational{half});
  PhiPolynomial p;
  OmegaMonomial m{0, 0, 0};
  m[static_cast<std::size_t>(f.a)] = 1;
  const Rational im = masses.exact(f.k) * half * sigma;
  p.add(m, ComplexRational{Rational{0}, im});
  return p;
}

}  // namespace

std::map<PsiIndex, PhiPolynomial> psi_coefficients(const NonlinearSystem& system, int j) {
  require_index(j);
  require_resonant(system.masses);
  std::map<PsiIndex, PhiPolynomial> out;
  for (const auto& idx : all_psi_indices()) out[idx] = PhiPolynomial{};

  for (const auto& [key, coeff] : system.q(j).terms()) {
    Factor a = key.first;
    Factor b = key.second;
    if (a.k > b.k) std::swap(a, b);
    const ComplexRational c{coeff};
    for (int s1 : {1, -1}) {
      for (int s2 : {1, -1}) {
        PhiPolynomial contrib = factor_part(a, system.masses, s1) * factor_part(b, system.masses, s2);
        contrib = contrib * PhiPolynomial::constant(c);
        if (a.k == b.k && s1 != s2) {
          // |alpha_k|^2 arises from both mixed orders; share it equally.
          const PhiPolynomial half = contrib * PhiPolynomial::constant(ComplexRational{Rational(1) / 2});
          out[{a.k, b.k, 1, -1}] = out[{a.k, b.k, 1, -1}] + half;
          out[{a.k, b.k, -1, 1}] = out[{a.k, b.k, -1, 1}] + half;
        } else {
          out[{a.k, b.k, s1, s2}] = out[{a.k, b.k, s1, s2}] + contrib;
        }
      }
    }
  }
  for (auto& [idx, p] : out) p = p.reduced();
  return out;
}

std::set<PsiIndex> resonant_selection(int j) {
  require_index(j);
  std::set<PsiIndex> out;
  for (const auto& idx : all_psi_indices()) {
    if (idx.frequency() == j) out.insert(idx);
  }
  return out;
}

PhiPolynomial phi(const NonlinearSystem& system, int j) {
  const auto psi = psi_coefficients(system, j);
  PhiPolynomial out;
  for (const auto& idx : resonant_selection(j)) out = out + psi.at(idx);
  return out;
}

std::complex<double> phi_quadrature(const NonlinearSystem& system, int j, const HyperboloidPoint& w, int nodes) {
  require_index(j);
  if (nodes < 8) throw std::invalid_argument("phi_quadrature needs at least 8 nodes");
  std::complex<double> sum{0.0, 0.0};
  for (int n = 0; n < nodes; ++n) {
    const double theta = static_cast<double>(n) / nodes;
    const double q = circle_sample(system.q(j), system.masses, w, theta);
    sum += q * std::polar(1.0, -2.0 * std::numbers::pi * j * theta);
  }
  return sum / static_cast<double>(nodes);
}

std::complex<double> psi_expansion(const std::map<PsiIndex, PhiPolynomial>& psi, const HyperboloidPoint& w,
                                   std::array<std::complex<double>, 2> alpha, double phase) {
  std::complex<double> sum{0.0, 0.0};
  for (const auto& [idx, p] : psi) {
    if (p.is_zero()) continue;
    const auto a1 = idx.s1 > 0 ? alpha[idx.k1 - 1] : std::conj(alpha[idx.k1 - 1]);
    const auto a2 = idx.s2 > 0 ? alpha[idx.k2 - 1] : std::conj(alpha[idx.k2 - 1]);
    sum += p.evaluate(w) * a1 * a2 * std::polar(1.0, idx.frequency() * phase);
  }
  return sum;
}

std::complex<double> period_average(const NonlinearSystem& system, int j, std::array<std::complex<double>, 2> alpha,
                                    const HyperboloidPoint& w) {
  require_index(j);
  require_resonant(system.masses);
  // Integrand frequencies are bounded by 4 + j in units of m1, so 32 equispaced nodes are exact.
  constexpr int kNodes = 32;
  std::complex<double> sum{0.0, 0.0};
  for (int n = 0; n < kNodes; ++n) {
    const double phase = 2.0 * std::numbers::pi * n / kNodes;  // m1 * tau
    FieldValues x;
    for (int k = 1; k <= 2; ++k) {
      const auto e = alpha[k - 1] * std::polar(1.0, k * phase);
      const double mk = system.masses.m(k);
      x.v[k - 1] = e.real();
      const double dv = (std::complex<double>(0.0, mk) * e).real();
      for (int a = 0; a < 3; ++a) x.w[k - 1][a] = w[a] * dv;
    }
    sum += system.q(j).evaluate(x) * std::polar(1.0, -j * phase);
  }
  return sum / static_cast<double>(kNodes);
}

std::string to_string(ConditionTag tag) {
  switch (tag) {
    case ConditionTag::NullA: return "NullA";
    case ConditionTag::PositiveB: return "PositiveB";
    case ConditionTag::Neither: return "Neither";
    case ConditionTag::Uncertain: return "Uncertain";
  }
  return "Uncertain";
}

ConditionClass classify(const PhiPolynomial& phi1, const PhiPolynomial& phi2, const ClassifyTolerances& tol,
                        const SamplingDomain& domain) {
  if (!phi1.is_reduced() || !phi2.is_reduced()) {
    throw std::invalid_argument("classify expects polynomials reduced modulo w0^2 = 1 + w1^2 + w2^2");
  }
  if (domain.n_rho < 2 || domain.n_theta < 1 || !(domain.rho_max > 0.0)) {
    throw std::invalid_argument("classify: sampling domain needs n_rho >= 2, n_theta >= 1, rho_max > 0");
  }
  ConditionClass out;
  out.domain = domain;
  out.product = (phi1 * phi2).reduced();

  if (phi1.is_zero() && phi2.is_zero()) {
    out.tag = ConditionTag::NullA;
    out.reason = "both resonance coefficients vanish identically";
    out.im_identically_zero = true;
    return out;
  }

  const PhiPolynomial re = out.product.real_part();
  const PhiPolynomial im = out.product.imag_part();
  out.im_identically_zero = im.is_zero();
  out.top_degree = std::max(re.degree(), 0);

  // Interior sampling: rows in rho run in parallel, minima are combined in row order.
  const int nr = domain.n_rho;
  const int nt = domain.n_theta;
  std::vector<double> row_min(static_cast<std::size_t>(nr), std::numeric_limits<double>::infinity());
  std::vector<int> row_arg(static_cast<std::size_t>(nr), 0);
  std::vector<double> row_im(static_cast<std::size_t>(nr), 0.0);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < nr; ++i) {
    const double rho = domain.rho_max * i / (nr - 1);
    for (int t = 0; t < nt; ++t) {
      const double theta = 2.0 * std::numbers::pi * t / nt;
      const HyperboloidPoint w = omega_polar(rho, theta);
      const auto val = out.product.evaluate(w);
      if (val.real() < row_min[static_cast<std::size_t>(i)]) {
        row_min[static_cast<std::size_t>(i)] = val.real();
        row_arg[static_cast<std::size_t>(i)] = t;
      }
      row_im[static_cast<std::size_t>(i)] = std::max(row_im[static_cast<std::size_t>(i)], std::abs(val.imag()));
    }
  }
  out.infimum_re = std::numeric_limits<double>::infinity();
  for (int i = 0; i < nr; ++i) {
    out.max_abs_im = std::max(out.max_abs_im, row_im[static_cast<std::size_t>(i)]);
    if (row_min[static_cast<std::size_t>(i)] < out.infimum_re) {
      out.infimum_re = row_min[static_cast<std::size_t>(i)];
      out.argmin = omega_polar(domain.rho_max * i / (nr - 1),
                               2.0 * std::numbers::pi * row_arg[static_cast<std::size_t>(i)] / nt);
    }
  }

  // Top-degree part of Re P along the light-cone directions (1, -cos, -sin).
  const PhiPolynomial top = re.homogeneous_part(re.degree());
  out.asymptotic_min = std::numeric_limits<double>::infinity();
  for (int t = 0; t < nt; ++t) {
    const double theta = 2.0 * std::numbers::pi * t / nt;
    out.asymptotic_min = std::min(out.asymptotic_min, top.evaluate(1.0, -std::cos(theta), -std::sin(theta)).real());
  }
  if (re.is_zero()) out.asymptotic_min = 0.0;

  if (out.product.is_zero()) {
    out.tag = ConditionTag::Neither;
    out.reason = "Phi1 Phi2 vanishes identically while one coefficient does not";
  } else if (!out.im_identically_zero) {
    out.tag = ConditionTag::Neither;
    out.reason = "Im(Phi1 Phi2) is not identically zero";
  } else if (out.infimum_re < -tol.pos_tol) {
    out.tag = ConditionTag::Neither;
    out.reason = "Re(Phi1 Phi2) takes negative values";
  } else if (out.infimum_re <= tol.pos_tol) {
    out.tag = ConditionTag::Uncertain;
    out.reason = "sampled infimum of Re(Phi1 Phi2) is within pos_tol of zero";
  } else if (out.asymptotic_min < -tol.zero_tol) {
    out.tag = ConditionTag::Neither;
    out.reason = "leading homogeneous part of Re(Phi1 Phi2) is negative along the light cone";
  } else {
    out.tag = ConditionTag::PositiveB;
    out.reason = "Im vanishes exactly, sampled Re is positive and the leading part is nonnegative";
  }
  return out;
}

nlohmann::json classification_report(const PhiPolynomial& phi1, const PhiPolynomial& phi2, const ConditionClass& c) {
  return {{"phi1", phi1.to_json()},
          {"phi2", phi2.to_json()},
          {"phi1_text", phi1.to_string()},
          {"phi2_text", phi2.to_string()},
          {"product", c.product.to_json()},
          {"tag", to_string(c.tag)},
          {"reason", c.reason},
          {"diagnostics",
           {{"infimum_re", c.tag == ConditionTag::NullA ? 0.0 : c.infimum_re},
            {"argmin_omega", {c.argmin.w0, c.argmin.w1, c.argmin.w2}},
            {"max_abs_im", c.max_abs_im},
            {"im_identically_zero", c.im_identically_zero},
            {"asymptotic_min", c.asymptotic_min},
            {"top_degree", c.top_degree},
            {"domain", {{"rho_max", c.domain.rho_max}, {"n_rho", c.domain.n_rho}, {"n_theta", c.domain.n_theta}}}}}};
}

}  // namespace kgres
