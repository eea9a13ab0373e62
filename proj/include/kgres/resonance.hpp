#pragma once

#include <array>
#include <complex>
#include <map>
#include <set>
#include <string>

#include <json.hpp>

#include "kgres/hyperbolic.hpp"
#include "kgres/quadratic_form.hpp"
#include "kgres/rational.hpp"

namespace kgres {

/// Exponents (e0, e1, e2) of omega_0^e0 omega_1^e1 omega_2^e2.
using OmegaMonomial = std::array<int, 3>;

/// Polynomial in (omega_0, omega_1, omega_2) with Gaussian-rational coefficients.
class PhiPolynomial {
 public:
  PhiPolynomial() = default;
  static PhiPolynomial constant(const ComplexRational& c);

  [[nodiscard]] const std::map<OmegaMonomial, ComplexRational>& coefficients() const { return coeffs_; }
  [[nodiscard]] ComplexRational coefficient(const OmegaMonomial& m) const;
  [[nodiscard]] bool is_zero() const { return coeffs_.empty(); }
  [[nodiscard]] int degree() const;
  /// omega_0-degree at most one.
  [[nodiscard]] bool is_reduced() const;

  void add(const OmegaMonomial& m, const ComplexRational& c);

  /// Reduces modulo omega_0^2 = 1 + omega_1^2 + omega_2^2.
  [[nodiscard]] PhiPolynomial reduced() const;
  [[nodiscard]] PhiPolynomial real_part() const;
  [[nodiscard]] PhiPolynomial imag_part() const;
  [[nodiscard]] PhiPolynomial homogeneous_part(int degree) const;

  [[nodiscard]] std::complex<double> evaluate(const HyperboloidPoint& w) const;
  [[nodiscard]] std::complex<double> evaluate(double w0, double w1, double w2) const;

  [[nodiscard]] std::string to_string() const;
  [[nodiscard]] nlohmann::json to_json() const;

  friend PhiPolynomial operator+(const PhiPolynomial& a, const PhiPolynomial& b);
  friend PhiPolynomial operator*(const PhiPolynomial& a, const PhiPolynomial& b);
  friend bool operator==(const PhiPolynomial&, const PhiPolynomial&) = default;

 private:
  std::map<OmegaMonomial, ComplexRational> coeffs_;
};

/// Index (k1, k2, sigma1, sigma2) of alpha_{k1}^{(sigma1)} alpha_{k2}^{(sigma2)}; sigma = +1 or -1.
struct PsiIndex {
  int k1 = 1;
  int k2 = 1;
  int s1 = 1;
  int s2 = 1;

  [[nodiscard]] int frequency() const { return s1 * k1 + s2 * k2; }
  [[nodiscard]] std::string to_string() const;
  friend auto operator<=>(const PsiIndex&, const PsiIndex&) = default;
};

/// All twelve tuples with 1 <= k1 <= k2 <= 2.
std::vector<PsiIndex> all_psi_indices();

/// Exact coefficients of Q_j(v, omega d_tau v) with v_k = Re(alpha_k e^{i m_k tau}) in the
/// basis alpha_{k1}^{(s1)} alpha_{k2}^{(s2)} e^{i(s1 k1 + s2 k2) m1 tau}. When k1 == k2 the
/// mixed monomial |alpha_k|^2 is split evenly between (+,-) and (-,+).
/// Throws std::invalid_argument for non-resonant masses or j outside {1, 2}.
std::map<PsiIndex, PhiPolynomial> psi_coefficients(const NonlinearSystem& system, int j);

/// Index tuples with j = s1 k1 + s2 k2.
std::set<PsiIndex> resonant_selection(int j);

/// Resonance coefficient Phi_j, reduced on the hyperboloid.
PhiPolynomial phi(const NonlinearSystem& system, int j);

/// Independent check: trapezoid quadrature of int_0^1 Q_j(V, W) e^{-2 pi i j theta} d theta.
std::complex<double> phi_quadrature(const NonlinearSystem& system, int j, const HyperboloidPoint& w,
                                    int nodes = 1024);

/// Sum of the psi expansion at fixed alpha and phase tau (times m1): reconstructs Q_j.
std::complex<double> psi_expansion(const std::map<PsiIndex, PhiPolynomial>& psi, const HyperboloidPoint& w,
                                   std::array<std::complex<double>, 2> alpha, double phase);

/// Period average (m1/2pi) int e^{-i j m1 tau} Q_j(v, omega d_tau v) d tau for frozen alpha.
/// Evaluated by a trapezoid rule with enough nodes to be exact for the trigonometric integrand.
std::complex<double> period_average(const NonlinearSystem& system, int j, std::array<std::complex<double>, 2> alpha,
                                    const HyperboloidPoint& w);

enum class ConditionTag { NullA, PositiveB, Neither, Uncertain };

std::string to_string(ConditionTag tag);

struct ClassifyTolerances {
  double zero_tol = 1e-12;
  double pos_tol = 1e-9;
};

struct SamplingDomain {
  double rho_max = 10.0;
  int n_rho = 200;
  int n_theta = 128;
};

struct ConditionClass {
  ConditionTag tag = ConditionTag::Uncertain;
  std::string reason;
  double infimum_re = 0.0;        // sampled inf of Re(Phi1 Phi2)
  HyperboloidPoint argmin{};      // where it was attained
  double max_abs_im = 0.0;        // sampled max |Im(Phi1 Phi2)|
  double asymptotic_min = 0.0;    // min of the top-degree part of Re P on the light-cone circle
  int top_degree = 0;
  bool im_identically_zero = false;
  PhiPolynomial product;          // reduced Phi1 Phi2
  SamplingDomain domain;
};

/// Classifies a pair of reduced resonance coefficients. Throws std::invalid_argument if
/// either polynomial is not reduced.
ConditionClass classify(const PhiPolynomial& phi1, const PhiPolynomial& phi2, const ClassifyTolerances& tol = {},
                        const SamplingDomain& domain = {});

/// JSON report with reduced coefficient lists, tag and diagnostics.
nlohmann::json classification_report(const PhiPolynomial& phi1, const PhiPolynomial& phi2, const ConditionClass& c);

}  // namespace kgres
