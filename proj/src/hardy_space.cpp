#include "zetalab/hardy_space.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>

#include "zetalab/kernels.hpp"
#include "zetalab/quadrature.hpp"

namespace zetalab::hardy {
namespace {

void check_radius(double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("HardyElement: radius must be positive");
}

// c_m = beta_m / m!
void taylor_of_F(const std::vector<cplx>& beta, std::vector<double>& re, std::vector<double>& im) {
  re.resize(beta.size());
  im.resize(beta.size());
  double inv_fact = 1.0;
  for (std::size_t m = 0; m < beta.size(); ++m) {
    if (m > 0) inv_fact /= static_cast<double>(m);
    re[m] = beta[m].real() * inv_fact;
    im[m] = beta[m].imag() * inv_fact;
  }
}

}  // namespace

HardyElement::HardyElement(double r, std::vector<cplx> c) : radius(r), coeffs(std::move(c)) {
  check_radius(r);
}

cplx HardyElement::operator()(cplx s) const {
  cplx acc = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * s + coeffs[k];
  return acc;
}

std::vector<cplx> HardyElement::scaled() const {
  std::vector<cplx> out(coeffs.size());
  double rn = 1.0;
  for (std::size_t n = 0; n < coeffs.size(); ++n) {
    out[n] = coeffs[n] * rn;
    rn *= radius;
  }
  return out;
}

HardyElement HardyElement::from_scaled(double r, const std::vector<cplx>& scaled) {
  check_radius(r);
  std::vector<cplx> c(scaled.size());
  double rn = 1.0;
  for (std::size_t n = 0; n < scaled.size(); ++n) {
    c[n] = scaled[n] / rn;
    rn *= r;
  }
  return HardyElement(r, std::move(c));
}

HardyElement& HardyElement::operator+=(const HardyElement& g) {
  if (g.coeffs.size() > coeffs.size()) coeffs.resize(g.coeffs.size());
  for (std::size_t n = 0; n < g.coeffs.size(); ++n) coeffs[n] += g.coeffs[n];
  return *this;
}

HardyElement& HardyElement::operator-=(const HardyElement& g) {
  if (g.coeffs.size() > coeffs.size()) coeffs.resize(g.coeffs.size());
  for (std::size_t n = 0; n < g.coeffs.size(); ++n) coeffs[n] -= g.coeffs[n];
  return *this;
}

HardyElement& HardyElement::operator*=(cplx a) {
  for (auto& c : coeffs) c *= a;
  return *this;
}

HardyElement operator+(HardyElement f, const HardyElement& g) { return f += g; }
HardyElement operator-(HardyElement f, const HardyElement& g) { return f -= g; }
HardyElement operator*(cplx a, HardyElement f) { return f *= a; }

double norm_sq(const HardyElement& f) {
  const auto a = f.scaled();
  double s = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) s += std::norm(a[n]) / static_cast<double>(n + 1);
  return kPi * f.radius * f.radius * s;
}

double inner(const HardyElement& f, const HardyElement& g) {
  if (std::fabs(f.radius - g.radius) > 1e-15 * std::max(f.radius, g.radius))
    throw DomainError("inner: radius mismatch");
  const auto a = f.scaled();
  const auto b = g.scaled();
  const std::size_t n_common = std::min(a.size(), b.size());
  double s = 0.0;
  for (std::size_t n = 0; n < n_common; ++n)
    s += (a[n] * std::conj(b[n])).real() / static_cast<double>(n + 1);
  return kPi * f.radius * f.radius * s;
}

std::vector<cplx> beta_coeffs(const HardyElement& f) {
  auto b = f.scaled();
  for (std::size_t n = 0; n < b.size(); ++n) {
    b[n] = std::conj(b[n]) / static_cast<double>(n + 1);
    if (n % 2 == 1) b[n] = -b[n];
  }
  return b;
}

SeriesValue entire_F(const std::vector<cplx>& beta, double u, std::size_t cut) {
  cut = std::min(cut, beta.size());
  SeriesValue out;
  double term = 1.0;  // |u|^m / m!
  double head = 0.0;
  cplx acc = 0.0;
  double power = 1.0;  // u^m / m! with sign
  for (std::size_t m = 0; m < cut; ++m) {
    if (m > 0) {
      power *= u / static_cast<double>(m);
      term *= std::fabs(u) / static_cast<double>(m);
    }
    acc += beta[m] * power;
    head += term;
  }
  out.value = acc;
  if (cut < beta.size()) {
    double sup = 0.0;
    for (std::size_t m = cut; m < beta.size(); ++m) sup = std::max(sup, std::abs(beta[m]));
    out.remainder = sup * std::max(0.0, std::exp(std::fabs(u)) - head);
  }
  return out;
}

cplx delta_x(const HardyElement& f, double x) {
  if (!(x >= 0.0)) throw DomainError("delta_x: x must be nonnegative");
  const double R = f.radius;
  return kPi * R * R * std::exp(-0.75 * x) * entire_F(beta_coeffs(f), x * R).value;
}

std::vector<cplx> delta_x_many(const HardyElement& f, const std::vector<double>& x) {
  std::vector<double> cr, ci;
  taylor_of_F(beta_coeffs(f), cr, ci);
  const double R = f.radius;
  std::vector<double> u(x.size()), vr(x.size()), vi(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!(x[j] >= 0.0)) throw DomainError("delta_x: x must be nonnegative");
    u[j] = x[j] * R;
  }
  simd::horner_real(cr, ci, u, vr, vi);
  std::vector<cplx> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j)
    out[j] = kPi * R * R * std::exp(-0.75 * x[j]) * cplx(vr[j], vi[j]);
  return out;
}

cplx delta_x_quadrature(const HardyElement& f, double x, std::size_t nr, std::size_t nphi) {
  const auto rule = quad::disc_rule(0.0, f.radius, nr, nphi);
  cplx acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const cplx s = rule.nodes[i];
    acc += rule.weights[i] * std::exp(-x * (s + 0.75)) * std::conj(f(s));
  }
  return acc;
}

HardyElement eta_element(std::uint64_t p, double theta, double radius, std::size_t degree) {
  const double L = std::log(static_cast<double>(p));
  std::vector<cplx> c(degree + 1);
  cplx term = -unit_phase(theta) * std::pow(static_cast<double>(p), -0.75);
  for (std::size_t n = 0; n <= degree; ++n) {
    c[n] = term;
    term *= -L / static_cast<double>(n + 1);
  }
  return HardyElement(radius, std::move(c));
}

double eta_inner(std::uint64_t p, double theta, const HardyElement& f) {
  return (-unit_phase(theta) * delta_x(f, std::log(static_cast<double>(p)))).real();
}

double eta_norm_sq(std::uint64_t p, double radius) {
  const double z = std::log(static_cast<double>(p)) * radius;
  const double z2 = z * z;
  double term = 1.0;  // z^{2n} / (n! (n+1)!)
  double sum = 0.0;
  for (int n = 0; n < 400; ++n) {
    sum += term;
    term *= z2 / (static_cast<double>(n + 1) * static_cast<double>(n + 2));
    if (term < 1e-18 * sum) break;
  }
  return std::pow(static_cast<double>(p), -1.5) * kPi * radius * radius * sum;
}

double optimal_phase(std::uint64_t p, const HardyElement& f) {
  const cplx d = delta_x(f, std::log(static_cast<double>(p)));
  return frac(0.5 - std::arg(d) / kTwoPi);
}

std::vector<Peak> peak_scan(const HardyElement& f, double delta, double u_max, double step) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("peak_scan: need 0 < delta < 1");
  if (!(step > 0.0) || !(u_max >= 0.0)) throw DomainError("peak_scan: bad grid");
  const auto beta = beta_coeffs(f);
  std::vector<Peak> out;
  const auto count = static_cast<std::size_t>(std::floor(u_max / step + 1e-9));
  for (std::size_t k = 0; k <= count; ++k) {
    const double u = static_cast<double>(k) * step;
    const double a = std::abs(entire_F(beta, u).value);
    const double floor = std::exp(-(1.0 + 2.0 * delta) * u);
    if (a > floor) out.push_back({u, a, a - floor});
  }
  return out;
}

std::string to_json(const HardyElement& f) {
  nlohmann::json j;
  j["radius"] = f.radius;
  auto& arr = j["coeffs"] = nlohmann::json::array();
  for (const auto& c : f.coeffs) arr.push_back({c.real(), c.imag()});
  return j.dump();
}

HardyElement from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  std::vector<cplx> c;
  for (const auto& e : j.at("coeffs")) c.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
  return HardyElement(j.at("radius").get<double>(), std::move(c));
}

}  // namespace zetalab::hardy
