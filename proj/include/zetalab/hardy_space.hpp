#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "zetalab/common.hpp"

namespace zetalab::hardy {

inline constexpr std::size_t kDefaultDegree = 64;

// f(s) = sum_n alpha_n s^n on |s| < R, truncated at degree coeffs.size()-1.
struct HardyElement {
  double radius = 1.0;
  std::vector<cplx> coeffs;

  HardyElement() = default;
  HardyElement(double r, std::vector<cplx> c);

  std::size_t degree() const { return coeffs.empty() ? 0 : coeffs.size() - 1; }
  cplx operator()(cplx s) const;
  // alpha_n R^n; the natural scale for everything computed on the disc.
  std::vector<cplx> scaled() const;
  static HardyElement from_scaled(double r, const std::vector<cplx>& scaled);

  HardyElement& operator+=(const HardyElement& g);
  HardyElement& operator-=(const HardyElement& g);
  HardyElement& operator*=(cplx a);
};

HardyElement operator+(HardyElement f, const HardyElement& g);
HardyElement operator-(HardyElement f, const HardyElement& g);
HardyElement operator*(cplx a, HardyElement f);

// pi sum |alpha_n|^2 R^{2n+2} / (n+1)
double norm_sq(const HardyElement& f);
// Re of the disc integral of f conj(g). Radii must match.
double inner(const HardyElement& f, const HardyElement& g);

// beta_n = (-1)^n R^n conj(alpha_n) / (n+1)
std::vector<cplx> beta_coeffs(const HardyElement& f);

struct SeriesValue {
  cplx value;
  double remainder = 0.0;  // bound on the dropped terms
};

// F(u) = sum_{m < cut} beta_m u^m / m!. The remainder bound is
// max_{m >= cut} |beta_m| * sum_{m >= cut} |u|^m / m!.
SeriesValue entire_F(const std::vector<cplx>& beta, double u,
                     std::size_t cut = static_cast<std::size_t>(-1));

// Delta(x) = disc integral of e^{-x(s+3/4)} conj(f(s)) = pi R^2 e^{-3x/4} F(xR).
cplx delta_x(const HardyElement& f, double x);
// Many abscissae at once (vectorised Horner).
std::vector<cplx> delta_x_many(const HardyElement& f, const std::vector<double>& x);
// The defining integral by tensor Gauss-Legendre quadrature, for comparison.
cplx delta_x_quadrature(const HardyElement& f, double x, std::size_t nr = 48,
                        std::size_t nphi = 96);

// eta(s) = -e^{2 pi i theta} p^{-(s+3/4)} as a truncated power series.
HardyElement eta_element(std::uint64_t p, double theta, double radius,
                         std::size_t degree = kDefaultDegree);
// (eta, f) = Re[-e^{2 pi i theta} Delta_f(log p)].
double eta_inner(std::uint64_t p, double theta, const HardyElement& f);
// |eta|^2 = p^{-3/2} pi R^2 sum_n (LR)^{2n} / (n! (n+1)!), exact for the full series.
double eta_norm_sq(std::uint64_t p, double radius);
// Phase maximising eta_inner: frac(1/2 - arg Delta_f(log p) / 2pi).
double optimal_phase(std::uint64_t p, const HardyElement& f);

struct Peak {
  double u = 0.0;
  double abs_F = 0.0;
  double margin = 0.0;  // |F(u)| - e^{-(1+2 delta) u}
};

// Grid points u in [0, u_max] (step `step`) with |F(u)| > e^{-(1+2 delta) u}.
std::vector<Peak> peak_scan(const HardyElement& f, double delta, double u_max, double step);

std::string to_json(const HardyElement& f);
HardyElement from_json(const std::string& text);

}  // namespace zetalab::hardy
