#include "zetalab/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace zetalab::quad {
namespace {

GaussLegendre build(std::size_t n) {
  GaussLegendre g;
  g.nodes.resize(n);
  g.weights.resize(n);
  const double dn = static_cast<double>(n);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(kPi * (static_cast<double>(i) + 0.75) / (dn + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double dk = static_cast<double>(k);
        const double p2 = ((2.0 * dk - 1.0) * x * p1 - (dk - 1.0) * p0) / dk;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = dn * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    g.nodes[i] = -x;
    g.nodes[n - 1 - i] = x;
    g.weights[i] = w;
    g.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) g.nodes[n / 2] = 0.0;
  return g;
}

}  // namespace

const GaussLegendre& gauss_legendre(std::size_t n) {
  if (n == 0) throw DomainError("gauss_legendre: need n >= 1");
  static std::mutex mu;
  static std::map<std::size_t, std::unique_ptr<GaussLegendre>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussLegendre>(build(n));
  return *slot;
}

DiscRule disc_rule(cplx center, double radius, std::size_t nr, std::size_t nphi) {
  if (!(radius >= 0.0)) throw DomainError("disc_rule: negative radius");
  const auto& gr = gauss_legendre(nr);
  const auto& gp = gauss_legendre(nphi);
  DiscRule rule;
  rule.nodes.reserve(nr * nphi);
  rule.weights.reserve(nr * nphi);
  for (std::size_t i = 0; i < nr; ++i) {
    const double rho = 0.5 * radius * (gr.nodes[i] + 1.0);
    const double wr = 0.5 * radius * gr.weights[i] * rho;
    for (std::size_t j = 0; j < nphi; ++j) {
      const double phi = kPi * (gp.nodes[j] + 1.0);
      rule.nodes.push_back(center + std::polar(rho, phi));
      rule.weights.push_back(wr * kPi * gp.weights[j]);
    }
  }
  return rule;
}

std::vector<cplx> circle_points(cplx center, double radius, std::size_t n) {
  std::vector<cplx> pts(n);
  for (std::size_t k = 0; k < n; ++k)
    pts[k] = center + std::polar(radius, kTwoPi * static_cast<double>(k) / static_cast<double>(n));
  return pts;
}

}  // namespace zetalab::quad
