#include "zetalab/zero_census.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "zetalab/parallel.hpp"
#include "zetalab/zeta_reference.hpp"

namespace zetalab::census {
namespace {

constexpr int kMaxDepth = 40;

struct Walker {
  const Evaluator& f;
  const Contour& c;
  CensusReport rep;

  cplx eval(double u) {
    const cplx v = f(c.point(u));
    ++rep.evaluations;
    const double a = std::abs(v);
    if (!std::isfinite(a)) throw ContourError("winding_count: non-finite value on the contour");
    rep.min_modulus = std::min(rep.min_modulus, a);
    if (a < kContourFloor) throw ContourError("winding_count: contour passes through a zero");
    return v;
  }

  // Argument change from u0 to u1, bisecting until each step is below pi/2.
  double step(double u0, cplx v0, double u1, cplx v1, int depth) {
    const double d = std::arg(v1 / v0);
    if (std::fabs(d) < 0.5 * kPi) return d;
    if (depth >= kMaxDepth) throw PrecisionError("winding_count: bisection limit reached");
    rep.refined = true;
    const double um = 0.5 * (u0 + u1);
    const cplx vm = eval(um);
    return step(u0, v0, um, vm, depth + 1) + step(um, vm, u1, v1, depth + 1);
  }
};

}  // namespace

Contour Contour::circle(cplx center, double radius, std::size_t samples) {
  if (!(radius > 0.0)) throw DomainError("Contour: radius must be positive");
  if (samples < kMinSamples) throw DomainError("Contour: need at least 64 samples");
  Contour c;
  c.shape = Shape::kCircle;
  c.center = center;
  c.radius = radius;
  c.samples = samples;
  return c;
}

Contour Contour::rectangle(cplx lo, cplx hi, std::size_t samples) {
  if (!(hi.real() > lo.real() && hi.imag() > lo.imag()))
    throw DomainError("Contour: rectangle corners must be lower-left, upper-right");
  if (samples < kMinSamples) throw DomainError("Contour: need at least 64 samples");
  Contour c;
  c.shape = Shape::kRectangle;
  c.lo = lo;
  c.hi = hi;
  c.center = 0.5 * (lo + hi);
  c.samples = samples;
  return c;
}

cplx Contour::point(double u) const {
  if (shape == Shape::kCircle) return center + radius * unit_phase(u);
  // Perimeter walk from lo, counterclockwise.
  const double w = hi.real() - lo.real();
  const double h = hi.imag() - lo.imag();
  double d = frac(u) * 2.0 * (w + h);
  if (d < w) return {lo.real() + d, lo.imag()};
  d -= w;
  if (d < h) return {hi.real(), lo.imag() + d};
  d -= h;
  if (d < w) return {hi.real() - d, hi.imag()};
  d -= w;
  return {lo.real(), hi.imag() - d};
}

std::vector<double> Contour::parameters() const {
  std::vector<double> u(samples);
  for (std::size_t k = 0; k < samples; ++k) u[k] = static_cast<double>(k) / static_cast<double>(samples);
  return u;
}

void check_zeta_contour(const Contour& c) {
  if (c.shape == Contour::Shape::kCircle) {
    if (c.center.real() - c.radius <= 0.0) throw DomainError("zeta contour must lie in Re s > 0");
    if (std::fabs(std::abs(c.center - 1.0) - c.radius) < 1e-9)
      throw DomainError("zeta contour passes through s = 1");
  } else {
    if (c.lo.real() <= 0.0) throw DomainError("zeta contour must lie in Re s > 0");
    const bool on_vertical = (std::fabs(c.lo.real() - 1.0) < 1e-9 || std::fabs(c.hi.real() - 1.0) < 1e-9) &&
                             c.lo.imag() <= 0.0 && c.hi.imag() >= 0.0;
    const bool on_horizontal = (std::fabs(c.lo.imag()) < 1e-9 || std::fabs(c.hi.imag()) < 1e-9) &&
                               c.lo.real() <= 1.0 && c.hi.real() >= 1.0;
    if (on_vertical || on_horizontal) throw DomainError("zeta contour passes through s = 1");
  }
}

CensusReport winding_count(const Evaluator& f, const Contour& c) {
  if (c.samples < kMinSamples) throw DomainError("winding_count: need at least 64 samples");
  Walker w{f, c, {}};
  w.rep.min_modulus = std::numeric_limits<double>::infinity();
  const auto u = c.parameters();
  std::vector<cplx> v(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) v[k] = w.eval(u[k]);
  double total = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const std::size_t j = (k + 1) % u.size();
    const double uj = j == 0 ? 1.0 : u[j];
    total += w.step(u[k], v[k], uj, v[j], 0);
    w.rep.trace.push_back(total / kTwoPi);
  }
  w.rep.total_turns = total / kTwoPi;
  const double rounded = std::round(w.rep.total_turns);
  if (std::fabs(w.rep.total_turns - rounded) > 0.01)
    throw PrecisionError("winding_count: argument change is not an integer multiple of 2 pi");
  w.rep.winding = static_cast<int>(rounded);
  return w.rep;
}

double rouche_margin(const Evaluator& f, const Evaluator& g, const Contour& c) {
  double m = std::numeric_limits<double>::infinity();
  for (double u : c.parameters()) {
    const cplx s = c.point(u);
    const cplx gv = g(s);
    m = std::min(m, std::abs(gv) - std::abs(f(s) - gv));
  }
  return m;
}

std::vector<ScanRow> strip_scan(const std::vector<double>& t_values, double r, const ScanOptions& opt) {
  if (!(r > 0.0 && r < 0.25)) throw DomainError("strip_scan: need 0 < r < 1/4");
  std::vector<ScanRow> rows(t_values.size());
  parallel_for(t_values.size(), opt.threads, [&](std::size_t i) {
    ScanRow& row = rows[i];
    row.t = t_values[i];
    row.r = r;
    row.seed = opt.scheme.seed;
    const Contour circle = Contour::circle(cplx(0.75, row.t), r, opt.samples);
    const Evaluator zeta_f = [](cplx s) { return zeta::zeta(s); };
    try {
      row.m = std::numeric_limits<double>::infinity();
      for (double u : circle.parameters()) row.m = std::min(row.m, std::abs(zeta_f(circle.point(u))));
      row.zeta_census = winding_count(zeta_f, circle);
      row.count_zeta = row.zeta_census.winding;
    } catch (const std::exception& e) {
      row.note = std::string("zeta: ") + e.what();
      return;
    }
    universality::DoublingOptions d = opt.scheme;
    d.r = r;
    d.t = row.t;
    d.threads = 1;
    universality::DoublingSchedule sched;
    try {
      sched = universality::doubling_scheme(d);
    } catch (const std::exception& e) {
      row.note = std::string("approximation: ") + e.what();
      return;
    }
    row.stage_count = sched.stages.size();
    const auto& last = sched.stages.back();
    const Evaluator product = [&](cplx s) {
      const cplx disc = s - cplx(0.75, row.t);
      return universality::stage_values(last, row.t, std::span<const cplx>(&disc, 1))[0];
    };
    row.sup_error = 0.0;
    for (double u : circle.parameters()) {
      const cplx s = circle.point(u);
      row.sup_error = std::max(row.sup_error, std::abs(zeta_f(s) - product(s)));
    }
    row.margin = rouche_margin(product, zeta_f, circle);
    row.zeta_census.rouche_margin = row.margin;
    row.criterion = row.sup_error <= 0.25 * row.m;
    try {
      row.product_census = winding_count(product, circle);
      row.product_census.rouche_margin = row.margin;
      row.count_product = row.product_census.winding;
    } catch (const std::exception& e) {
      row.note = std::string("product winding: ") + e.what();
    }
    if (row.margin > 0.0) row.transfer_ok = row.count_product == row.count_zeta;
  });
  return rows;
}

}  // namespace zetalab::census
