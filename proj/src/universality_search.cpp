#include "zetalab/universality_search.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <limits>
#include <numeric>
#include <set>

#include "zetalab/kernels.hpp"
#include "zetalab/parallel.hpp"
#include "zetalab/prime_engine.hpp"
#include "zetalab/quadrature.hpp"
#include "zetalab/rng.hpp"
#include "zetalab/zeta_reference.hpp"

namespace zetalab::universality {
namespace {

using CVec = std::vector<cplx>;

// Scaled-coefficient space: v_n = alpha_n R^n, |v|^2 = sum w2[n] |v_n|^2.
struct Geometry {
  double R = 0.0;
  std::size_t N = 0;
  std::vector<double> w2;

  Geometry(double radius, std::size_t degree) : R(radius), N(degree), w2(degree + 1) {
    for (std::size_t n = 0; n <= N; ++n) w2[n] = kPi * R * R / static_cast<double>(n + 1);
  }
  double norm_sq(const CVec& v) const {
    double s = 0.0;
    for (std::size_t n = 0; n <= N; ++n) s += w2[n] * std::norm(v[n]);
    return s;
  }
  double dot(const CVec& a, const CVec& b) const {
    double s = 0.0;
    for (std::size_t n = 0; n <= N; ++n) s += w2[n] * (a[n] * std::conj(b[n])).real();
    return s;
  }
};

// One prime's term as a polynomial in w = e^{2 pi i theta_eff}:
// sum_m w^m B[m-1]. Linear atoms keep only m = 1 (the eta term); exact atoms
// carry the whole logarithm log(1 - w p^{-3/4} e^{-Ls}).
struct Atom {
  std::uint64_t p = 0;
  std::vector<CVec> B;
};

Atom make_atom(std::uint64_t p, const Geometry& g, bool exact) {
  Atom a;
  a.p = p;
  const double L = std::log(static_cast<double>(p));
  const double amp = std::pow(static_cast<double>(p), -0.75);
  const int max_m = exact ? 400 : 1;
  double ampm = 1.0;
  for (int m = 1; m <= max_m; ++m) {
    ampm *= amp;
    const double size = ampm / m * std::exp(m * L * g.R);
    if (m > 1 && size < 1e-18) break;
    CVec b(g.N + 1);
    cplx term = -ampm / static_cast<double>(m);
    const double x = -static_cast<double>(m) * L * g.R;
    for (std::size_t n = 0; n <= g.N; ++n) {
      b[n] = term;
      term *= x / static_cast<double>(n + 1);
    }
    a.B.push_back(std::move(b));
  }
  return a;
}

// value, first and second theta-derivatives of an atom.
void atom_eval(const Atom& a, double theta, CVec& v, CVec* d1, CVec* d2) {
  const std::size_t n1 = a.B.front().size();
  v.assign(n1, 0.0);
  if (d1) d1->assign(n1, 0.0);
  if (d2) d2->assign(n1, 0.0);
  const cplx w = unit_phase(theta);
  cplx wm = 1.0;
  for (std::size_t m = 1; m <= a.B.size(); ++m) {
    wm *= w;
    const cplx k1 = cplx(0.0, kTwoPi * static_cast<double>(m));
    const cplx c0 = wm, c1 = k1 * wm, c2 = k1 * k1 * wm;
    const CVec& b = a.B[m - 1];
    for (std::size_t n = 0; n < n1; ++n) {
      v[n] += c0 * b[n];
      if (d1) (*d1)[n] += c1 * b[n];
      if (d2) (*d2)[n] += c2 * b[n];
    }
  }
}

// Acceptance test on squared norms, decided on the norm itself so that the
// recorded trace is strictly decreasing.
bool lowers(double next_sq, double current_sq) {
  return std::sqrt(next_sq) < std::sqrt(current_sq);
}

class Search {
 public:
  Search(const Geometry& g, CVec target, std::span<const std::uint64_t> candidates, bool exact)
      : g_(g), exact_(exact), target_(std::move(target)), psi_(target_) {
    target_.resize(g_.N + 1);
    psi_.resize(g_.N + 1);
    cand_.assign(candidates.begin(), candidates.end());
    const std::size_t P = cand_.size();
    x_.resize(P);
    pref_.resize(P);
    lin_norm_.resize(P);
    used_.assign(P, 0);
    for (std::size_t i = 0; i < P; ++i) {
      const double L = std::log(static_cast<double>(cand_[i]));
      const double amp = std::pow(static_cast<double>(cand_[i]), -0.75);
      x_[i] = L * g_.R;
      pref_[i] = kPi * g_.R * g_.R * amp;
      double term = amp;
      double s = 0.0;
      for (std::size_t n = 0; n <= g_.N; ++n) {
        s += g_.w2[n] * term * term;
        term *= x_[i] / static_cast<double>(n + 1);
      }
      lin_norm_[i] = s;
    }
  }

  double norm() const { return std::sqrt(g_.norm_sq(psi_)); }
  const std::vector<double>& trace() const { return trace_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<double>& thetas() const { return theta_; }
  const CVec& residual() const { return psi_; }

  Status greedy(std::size_t max_terms, double tol, const GreedyOptions& opt) {
    if (trace_.empty()) trace_.push_back(norm());
    std::vector<double> cr(g_.N + 1), ci(g_.N + 1), fr(cand_.size()), fi(cand_.size());
    std::vector<std::size_t> order(cand_.size());
    CVec v;
    while (true) {
      double current = g_.norm_sq(psi_);
      if (std::sqrt(current) <= tol) return Status::kConverged;
      if (atoms_.size() >= max_terms) return Status::kMaxTerms;
      // Delta_psi(L) = pi R^2 p^{-3/4} F(LR),  F(u) = sum beta_n u^n / n!
      double inv_fact = 1.0;
      for (std::size_t n = 0; n <= g_.N; ++n) {
        if (n > 0) inv_fact /= static_cast<double>(n);
        cplx b = std::conj(psi_[n]) / static_cast<double>(n + 1) * inv_fact;
        if (n % 2 == 1) b = -b;
        cr[n] = b.real();
        ci[n] = b.imag();
      }
      simd::horner_real(cr, ci, x_, fr, fi);
      std::size_t count = 0;
      for (std::size_t i = 0; i < cand_.size(); ++i) {
        if (used_[i]) continue;
        const double gain = 2.0 * pref_[i] * std::hypot(fr[i], fi[i]) - lin_norm_[i];
        if (gain > 0.0) order[count++] = i;
      }
      auto gain_of = [&](std::size_t i) {
        return 2.0 * pref_[i] * std::hypot(fr[i], fi[i]) - lin_norm_[i];
      };
      if (opt.batch && count >= 64 && batch_step(order, count, gain_of, fr, fi, max_terms, current, v))
        continue;
      const std::size_t tries = exact_ ? std::min<std::size_t>(count, 16) : std::min<std::size_t>(count, 1);
      std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(tries),
                        order.begin() + static_cast<std::ptrdiff_t>(count),
                        [&](std::size_t a, std::size_t b) {
                          const double ga = gain_of(a), gb = gain_of(b);
                          return ga > gb || (ga == gb && a < b);
                        });
      bool accepted = false;
      for (std::size_t k = 0; k < tries && !accepted; ++k) {
        const std::size_t i = order[k];
        const cplx delta = pref_[i] * cplx(fr[i], fi[i]);
        // Linear optimum: w = -conj(Delta)/|Delta|.
        double theta = frac(0.5 - std::arg(delta) / kTwoPi);
        Atom atom = make_atom(cand_[i], g_, exact_);
        if (exact_) theta = polish_phase(atom, psi_, theta);
        atom_eval(atom, theta, v, nullptr, nullptr);
        CVec next = psi_;
        for (std::size_t n = 0; n <= g_.N; ++n) next[n] -= v[n];
        const double nn = g_.norm_sq(next);
        if (lowers(nn, current)) {
          psi_ = std::move(next);
          atoms_.push_back(std::move(atom));
          theta_.push_back(theta);
          used_[i] = 1;
          accepted = true;
          trace_.push_back(std::sqrt(nn));
          if (opt.refine && atoms_.size() <= opt.joint_terms) lm(tol, 8);
        }
      }
      if (!accepted && opt.refine && atoms_.size() < opt.joint_terms) accepted = lookahead(tol, v);
      if (!accepted) return Status::kNoDescent;
      const std::size_t w = opt.stagnation_window;
      if (w > 0 && trace_.size() > w) {
        const double old = trace_[trace_.size() - 1 - w];
        if (old > 0.0 && (old - trace_.back()) / old < opt.stagnation_rel) return Status::kStagnated;
      }
    }
  }

  // Adds the B best candidates at once, each at its linear phase against the
  // same residual, halving B until the norm drops. Far from the target the
  // gains are nearly additive and this saves one full pool scan per term.
  template <class GainOf>
  bool batch_step(std::vector<std::size_t>& order, std::size_t count, const GainOf& gain_of,
                  const std::vector<double>& fr, const std::vector<double>& fi,
                  std::size_t max_terms, double current, CVec& v) {
    std::sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count),
              [&](std::size_t a, std::size_t b) {
                const double ga = gain_of(a), gb = gain_of(b);
                return ga > gb || (ga == gb && a < b);
              });
    for (std::size_t B = std::min(count / 4, max_terms - atoms_.size()); B >= 16; B /= 2) {
      CVec next = psi_;
      std::vector<Atom> add;
      std::vector<double> th;
      add.reserve(B);
      for (std::size_t k = 0; k < B; ++k) {
        const std::size_t i = order[k];
        const cplx delta = pref_[i] * cplx(fr[i], fi[i]);
        th.push_back(frac(0.5 - std::arg(delta) / kTwoPi));
        add.push_back(make_atom(cand_[i], g_, exact_));
        atom_eval(add.back(), th.back(), v, nullptr, nullptr);
        for (std::size_t n = 0; n <= g_.N; ++n) next[n] -= v[n];
      }
      const double nn = g_.norm_sq(next);
      if (lowers(nn, current)) {
        psi_ = std::move(next);
        for (std::size_t k = 0; k < B; ++k) {
          used_[order[k]] = 1;
          atoms_.push_back(std::move(add[k]));
          theta_.push_back(th[k]);
        }
        trace_.push_back(std::sqrt(nn));
        return true;
      }
    }
    return false;
  }

  // A term can pay off only after the other phases move, e.g. when the target
  // is a partly cancelling sum. Each of the best few candidates is added at
  // its linear phase and the whole set polished; the first that ends below
  // the current norm is kept.
  bool lookahead(double tol, CVec& v) {
    const double current = g_.norm_sq(psi_);
    std::vector<double> cr(g_.N + 1), ci(g_.N + 1), fr(cand_.size()), fi(cand_.size());
    double inv_fact = 1.0;
    for (std::size_t n = 0; n <= g_.N; ++n) {
      if (n > 0) inv_fact /= static_cast<double>(n);
      cplx b = std::conj(psi_[n]) / static_cast<double>(n + 1) * inv_fact;
      if (n % 2 == 1) b = -b;
      cr[n] = b.real();
      ci[n] = b.imag();
    }
    simd::horner_real(cr, ci, x_, fr, fi);
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < cand_.size(); ++i)
      if (!used_[i]) order.push_back(i);
    auto gain_of = [&](std::size_t i) {
      return 2.0 * pref_[i] * std::hypot(fr[i], fi[i]) - lin_norm_[i];
    };
    const std::size_t tries = std::min<std::size_t>(order.size(), 8);
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(tries), order.end(),
                      [&](std::size_t a, std::size_t b) {
                        const double ga = gain_of(a), gb = gain_of(b);
                        return ga > gb || (ga == gb && a < b);
                      });
    for (std::size_t k = 0; k < tries; ++k) {
      const std::size_t i = order[k];
      const cplx delta = pref_[i] * cplx(fr[i], fi[i]);
      const double theta = frac(0.5 - std::arg(delta) / kTwoPi);
      Search trial = *this;
      Atom atom = make_atom(cand_[i], g_, exact_);
      atom_eval(atom, theta, v, nullptr, nullptr);
      for (std::size_t n = 0; n <= g_.N; ++n) trial.psi_[n] -= v[n];
      trial.atoms_.push_back(std::move(atom));
      trial.theta_.push_back(theta);
      trial.used_[i] = 1;
      trial.lm(tol);
      const double nn = g_.norm_sq(trial.psi_);
      if (lowers(nn, current)) {
        trial.trace_.resize(trace_.size());
        trial.trace_.push_back(std::sqrt(nn));
        *this = std::move(trial);
        return true;
      }
    }
    return false;
  }

  // Local phase optimisation. A real target leaves every phase at 0 or 1/2,
  // which is a stationary point of the phase map, so after plain LM stalls the
  // phases are kicked off the real axis and LM is rerun; a kick is kept only if
  // it ends below where it started.
  void refine(double tol) {
    lm(tol);
    if (atoms_.empty()) return;
    for (int kick = 0; kick < 4; ++kick) {
      const double size = 0.05 / static_cast<double>(1 << kick);
      std::vector<double> start(theta_);
      for (std::size_t k = 0; k < start.size(); ++k)
        start[k] = frac(start[k] + size * std::sin(2.399963229728653 * static_cast<double>(k + 1 + 7 * kick)));
      if (!restart_from(start, tol)) return;
    }
    // Few terms: the phase torus is small enough for fresh starts.
    if (atoms_.size() > 16) return;
    const CounterRng rng(0x9e3779b9ULL, atoms_.size());
    for (std::uint64_t n = 0; n < 64; ++n) {
      std::vector<double> start(theta_.size());
      for (std::size_t k = 0; k < start.size(); ++k) start[k] = rng.uniform(n, k);
      if (!restart_from(start, tol)) return;
    }
  }

  // Polishes from the given phases and keeps the result only if it beats the
  // current state. Returns false once the tolerance is met.
  bool restart_from(const std::vector<double>& start, double tol) {
    const double before = g_.norm_sq(psi_);
    if (std::sqrt(before) <= tol) return false;
    std::vector<double> saved_theta = std::move(theta_);
    CVec saved_psi = std::move(psi_);
    const std::size_t saved_trace = trace_.size();
    theta_ = start;
    psi_ = residual_for(theta_);
    lm(tol);
    const double after = g_.norm_sq(psi_);
    trace_.resize(saved_trace);
    if (lowers(after, before)) {
      trace_.push_back(std::sqrt(after));
    } else {
      theta_ = std::move(saved_theta);
      psi_ = std::move(saved_psi);
    }
    return true;
  }


  // Levenberg-Marquardt on all selected phases in the dual (row) form, so the
  // linear solve is at most 2(N+1) square regardless of how many terms exist.
  // Only steps that lower the norm are kept.
  void lm(double tol, int max_iter = 40) {
    const std::size_t K = atoms_.size();
    if (K == 0) return;
    const std::size_t rows = 2 * (g_.N + 1);
    Eigen::MatrixXd A(rows, K);
    Eigen::VectorXd b(rows);
    std::vector<double> sw(g_.N + 1);
    for (std::size_t n = 0; n <= g_.N; ++n) sw[n] = std::sqrt(g_.w2[n]);
    double lambda = 1e-6;
    CVec v, d1;
    double current = g_.norm_sq(psi_);
    for (int it = 0; it < max_iter; ++it) {
      if (std::sqrt(current) <= tol) break;
      for (std::size_t k = 0; k < K; ++k) {
        atom_eval(atoms_[k], theta_[k], v, &d1, nullptr);
        for (std::size_t n = 0; n <= g_.N; ++n) {
          A(static_cast<Eigen::Index>(2 * n), static_cast<Eigen::Index>(k)) = sw[n] * d1[n].real();
          A(static_cast<Eigen::Index>(2 * n + 1), static_cast<Eigen::Index>(k)) = sw[n] * d1[n].imag();
        }
      }
      for (std::size_t n = 0; n <= g_.N; ++n) {
        b(static_cast<Eigen::Index>(2 * n)) = sw[n] * psi_[n].real();
        b(static_cast<Eigen::Index>(2 * n + 1)) = sw[n] * psi_[n].imag();
      }
      const Eigen::MatrixXd AAt = A * A.transpose();
      const double scale = std::max(AAt.diagonal().maxCoeff(), 1e-300);
      bool improved = false;
      for (int attempt = 0; attempt < 12; ++attempt) {
        Eigen::MatrixXd M = AAt;
        M.diagonal().array() += lambda * scale;
        const Eigen::VectorXd y = M.ldlt().solve(b);
        const Eigen::VectorXd step = A.transpose() * y;
        std::vector<double> trial(theta_);
        for (std::size_t k = 0; k < K; ++k) trial[k] = theta_[k] + step(static_cast<Eigen::Index>(k));
        CVec psi = residual_for(trial);
        const double nn = g_.norm_sq(psi);
        if (lowers(nn, current)) {
          const double gain = (current - nn) / current;
          for (auto& t : trial) t = frac(t);
          theta_ = std::move(trial);
          psi_ = std::move(psi);
          current = nn;
          lambda = std::max(lambda / 4.0, 1e-15);
          improved = true;
          trace_.push_back(std::sqrt(nn));
          if (gain < 1e-13) it = max_iter;
          break;
        }
        lambda *= 8.0;
      }
      if (!improved) break;
    }
  }

 private:
  CVec residual_for(const std::vector<double>& thetas) const {
    CVec psi = target_;
    CVec v;
    for (std::size_t k = 0; k < atoms_.size(); ++k) {
      atom_eval(atoms_[k], thetas[k], v, nullptr, nullptr);
      for (std::size_t n = 0; n <= g_.N; ++n) psi[n] -= v[n];
    }
    return psi;
  }

  // 1-D Newton on |psi - atom(theta)|^2 with step halving.
  double polish_phase(const Atom& atom, const CVec& psi, double theta) const {
    CVec v, d1, d2, r(psi.size());
    auto f = [&](double th) {
      atom_eval(atom, th, v, nullptr, nullptr);
      for (std::size_t n = 0; n <= g_.N; ++n) r[n] = psi[n] - v[n];
      return g_.norm_sq(r);
    };
    double fx = f(theta);
    for (int it = 0; it < 20; ++it) {
      atom_eval(atom, theta, v, &d1, &d2);
      for (std::size_t n = 0; n <= g_.N; ++n) r[n] = psi[n] - v[n];
      const double g1 = -2.0 * g_.dot(r, d1);
      const double g2 = 2.0 * g_.norm_sq(d1) - 2.0 * g_.dot(r, d2);
      double step = g2 > 0.0 ? -g1 / g2 : -0.01 * (g1 > 0 ? 1.0 : -1.0);
      step = std::clamp(step, -0.1, 0.1);
      bool moved = false;
      for (int h = 0; h < 20; ++h) {
        const double ft = f(theta + step);
        if (ft < fx) {
          theta += step;
          fx = ft;
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved || std::fabs(step) < 1e-15) break;
    }
    return frac(theta);
  }

  Geometry g_;
  bool exact_;
  CVec target_;
  CVec psi_;
  std::vector<std::uint64_t> cand_;
  std::vector<double> x_, pref_, lin_norm_;
  std::vector<char> used_;
  std::vector<Atom> atoms_;
  std::vector<double> theta_;
  std::vector<double> trace_;
};

Status run_rounds(Search& search, std::size_t max_terms, double tol, const GreedyOptions& opt) {
  Status st = Status::kNoDescent;
  const std::size_t rounds = opt.refine ? std::max<std::size_t>(opt.refine_rounds, 1) : 1;
  for (std::size_t round = 0; round < rounds; ++round) {
    st = search.greedy(max_terms, tol, opt);
    if (st == Status::kConverged || !opt.refine) break;
    const double before = search.norm();
    search.refine(tol);
    if (search.norm() <= tol) {
      st = Status::kConverged;
      break;
    }
    if (st == Status::kMaxTerms) break;
    // Another greedy round only pays off if the polish opened new room.
    if (search.norm() > 0.999 * before && round > 0) break;
  }
  return st;
}

// Unwrapped log g at the given circle points, reached from log g(0) along the
// positive real axis. Throws DomainError if g vanishes or winds.
std::vector<cplx> continuous_log(const Target& g, double R, const std::vector<cplx>& circle) {
  auto step_to = [](cplx prev_log, cplx value) {
    cplx l = std::log(value);
    const double k = std::round((prev_log.imag() - l.imag()) / kTwoPi);
    return cplx(l.real(), l.imag() + k * kTwoPi);
  };
  const cplx g0 = g(0.0);
  if (!(std::abs(g0) > 0.0) || !std::isfinite(std::abs(g0)))
    throw DomainError("approximate_on_disc: target vanishes or is singular at the centre");
  cplx cur = std::log(g0);
  const int radial = 64;
  for (int i = 1; i <= radial; ++i) {
    const cplx v = g(cplx(R * i / radial, 0.0));
    if (!(std::abs(v) > 0.0) || !std::isfinite(std::abs(v)))
      throw DomainError("approximate_on_disc: target vanishes inside the disc");
    cur = step_to(cur, v);
  }
  std::vector<cplx> out(circle.size());
  const cplx start = cur;
  double min_mod = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < circle.size(); ++k) {
    const cplx v = g(circle[k]);
    min_mod = std::min(min_mod, std::abs(v));
    if (!(std::abs(v) > 0.0) || !std::isfinite(std::abs(v)))
      throw DomainError("approximate_on_disc: target vanishes on the boundary");
    cur = k == 0 ? step_to(start, v) : step_to(cur, v);
    out[k] = cur;
  }
  const cplx closing = step_to(cur, g(circle.front()));
  const double winding = (closing.imag() - out.front().imag()) / kTwoPi;
  if (std::fabs(winding) > 0.5)
    throw DomainError("approximate_on_disc: target has zeros in the disc (winding " +
                      std::to_string(static_cast<int>(std::lround(winding))) + ")");
  if (!(min_mod > 1e-300)) throw DomainError("approximate_on_disc: target vanishes");
  return out;
}

std::vector<cplx> shifted(std::span<const cplx> s, double t) {
  std::vector<cplx> z(s.size());
  for (std::size_t j = 0; j < s.size(); ++j) z[j] = s[j] + cplx(0.75, t);
  return z;
}

double max_abs_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

const char* status_name(Status s) {
  switch (s) {
    case Status::kConverged: return "converged";
    case Status::kMaxTerms: return "max_terms";
    case Status::kNoDescent: return "no_descent";
    case Status::kStagnated: return "stagnated";
  }
  return "unknown";
}

double hardy_radius(double r) { return std::min(1.25 * r, 0.5 * (r + 0.25)); }

ApproximationResult greedy_rearrange(const hardy::HardyElement& target,
                                     std::span<const std::uint64_t> pool,
                                     std::size_t start_index, std::size_t max_terms,
                                     double tol, GreedyOptions opt) {
  if (pool.empty()) throw DomainError("greedy_rearrange: empty pool");
  if (!(tol > 0.0)) throw DomainError("greedy_rearrange: tol must be positive");
  if (start_index >= pool.size()) throw DomainError("greedy_rearrange: start_index past the pool");
  const std::size_t N = std::max<std::size_t>(target.degree(), 1);
  Geometry geo(target.radius, N);
  CVec psi0 = target.scaled();
  psi0.resize(N + 1);
  Search search(geo, psi0, pool.subspan(start_index), false);
  opt.max_terms = max_terms;
  opt.tol = tol;
  ApproximationResult res;
  res.status = run_rounds(search, max_terms, tol, opt);
  res.radius = target.radius;
  res.r = target.radius;
  res.degree = N;
  res.eps = tol;
  res.residual_norm_trace = search.trace();
  for (std::size_t k = 0; k < search.atoms().size(); ++k) {
    res.selected.push_back(search.atoms()[k].p);
    res.phases.set(search.atoms()[k].p, search.thetas()[k]);
  }
  res.primes = res.selected;
  std::sort(res.primes.begin(), res.primes.end());
  const hardy::HardyElement resid = hardy::HardyElement::from_scaled(target.radius, search.residual());
  double sup = 0.0;
  for (const auto& s : quad::circle_points(0.0, target.radius, 256)) sup = std::max(sup, std::abs(resid(s)));
  res.sup_error = res.sup_error_coarse = res.sup_error_fine = sup;
  res.success = search.norm() <= tol;
  return res;
}

ApproximationResult approximate_on_disc(const Target& g, double r, double y, double eps,
                                        const DiscOptions& opt) {
  if (!(r > 0.0 && r < 0.25)) throw DomainError("approximate_on_disc: need 0 < r < 1/4");
  if (!(eps > 0.0)) throw DomainError("approximate_on_disc: eps must be positive");
  if (!(y >= 0.0)) throw DomainError("approximate_on_disc: y must be nonnegative");
  if (static_cast<double>(opt.pool_limit) <= y)
    throw DomainError("approximate_on_disc: pool_limit must exceed y");
  if (opt.dft_samples < 2 * opt.degree + 2)
    throw DomainError("approximate_on_disc: dft_samples too small for the degree");

  const double R = hardy_radius(r);
  const std::size_t N = opt.degree;
  const std::size_t K = opt.dft_samples;
  const double t = opt.t;
  const auto circle = quad::circle_points(0.0, R, K);
  const auto logg = continuous_log(g, R, circle);
  double gmax = 0.0;
  for (const auto& s : circle) gmax = std::max(gmax, std::abs(g(s)));

  const auto y_floor = static_cast<std::uint64_t>(std::floor(y));
  const auto table = primes::shared_table(opt.pool_limit);
  const auto fixed = table->range(0, y_floor);
  std::span<const std::uint64_t> pool = table->range(y_floor, opt.pool_limit);
  if (!opt.pool.empty()) {
    for (auto p : opt.pool)
      if (static_cast<double>(p) <= y || !euler::is_prime(p))
        throw DomainError("approximate_on_disc: explicit pool must hold primes above y");
    pool = opt.pool;
  }

  // phi0 = -log g - sum_{p <= y} u_p on |s| = R.
  std::vector<cplx> phi(K);
  for (std::size_t k = 0; k < K; ++k) phi[k] = -logg[k];
  for (auto p : fixed) {
    const double th = opt.prescribed.get(p);
    for (std::size_t k = 0; k < K; ++k)
      phi[k] -= euler::log_factor(p, th, circle[k] + cplx(0.0, t));
  }
  CVec psi0(N + 1);
  for (std::size_t n = 0; n <= N; ++n) {
    cplx acc = 0.0;
    for (std::size_t k = 0; k < K; ++k)
      acc += phi[k] * unit_phase(-static_cast<double>(n * k % K) / static_cast<double>(K));
    psi0[n] = acc / static_cast<double>(K);
  }

  Geometry geo(R, N);
  // |g - F| ~ |g| |log g - log F| and |f(s)| <= |f| / (sqrt(pi) (R - r)) for |s| <= r.
  const double tol = std::min(opt.greedy.tol, 0.5 * eps / std::max(gmax, 1e-300) *
                                                  std::sqrt(kPi) * (R - r));
  Search search(geo, psi0, pool, true);
  ApproximationResult res;
  res.status = run_rounds(search, opt.greedy.max_terms, tol, opt.greedy);
  res.residual_norm_trace = search.trace();
  res.r = r;
  res.radius = R;
  res.y = y;
  res.t = t;
  res.eps = eps;
  res.degree = N;

  res.phases = euler::PhaseAssignment(opt.prescribed.default_phase());
  std::vector<std::uint64_t> ms(fixed.begin(), fixed.end());
  for (auto p : fixed) res.phases.set(p, opt.prescribed.get(p));
  for (std::size_t k = 0; k < search.atoms().size(); ++k) {
    const auto p = search.atoms()[k].p;
    // The search works with theta_eff = theta - t log p / 2pi.
    const double theta = frac(search.thetas()[k] + t * std::log(static_cast<double>(p)) / kTwoPi);
    res.selected.push_back(p);
    res.phases.set(p, theta);
    ms.push_back(p);
  }
  std::sort(ms.begin(), ms.end());
  res.primes = ms;
  std::vector<double> th(ms.size());
  for (std::size_t i = 0; i < ms.size(); ++i) th[i] = res.phases.get(ms[i]);

  for (int pass = 0; pass < 2; ++pass) {
    const auto pts = quad::circle_points(0.0, r, opt.boundary_samples << pass);
    const auto F = euler::product_grid(ms, th, shifted(pts, t), opt.threads);
    std::vector<cplx> gv(pts.size());
    for (std::size_t j = 0; j < pts.size(); ++j) gv[j] = g(pts[j]);
    (pass == 0 ? res.sup_error_coarse : res.sup_error_fine) = max_abs_diff(gv, F);
  }
  res.sup_error = std::max(res.sup_error_coarse, res.sup_error_fine);
  res.success = res.sup_error <= eps;
  res.message = std::string(status_name(res.status)) + ", " + std::to_string(res.selected.size()) +
                " terms, residual " + std::to_string(search.norm());
  return res;
}

double c_delta(double delta) { return std::sqrt(2.0) / delta / std::sqrt(kTwoPi); }

double stage_bound(int k, double r, double delta, double eps) {
  return std::pow(2.0, 1.0 + k * (r + delta - 0.25)) * eps;
}

DoublingSchedule doubling_scheme(const DoublingOptions& opt) {
  if (!(opt.r > 0.0) || !(opt.delta > 0.0) || !(opt.r + opt.delta < 0.25))
    throw DomainError("doubling_scheme: need r, delta > 0 and r + delta < 1/4");
  if (!(opt.y0 >= 2.0)) throw DomainError("doubling_scheme: need y0 >= 2");
  if (opt.K < 0 || opt.restarts < 0) throw DomainError("doubling_scheme: negative K or restarts");

  DoublingSchedule sc;
  sc.y0 = opt.y0;
  sc.r = opt.r;
  sc.delta = opt.delta;
  sc.t = opt.t;
  sc.seed = opt.seed;
  sc.restarts = opt.restarts;
  sc.safety = opt.safety;
  const cplx centre(0.75, opt.t);
  sc.A = zeta::sup_on_disc(centre, opt.r, opt.boundary_samples, opt.threads);
  sc.c_delta = c_delta(opt.delta);
  sc.eps_min = (sc.A + 1.0) * sc.c_delta * std::pow(opt.y0, opt.r + opt.delta - 0.25);
  sc.eps = opt.eps > 0.0 ? opt.eps : sc.eps_min;
  if (sc.eps < sc.eps_min * (1.0 - 1e-12))
    throw DomainError("doubling_scheme: eps " + std::to_string(sc.eps) +
                      " below (A+1) c(delta) y0^(r+delta-1/4) = " + std::to_string(sc.eps_min) +
                      "; raise y0 or eps");

  const double yK = std::ldexp(opt.y0, opt.K);
  const auto pool_limit = std::max<std::uint64_t>(opt.pool_limit, static_cast<std::uint64_t>(4.0 * yK));
  const auto table = primes::shared_table(pool_limit);

  const Target target = [&](cplx s) { return zeta::zeta(centre + s); };
  const auto boundary = quad::circle_points(0.0, opt.r, opt.boundary_samples);
  const auto zb_points = shifted(boundary, opt.t);
  std::vector<cplx> zb(boundary.size());
  parallel_for(boundary.size(), opt.threads, [&](std::size_t j) { zb[j] = zeta::zeta(zb_points[j]); });

  sc.all_within = true;
  for (int k = 0; k <= opt.K; ++k) {
    Stage st;
    st.k = k;
    st.y_k = std::ldexp(opt.y0, k);
    st.bound = stage_bound(k, opt.r, opt.delta, sc.eps);

    DiscOptions dopt;
    dopt.pool_limit = pool_limit;
    dopt.t = opt.t;
    dopt.prescribed = euler::PhaseAssignment(0.0);
    dopt.greedy.tol = opt.inner_tol;
    dopt.greedy.max_terms = opt.max_terms;
    dopt.boundary_samples = opt.boundary_samples;
    dopt.threads = opt.threads;
    const auto res = approximate_on_disc(target, opt.r, st.y_k, std::ldexp(sc.eps, -k), dopt);
    st.approx_sup_error = res.sup_error;
    st.selected = res.selected.size();
    const auto yk_floor = static_cast<std::uint64_t>(std::floor(st.y_k));
    st.m_k = res.primes.empty() ? 0 : res.primes.back();
    st.m_k = std::max<std::uint64_t>(st.m_k, table->range(0, yk_floor).empty() ? 0 : table->range(0, yk_floor).back());

    const auto all = table->range(0, st.m_k);
    st.primes.assign(all.begin(), all.end());
    std::vector<double> base(st.primes.size(), 0.0);
    std::vector<std::size_t> gap;
    const std::set<std::uint64_t> chosen(res.selected.begin(), res.selected.end());
    for (std::size_t i = 0; i < st.primes.size(); ++i) {
      const auto p = st.primes[i];
      if (p <= yk_floor) base[i] = 0.0;
      else if (chosen.count(p)) base[i] = res.phases.get(p);
      else gap.push_back(i);
    }

    // Fixed part once; each restart only re-multiplies the gap factors.
    std::vector<std::uint64_t> fixed_p;
    std::vector<double> fixed_t;
    std::vector<std::uint64_t> gap_p;
    {
      std::size_t gi = 0;
      for (std::size_t i = 0; i < st.primes.size(); ++i) {
        if (gi < gap.size() && gap[gi] == i) {
          gap_p.push_back(st.primes[i]);
          ++gi;
        } else {
          fixed_p.push_back(st.primes[i]);
          fixed_t.push_back(base[i]);
        }
      }
    }
    const auto inv_fixed = euler::inverse_product_grid(fixed_p, fixed_t, zb_points, opt.threads);
    const CounterRng rng(opt.seed, 0x5eed0000ULL + static_cast<std::uint64_t>(k));
    const std::size_t cands = static_cast<std::size_t>(opt.restarts) + 1;
    std::vector<double> errs(cands);
    std::vector<std::vector<double>> gap_thetas(cands, std::vector<double>(gap_p.size(), 0.0));
    for (std::size_t c = 1; c < cands; ++c) {
      const CounterRng sub = rng.substream(c);
      for (std::size_t i = 0; i < gap_p.size(); ++i) gap_thetas[c][i] = sub.uniform(i);
    }
    parallel_for(cands, opt.threads, [&](std::size_t c) {
      const auto inv_gap = euler::inverse_product_grid(gap_p, gap_thetas[c], zb_points, 1);
      double m = 0.0;
      for (std::size_t j = 0; j < zb.size(); ++j)
        m = std::max(m, std::abs(zb[j] - 1.0 / (inv_fixed[j] * inv_gap[j])));
      errs[c] = m;
    });
    std::size_t best = 0;
    for (std::size_t c = 1; c < cands; ++c)
      if (errs[c] < errs[best]) best = c;
    st.best_restart = static_cast<int>(best);
    st.stage_error = errs[best];
    st.thetas = base;
    for (std::size_t i = 0; i < gap.size(); ++i) st.thetas[gap[i]] = gap_thetas[best][i];
    st.within = st.stage_error <= opt.safety * st.bound;
    sc.all_within = sc.all_within && st.within;
    sc.stages.push_back(std::move(st));
  }
  return sc;
}

std::vector<cplx> stage_values(const Stage& st, double t, std::span<const cplx> s,
                               unsigned threads) {
  return euler::product_grid(st.primes, st.thetas, shifted(s, t), threads);
}

SeriesDiagnostic series_convergence_diagnostic(const DoublingSchedule& schedule, double t,
                                               unsigned threads) {
  const auto rule = quad::disc_rule(0.0, schedule.r, 12, 32);
  SeriesDiagnostic out;
  std::vector<cplx> prev(rule.nodes.size(), 0.0);
  double sum = 0.0;
  for (const auto& st : schedule.stages) {
    const auto cur = stage_values(st, t, rule.nodes, threads);
    double integral = 0.0;
    for (std::size_t i = 0; i < cur.size(); ++i) integral += rule.weights[i] * std::abs(cur[i] - prev[i]);
    sum += integral;
    out.terms.push_back(integral);
    out.partial_sums.push_back(sum);
    prev = cur;
  }
  return out;
}

std::string to_json(const ApproximationResult& res) {
  nlohmann::ordered_json j;
  j["status"] = status_name(res.status);
  j["success"] = res.success;
  j["eps"] = res.eps;
  j["sup_error"] = res.sup_error;
  j["sup_error_coarse"] = res.sup_error_coarse;
  j["sup_error_fine"] = res.sup_error_fine;
  j["r"] = res.r;
  j["hardy_radius"] = res.radius;
  j["y"] = res.y;
  j["t"] = res.t;
  j["degree"] = res.degree;
  j["prime_count"] = res.primes.size();
  j["selected"] = res.selected;
  auto& ph = j["phases"] = nlohmann::ordered_json::array();
  for (auto p : res.primes) ph.push_back({p, res.phases.get(p)});
  j["residual_norm_trace"] = res.residual_norm_trace;
  return j.dump(1);
}

std::string to_json(const DoublingSchedule& sc) {
  nlohmann::ordered_json j;
  j["y0"] = sc.y0;
  j["r"] = sc.r;
  j["delta"] = sc.delta;
  j["t"] = sc.t;
  j["A"] = sc.A;
  j["c_delta"] = sc.c_delta;
  j["eps_min"] = sc.eps_min;
  j["eps"] = sc.eps;
  j["safety"] = sc.safety;
  j["seed"] = sc.seed;
  j["restarts"] = sc.restarts;
  j["all_within"] = sc.all_within;
  auto& arr = j["stages"] = nlohmann::ordered_json::array();
  for (const auto& st : sc.stages) {
    nlohmann::ordered_json s;
    s["stage"] = st.k;
    s["y_k"] = st.y_k;
    s["m_k"] = st.m_k;
    s["prime_count"] = st.primes.size();
    s["selected"] = st.selected;
    s["approx_sup_error"] = st.approx_sup_error;
    s["stage_error"] = st.stage_error;
    s["bound"] = st.bound;
    s["within"] = st.within;
    s["best_restart"] = st.best_restart;
    arr.push_back(std::move(s));
  }
  return j.dump(1);
}

}  // namespace zetalab::universality
