#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "zetalab/euler_product.hpp"
#include "zetalab/hardy_space.hpp"

namespace zetalab::universality {

enum class Status {
  kConverged,   // residual at or below tolerance
  kMaxTerms,    // term budget exhausted
  kNoDescent,   // no remaining pool prime lowers the residual
  kStagnated,   // relative decrease < 1e-12 over the stagnation window
};

const char* status_name(Status s);

struct GreedyOptions {
  std::size_t max_terms = 4000;
  double tol = 1e-12;  // Hardy norm of the residual
  std::size_t stagnation_window = 50;
  double stagnation_rel = 1e-12;
  // Joint Gauss-Newton polish of all selected phases between greedy rounds.
  bool refine = true;
  std::size_t refine_rounds = 6;
  // While at most this many terms are selected, every accepted term is
  // followed by a joint polish of all phases.
  std::size_t joint_terms = 64;
  // Try adding many top-gain terms per pool scan while that lowers the norm.
  bool batch = true;
};

struct ApproximationResult {
  std::vector<std::uint64_t> primes;    // M, ascending: prescribed then searched
  std::vector<std::uint64_t> selected;  // searched primes in selection order
  euler::PhaseAssignment phases;
  double sup_error = 0.0;       // max over both boundary resolutions
  double sup_error_coarse = 0.0;
  double sup_error_fine = 0.0;
  double eps = 0.0;
  bool success = false;         // sup_error <= eps
  std::vector<double> residual_norm_trace;  // Hardy norm after each accepted step
  Status status = Status::kConverged;
  double r = 0.0;
  double radius = 0.0;          // Hardy radius R used for the search
  double y = 0.0;
  double t = 0.0;
  std::size_t degree = 0;
  std::string message;
};

// Greedy rearrangement over linear atoms eta_p = -e^{2 pi i theta} p^{-(s+3/4)}:
// each step takes the unused pool prime (index >= start_index) and continuous
// phase that most reduce the Hardy norm of target - sum eta. `sup_error` is the
// sup of the final residual on |s| = R.
ApproximationResult greedy_rearrange(const hardy::HardyElement& target,
                                     std::span<const std::uint64_t> pool,
                                     std::size_t start_index, std::size_t max_terms,
                                     double tol, GreedyOptions opt = {});

// s -> g(s) on the disc, in disc coordinates.
using Target = std::function<cplx(cplx)>;

struct DiscOptions {
  std::uint64_t pool_limit = 100000;
  // Explicit search candidates (primes > y). Empty means all primes in (y, pool_limit].
  std::vector<std::uint64_t> pool;
  std::size_t degree = hardy::kDefaultDegree;
  std::size_t dft_samples = 256;
  std::size_t boundary_samples = 256;
  // Products are evaluated at s + 3/4 + i t.
  double t = 0.0;
  // Phases for primes <= y; these are never changed by the search.
  euler::PhaseAssignment prescribed{0.0};
  GreedyOptions greedy;
  unsigned threads = 1;
};

// Hardy radius used for a disc of radius r.
double hardy_radius(double r);

// Finds M and phases with max_{|s|<=r} |g(s) - zeta_M(s + 3/4 + it)| small.
// Pre: 0 < r < 1/4, eps > 0, g analytic and zero-free on |s| <= hardy_radius(r)
// (checked: winding 0 and min |g| > 0 on the boundary samples, otherwise
// DomainError). A result with sup_error > eps is returned, not thrown.
ApproximationResult approximate_on_disc(const Target& g, double r, double y, double eps,
                                        const DiscOptions& opt = {});

struct Stage {
  int k = 0;
  double y_k = 0.0;
  std::uint64_t m_k = 0;                 // largest prime carrying a phase
  std::vector<std::uint64_t> primes;     // every prime <= m_k
  std::vector<double> thetas;            // matching phases
  std::size_t selected = 0;              // primes chosen by the search
  double approx_sup_error = 0.0;         // before the gap primes are added
  double stage_error = 0.0;              // sup |zeta - F_k| on the boundary
  double bound = 0.0;                    // 2^{1 + k(r + delta - 1/4)} eps
  bool within = false;                   // stage_error <= safety * bound
  int best_restart = 0;                  // 0 is the all-zero gap vector
};

struct DoublingOptions {
  double y0 = 1000.0;
  int K = 4;
  double eps = 0.0;          // <= 0 selects eps_min
  double r = 0.1;
  double delta = 0.05;
  int restarts = 8;
  std::uint64_t seed = 1;
  double t = 0.0;
  double safety = 2.0;
  std::uint64_t pool_limit = 100000;
  double inner_tol = 1e-4;   // Hardy tolerance for each stage search
  std::size_t max_terms = 4000;
  std::size_t boundary_samples = 256;
  unsigned threads = 1;
};

struct DoublingSchedule {
  double y0 = 0.0;
  double r = 0.0;
  double delta = 0.0;
  double t = 0.0;
  double A = 0.0;            // sup |zeta(3/4 + it + s)| on |s| = r
  double c_delta = 0.0;      // sqrt(2) / (delta sqrt(2 pi))
  double eps_min = 0.0;      // (A + 1) c(delta) y0^{r + delta - 1/4}
  double eps = 0.0;
  double safety = 2.0;
  std::uint64_t seed = 0;
  int restarts = 0;
  std::vector<Stage> stages;
  bool all_within = false;
};

double c_delta(double delta);

// 2^{1 + k(r + delta - 1/4)} eps
double stage_bound(int k, double r, double delta, double eps);

// Builds stages k = 0..K. Throws DomainError if r + delta >= 1/4 or if
// eps < eps_min (the y0 condition fails).
DoublingSchedule doubling_scheme(const DoublingOptions& opt);

// Euler product of one stage at 3/4 + it + s for each s.
std::vector<cplx> stage_values(const Stage& st, double t, std::span<const cplx> s,
                               unsigned threads = 1);

struct SeriesDiagnostic {
  std::vector<double> terms;         // disc integral of |F_l - F_{l-1}|, F_0 = 0
  std::vector<double> partial_sums;
};

SeriesDiagnostic series_convergence_diagnostic(const DoublingSchedule& schedule, double t,
                                               unsigned threads = 1);

std::string to_json(const ApproximationResult& res);
std::string to_json(const DoublingSchedule& sched);

}  // namespace zetalab::universality
