#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ictree/censored_data.hpp"

namespace ictree {

// Maximal intersection (lower, upper] of the observation intervals; the NPMLE
// can place mass only on these. lower == upper encodes the degenerate
// interval {lower} produced by exact observations.
struct TurnbullInterval {
  double lower = 0.0;
  double upper = 0.0;

  bool degenerate() const { return lower == upper; }
};

struct NpmleOptions {
  double tol = 1e-10;      // stop when max absolute mass change < tol
  long max_iter = 100000;
  // Verify per-iteration log-likelihood monotonicity (costs one log per
  // observation per iteration); throws std::logic_error on a decrease.
  bool check_monotone = false;
  // Exact-time data short-circuits to the closed-form product-limit
  // estimator; disable to force the EM path (used by tests).
  bool allow_product_limit = true;
};

// Discrete survival distribution with probability mass on Turnbull intervals.
// All mass of an interval jumps at its upper endpoint, making survival(t)
// right-continuous; any placement inside the interval has the same
// likelihood, but a fixed convention is needed for reproducible prediction.
class SurvivalCurve {
 public:
  SurvivalCurve() = default;
  SurvivalCurve(std::vector<TurnbullInterval> intervals, std::vector<double> masses,
                double loglik, long iterations, bool converged);

  const std::vector<TurnbullInterval>& intervals() const { return intervals_; }
  const std::vector<double>& masses() const { return masses_; }
  double loglik() const { return loglik_; }
  long iterations() const { return iterations_; }
  bool converged() const { return converged_; }
  std::size_t size() const { return intervals_.size(); }

  // S(t): total mass of intervals whose jump point exceeds t. Equals 1 below
  // the first interval; stays positive at all finite t when the last interval
  // is (c, +inf].
  double survival(double t) const;

  // Sum of masses j..end (tail_mass(0) == 1, tail_mass(size()) == 0).
  double tail_mass(std::size_t j) const { return tail_[j]; }

  // Smallest jump point t with S(t) <= p, when the curve reaches that level
  // at a finite time.
  std::optional<double> quantile(double p) const;

 private:
  std::vector<TurnbullInterval> intervals_;
  std::vector<double> masses_;
  std::vector<double> tail_;  // suffix sums of masses_, one extra trailing 0
  double loglik_ = 0.0;
  long iterations_ = 0;
  bool converged_ = true;
};

// The sorted, disjoint set of maximal intersections. Every lower endpoint is
// the left endpoint of some observation and every upper endpoint the right
// endpoint of some observation. Throws std::invalid_argument on empty input.
std::vector<TurnbullInterval> turnbull_intervals(const std::vector<CensoredObservation>& obs);

struct EmNotConverged : std::runtime_error {
  EmNotConverged(SurvivalCurve last_iterate, long iterations);
  SurvivalCurve last;  // caller may accept or reject the last iterate
};

// NPMLE of the survival function via Turnbull's self-consistency EM, with the
// product-limit estimator as the exact-time special case. Deterministic and
// invariant to observation order (bit-for-bit). Throws EmNotConverged when
// max_iter is reached, std::invalid_argument on bad input or all-zero weights.
SurvivalCurve fit_npmle(const std::vector<CensoredObservation>& obs,
                        const NpmleOptions& opt = {});

// Naive dense-alpha transcription of the self-consistency update, kept as the
// serial reference the optimized kernel is tested and benchmarked against.
SurvivalCurve fit_npmle_reference(const std::vector<CensoredObservation>& obs,
                                  const NpmleOptions& opt = {});

// Sum_i w_i log(S(L_i) - S(R_i)), with exact observations contributing the
// log point mass at their time. Returns -inf when an observation has zero
// probability under the curve; 0*log(0) is taken as 0.
double log_likelihood(const std::vector<CensoredObservation>& obs, const SurvivalCurve& curve);

}  // namespace ictree
