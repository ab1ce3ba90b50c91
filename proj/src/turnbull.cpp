#include "ictree/turnbull.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <sstream>
#include <tuple>

namespace ictree {

namespace {

// Endpoints live on an ordered set of positions (value, bump): bump 0 is "at
// the value", bump 1 is "just after it". An open left endpoint of (L, R]
// occupies (L, 1); a closed right endpoint occupies (R, 0); an exact
// observation occupies the single position (t, 0) on both sides. Comparing
// positions instead of raw values removes every epsilon decision from the
// interval logic.
struct Pos {
  double value;
  int bump;

  friend bool operator<(const Pos& a, const Pos& b) {
    return a.value < b.value || (a.value == b.value && a.bump < b.bump);
  }
  friend bool operator<=(const Pos& a, const Pos& b) { return !(b < a); }
};

Pos obs_left_pos(const CensoredObservation& o) { return {o.left, o.exact ? 0 : 1}; }
Pos obs_right_pos(const CensoredObservation& o) { return {o.right, 0}; }
Pos tb_left_pos(const TurnbullInterval& t) { return {t.lower, t.degenerate() ? 0 : 1}; }

// Deduplicated observation: identical intervals merged, weights combined in a
// canonical order so the fit is bit-for-bit invariant to input order.
struct UniqueObs {
  double left;
  double right;
  bool exact;
  double weight;
  std::size_t lo = 0;  // first Turnbull interval contained in (left, right]
  std::size_t hi = 0;  // one past the last
};

std::vector<UniqueObs> dedup_observations(const std::vector<CensoredObservation>& obs) {
  std::vector<std::tuple<double, int, double, double>> keys;  // (L, Lbump, R, w)
  keys.reserve(obs.size());
  for (const auto& o : obs) {
    if (o.weight == 0.0) continue;
    keys.emplace_back(o.left, o.exact ? 0 : 1, o.right, o.weight);
  }
  if (keys.empty()) throw std::invalid_argument("fit_npmle: all weights are zero");
  std::sort(keys.begin(), keys.end());

  std::vector<UniqueObs> out;
  for (std::size_t i = 0; i < keys.size();) {
    std::size_t j = i;
    double w = 0.0;
    while (j < keys.size() && std::get<0>(keys[j]) == std::get<0>(keys[i]) &&
           std::get<1>(keys[j]) == std::get<1>(keys[i]) &&
           std::get<2>(keys[j]) == std::get<2>(keys[i])) {
      w += std::get<3>(keys[j]);  // weights already sorted ascending within the group
      ++j;
    }
    out.push_back({std::get<0>(keys[i]), std::get<2>(keys[i]), std::get<1>(keys[i]) == 0, w});
    i = j;
  }
  return out;
}

// Locate the contiguous run of Turnbull intervals contained in each unique
// observation. Containment is positional: [tb_left, tb_right] inside
// [obs_left, obs_right]. The scan construction guarantees the run is
// contiguous and nonempty.
void attach_ranges(std::vector<UniqueObs>& uniq, const std::vector<TurnbullInterval>& tb) {
  std::vector<Pos> lefts, rights;
  lefts.reserve(tb.size());
  rights.reserve(tb.size());
  for (const auto& t : tb) {
    lefts.push_back(tb_left_pos(t));
    rights.push_back({t.upper, 0});
  }
  for (auto& u : uniq) {
    const Pos a{u.left, u.exact ? 0 : 1};
    const Pos b{u.right, 0};
    u.lo = static_cast<std::size_t>(
        std::lower_bound(lefts.begin(), lefts.end(), a,
                         [](const Pos& x, const Pos& y) { return x < y; }) -
        lefts.begin());
    u.hi = static_cast<std::size_t>(
        std::upper_bound(rights.begin(), rights.end(), b,
                         [](const Pos& x, const Pos& y) { return x < y; }) -
        rights.begin());
    if (u.lo >= u.hi)
      throw std::logic_error("fit_npmle: observation contains no Turnbull interval");
  }
}

struct EmState {
  std::vector<double> masses;
  double loglik = 0.0;
  long iterations = 0;
  bool converged = false;
};

// One pass of the self-consistency update over all unique observations.
// Prefix sums give each observation's probability in O(1) and a difference
// array accumulates the redistributed mass, so an iteration costs O(n + J)
// instead of the naive O(n*J).
EmState run_em(const std::vector<UniqueObs>& uniq, std::size_t n_intervals,
               const NpmleOptions& opt) {
  const std::size_t J = n_intervals;
  EmState st;
  st.masses.assign(J, 1.0 / static_cast<double>(J));

  double total_weight = 0.0;
  for (const auto& u : uniq) total_weight += u.weight;

  std::vector<double> prefix(J + 1), acc(J + 1), next(J);
  double prev_loglik = -kInf;

  for (long iter = 1; iter <= opt.max_iter; ++iter) {
    prefix[0] = 0.0;
    for (std::size_t j = 0; j < J; ++j) prefix[j + 1] = prefix[j] + st.masses[j];
    std::fill(acc.begin(), acc.end(), 0.0);

    double loglik = 0.0;
    for (const auto& u : uniq) {
      const double prob = prefix[u.hi] - prefix[u.lo];
      if (!(prob > 0.0))
        throw std::logic_error("fit_npmle: observation probability underflowed to zero");
      const double r = u.weight / prob;
      acc[u.lo] += r;
      acc[u.hi] -= r;
      if (opt.check_monotone) loglik += u.weight * std::log(prob);
    }

    if (opt.check_monotone) {
      if (loglik + 1e-9 * (1.0 + std::fabs(loglik)) < prev_loglik)
        throw std::logic_error("fit_npmle: log-likelihood decreased during EM");
      prev_loglik = loglik;
    }

    double run = 0.0, delta = 0.0, sum = 0.0;
    for (std::size_t j = 0; j < J; ++j) {
      run += acc[j];
      next[j] = st.masses[j] * run / total_weight;
      if (next[j] < 1e-300) next[j] = 0.0;  // underflow clamp, then renormalize
      delta = std::max(delta, std::fabs(next[j] - st.masses[j]));
      sum += next[j];
    }
    for (std::size_t j = 0; j < J; ++j) st.masses[j] = next[j] / sum;

    st.iterations = iter;
    if (delta < opt.tol) {
      st.converged = true;
      break;
    }
  }

  prefix[0] = 0.0;
  for (std::size_t j = 0; j < J; ++j) prefix[j + 1] = prefix[j] + st.masses[j];
  st.loglik = 0.0;
  for (const auto& u : uniq) {
    const double prob = prefix[u.hi] - prefix[u.lo];
    st.loglik += u.weight * std::log(prob);
  }
  return st;
}

// Closed-form product-limit estimator for exact event / right-censored data;
// this is the NPMLE in that case, so no iteration is needed. Masses are
// attached to the Turnbull intervals (degenerate at event times, plus a
// trailing (c, +inf] interval when the largest observation is censored).
SurvivalCurve fit_product_limit(const std::vector<CensoredObservation>& obs) {
  auto tb = turnbull_intervals(obs);
  auto uniq = dedup_observations(obs);
  attach_ranges(uniq, tb);

  // An event at time t is at risk for every jump point <= t, i.e. intervals
  // 0..lo. An observation censored at c is at risk for jumps <= c, which are
  // exactly the intervals before its containment range (the scan guarantees
  // every earlier interval ends at or before c). Suffix sums give the at-risk
  // weight per jump.
  const std::size_t J = tb.size();
  std::vector<double> event_weight(J, 0.0);
  std::vector<double> last_risk(J, 0.0);  // weight leaving the risk set after interval j

  for (const auto& u : uniq) {
    if (u.exact) {
      event_weight[u.lo] += u.weight;
      last_risk[u.lo] += u.weight;
    } else if (u.lo > 0) {
      last_risk[u.lo - 1] += u.weight;
    }
  }
  std::vector<double> at_risk(J + 1, 0.0);
  for (std::size_t j = J; j-- > 0;) at_risk[j] = at_risk[j + 1] + last_risk[j];

  std::vector<double> masses(J, 0.0);
  double surv = 1.0;
  for (std::size_t j = 0; j < J; ++j) {
    if (tb[j].degenerate()) {
      const double hazard = at_risk[j] > 0.0 ? event_weight[j] / at_risk[j] : 0.0;
      const double next_surv = surv * (1.0 - hazard);
      masses[j] = surv - next_surv;
      surv = next_surv;
    } else {
      // non-degenerate interval in exact-time data can only be the trailing
      // (c, +inf] set; it absorbs the remaining survival mass
      masses[j] = surv;
      surv = 0.0;
    }
  }

  // Normalize tiny rounding drift so the masses sum to one exactly.
  double sum = std::accumulate(masses.begin(), masses.end(), 0.0);
  if (sum > 0.0)
    for (auto& m : masses) m /= sum;

  // Log-likelihood from the containment ranges.
  std::vector<double> prefix(J + 1, 0.0);
  for (std::size_t j = 0; j < J; ++j) prefix[j + 1] = prefix[j] + masses[j];
  double loglik = 0.0;
  for (const auto& u : uniq) {
    const double prob = prefix[u.hi] - prefix[u.lo];
    loglik += prob > 0.0 ? u.weight * std::log(prob) : -kInf;
  }

  return SurvivalCurve(std::move(tb), std::move(masses), loglik, 0, true);
}

}  // namespace

void validate_observations(const std::vector<CensoredObservation>& obs) {
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const auto& o = obs[i];
    std::ostringstream at;
    at << "observation " << i << ": ";
    if (!(o.left >= 0.0) || std::isnan(o.right))
      throw std::invalid_argument(at.str() + "endpoints must be nonnegative");
    if (!(o.left <= o.right)) throw std::invalid_argument(at.str() + "left > right");
    if (o.exact && (o.left != o.right || !std::isfinite(o.right)))
      throw std::invalid_argument(at.str() + "exact observation needs finite left == right");
    if (!o.exact && o.left == o.right)
      throw std::invalid_argument(at.str() + "empty interval (left == right but not exact)");
    if (!(o.weight >= 0.0)) throw std::invalid_argument(at.str() + "negative weight");
  }
}

bool is_exact_time_data(const std::vector<CensoredObservation>& obs) {
  for (const auto& o : obs)
    if (!o.exact && !o.right_censored()) return false;
  return true;
}

SurvivalCurve::SurvivalCurve(std::vector<TurnbullInterval> intervals, std::vector<double> masses,
                             double loglik, long iterations, bool converged)
    : intervals_(std::move(intervals)),
      masses_(std::move(masses)),
      loglik_(loglik),
      iterations_(iterations),
      converged_(converged) {
  assert(intervals_.size() == masses_.size());
  tail_.assign(masses_.size() + 1, 0.0);
  for (std::size_t j = masses_.size(); j-- > 0;) tail_[j] = tail_[j + 1] + masses_[j];
}

double SurvivalCurve::survival(double t) const {
  // upper endpoints are strictly increasing; first interval with upper > t
  std::size_t lo = 0, hi = intervals_.size();
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (intervals_[mid].upper > t)
      hi = mid;
    else
      lo = mid + 1;
  }
  return tail_[lo];
}

std::optional<double> SurvivalCurve::quantile(double p) const {
  for (std::size_t j = 0; j < intervals_.size(); ++j) {
    if (tail_[j + 1] <= p) {
      if (!std::isfinite(intervals_[j].upper)) return std::nullopt;
      return intervals_[j].upper;
    }
  }
  return std::nullopt;
}

std::vector<TurnbullInterval> turnbull_intervals(const std::vector<CensoredObservation>& obs) {
  if (obs.empty()) throw std::invalid_argument("turnbull_intervals: no observations");
  validate_observations(obs);

  // Labeled endpoint positions, sorted with left endpoints before right ones
  // at the same position. A maximal intersection is exactly a left endpoint
  // immediately followed by a right endpoint.
  struct Endpoint {
    Pos pos;
    bool is_right;
  };
  std::vector<Endpoint> pts;
  pts.reserve(2 * obs.size());
  for (const auto& o : obs) {
    pts.push_back({obs_left_pos(o), false});
    pts.push_back({obs_right_pos(o), true});
  }
  std::sort(pts.begin(), pts.end(), [](const Endpoint& a, const Endpoint& b) {
    if (a.pos.value != b.pos.value) return a.pos.value < b.pos.value;
    if (a.pos.bump != b.pos.bump) return a.pos.bump < b.pos.bump;
    return a.is_right < b.is_right;
  });

  std::vector<TurnbullInterval> out;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    if (!pts[i].is_right && pts[i + 1].is_right)
      out.push_back({pts[i].pos.value, pts[i + 1].pos.value});
  return out;
}

EmNotConverged::EmNotConverged(SurvivalCurve last_iterate, long iterations)
    : std::runtime_error("fit_npmle: EM did not converge within " + std::to_string(iterations) +
                         " iterations"),
      last(std::move(last_iterate)) {}

SurvivalCurve fit_npmle(const std::vector<CensoredObservation>& obs, const NpmleOptions& opt) {
  if (obs.empty()) throw std::invalid_argument("fit_npmle: no observations");
  validate_observations(obs);

  if (opt.allow_product_limit && is_exact_time_data(obs)) return fit_product_limit(obs);

  auto tb = turnbull_intervals(obs);
  auto uniq = dedup_observations(obs);
  attach_ranges(uniq, tb);

  if (tb.size() == 1) {
    std::vector<double> masses{1.0};
    double w = 0.0;
    for (const auto& u : uniq) w += u.weight;
    (void)w;
    return SurvivalCurve(std::move(tb), std::move(masses), 0.0, 0, true);
  }

  EmState st = run_em(uniq, tb.size(), opt);
  SurvivalCurve curve(std::move(tb), std::move(st.masses), st.loglik, st.iterations,
                      st.converged);
  if (!st.converged) throw EmNotConverged(std::move(curve), st.iterations);
  return curve;
}

SurvivalCurve fit_npmle_reference(const std::vector<CensoredObservation>& obs,
                                  const NpmleOptions& opt) {
  if (obs.empty()) throw std::invalid_argument("fit_npmle_reference: no observations");
  validate_observations(obs);

  auto tb = turnbull_intervals(obs);
  const std::size_t J = tb.size();
  const std::size_t n = obs.size();

  // Dense membership matrix alpha[i][j] = 1 iff interval j inside obs i.
  std::vector<std::vector<char>> alpha(n, std::vector<char>(J, 0));
  for (std::size_t i = 0; i < n; ++i) {
    const Pos a = obs_left_pos(obs[i]);
    const Pos b = obs_right_pos(obs[i]);
    for (std::size_t j = 0; j < J; ++j) {
      const Pos ta = tb_left_pos(tb[j]);
      const Pos tbp{tb[j].upper, 0};
      alpha[i][j] = (a <= ta && tbp <= b) ? 1 : 0;
    }
  }

  double total_weight = 0.0;
  for (const auto& o : obs) total_weight += o.weight;
  if (total_weight <= 0.0) throw std::invalid_argument("fit_npmle_reference: all weights zero");

  std::vector<double> p(J, 1.0 / static_cast<double>(J)), next(J);
  long iterations = 0;
  bool converged = false;
  for (long iter = 1; iter <= opt.max_iter; ++iter) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (obs[i].weight == 0.0) continue;
      double denom = 0.0;
      for (std::size_t j = 0; j < J; ++j)
        if (alpha[i][j]) denom += p[j];
      for (std::size_t j = 0; j < J; ++j)
        if (alpha[i][j]) next[j] += obs[i].weight * p[j] / denom;
    }
    double delta = 0.0, sum = 0.0;
    for (std::size_t j = 0; j < J; ++j) {
      next[j] /= total_weight;
      if (next[j] < 1e-300) next[j] = 0.0;
      delta = std::max(delta, std::fabs(next[j] - p[j]));
      sum += next[j];
    }
    for (std::size_t j = 0; j < J; ++j) p[j] = next[j] / sum;
    iterations = iter;
    if (delta < opt.tol) {
      converged = true;
      break;
    }
  }

  double loglik = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (obs[i].weight == 0.0) continue;
    double prob = 0.0;
    for (std::size_t j = 0; j < J; ++j)
      if (alpha[i][j]) prob += p[j];
    loglik += prob > 0.0 ? obs[i].weight * std::log(prob) : -kInf;
  }

  SurvivalCurve curve(std::move(tb), std::move(p), loglik, iterations, converged);
  if (!converged) throw EmNotConverged(std::move(curve), iterations);
  return curve;
}

double log_likelihood(const std::vector<CensoredObservation>& obs, const SurvivalCurve& curve) {
  double ll = 0.0;
  for (const auto& o : obs) {
    double prob;
    if (o.exact) {
      // point mass at t: S(t-) - S(t); the jump at t, if any, sits in the
      // unique interval with upper endpoint == t
      const auto& iv = curve.intervals();
      std::size_t lo = 0, hi = iv.size();
      while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (iv[mid].upper >= o.left)
          hi = mid;
        else
          lo = mid + 1;
      }
      prob = (lo < iv.size() && iv[lo].upper == o.left) ? curve.masses()[lo] : 0.0;
    } else {
      const double sr = o.right == kInf ? 0.0 : curve.survival(o.right);
      prob = curve.survival(o.left) - sr;
    }
    if (prob <= 0.0) {
      if (o.weight == 0.0) continue;  // 0 * log 0 := 0
      return -kInf;
    }
    ll += o.weight * std::log(prob);
  }
  return ll;
}

}  // namespace ictree
