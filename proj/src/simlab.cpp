#include "ictree/simlab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "ictree/stats.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ictree {

// ---------------------------------------------------------------------------
// Event-time distributions

EventDistribution exponential_dist(double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("exponential rate must be positive");
  return {EventDistribution::Family::exponential, rate, 0.0, 0.0};
}
EventDistribution weibull_dist(double shape, double scale) {
  if (!(shape > 0.0 && scale > 0.0))
    throw std::invalid_argument("weibull parameters must be positive");
  return {EventDistribution::Family::weibull, shape, scale, 0.0};
}
EventDistribution lognormal_dist(double mu, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("lognormal sigma must be positive");
  return {EventDistribution::Family::lognormal, mu, sigma, 0.0};
}
EventDistribution bathtub_dist(double a, double b, double c) {
  if (!(a > 0.0 && b > 0.0 && c > 0.0))
    throw std::invalid_argument("bathtub parameters must be positive");
  return {EventDistribution::Family::bathtub, a, b, c};
}

double EventDistribution::survival(double t) const {
  if (t <= 0.0) return 1.0;
  switch (family) {
    case Family::exponential: return std::exp(-p1 * t);
    case Family::weibull: return std::exp(-std::pow(t / p2, p1));
    case Family::lognormal: return 0.5 * std::erfc((std::log(t) - p1) / (p2 * std::sqrt(2.0)));
    case Family::bathtub:
      return std::exp(-0.5 * p1 * t * t) / std::pow(1.0 + p3 * t, p2 / p3);
  }
  return 0.0;
}

double EventDistribution::sample(Rng& rng) const {
  const double u = uniform01(rng);
  switch (family) {
    case Family::exponential: return -std::log(u) / p1;
    case Family::weibull: return p2 * std::pow(-std::log(u), 1.0 / p1);
    case Family::lognormal: return std::exp(p1 + p2 * normal_quantile(1.0 - u));
    case Family::bathtub: break;
  }
  // Bathtub: solve S(t) = u by bracketing bisection; S is strictly decreasing.
  double hi = 1.0;
  while (survival(hi) > u) {
    hi *= 2.0;
    if (hi > 1e12) throw std::runtime_error("bathtub sampler failed to bracket");
  }
  double lo = 0.0;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (survival(mid) > u)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double sample_event_time(const EventDistribution& dist, Rng& rng) { return dist.sample(rng); }

// ---------------------------------------------------------------------------
// Censoring mechanism

namespace {

double draw_gap(const GapSpec& gap, Rng& rng) {
  if (gap.kind == GapSpec::Kind::fixed) return gap.delta;
  return gap.lo + (gap.hi - gap.lo) * uniform01(rng);
}

}  // namespace

CensoredObservation censor_observation(double T, const CensoringMechanism& mech, Rng& rng) {
  if (!(T > 0.0)) throw std::invalid_argument("censor_observation: event time must be positive");
  // The full schedule is drawn regardless of T, keeping it independent of the
  // event time.
  double prev = 0.0;
  double containing_left = -1.0, containing_right = -1.0;
  for (int j = 0; j < mech.k; ++j) {
    const double t = prev + draw_gap(mech.gap, rng);
    if (containing_left < 0.0 && T <= t) {
      containing_left = prev;
      containing_right = t;
    }
    prev = t;
  }
  if (containing_left < 0.0) return right_censored_obs(prev);
  return interval_obs(containing_left, containing_right);
}

CalibratedMechanism calibrate_censoring(const std::function<double(Rng&)>& sample_event,
                                        double target, const CensoringPlan& plan,
                                        std::uint64_t seed) {
  if (!(target > 0.0 && target < 1.0))
    throw std::invalid_argument("calibrate_censoring: target must be in (0, 1)");
  Rng rng = make_rng(splitmix64(seed) ^ 0x63616c6962ULL);
  const int M = plan.draws;

  const bool none_arm = target <= 0.005;

  if (plan.knob == CensoringPlan::Knob::fixed_delta) {
    // fraction(delta) = P(T > k * delta), decreasing in delta
    std::vector<double> times(M);
    for (auto& t : times) t = sample_event(rng);
    std::sort(times.begin(), times.end());
    auto fraction = [&](double delta) {
      const double horizon = static_cast<double>(plan.k) * delta;
      const auto it = std::upper_bound(times.begin(), times.end(), horizon);
      return static_cast<double>(times.end() - it) / static_cast<double>(M);
    };
    double lo = 1e-9, hi = 1e9;
    const double want = none_arm ? 0.004 : target;
    if (fraction(lo) < want || fraction(hi) > want) {
      std::ostringstream msg;
      msg << "calibrate_censoring: target " << target << " unattainable; achievable range ["
          << fraction(hi) << ", " << fraction(lo) << "]";
      throw std::runtime_error(msg.str());
    }
    while (hi - lo > 1e-12 * std::max(1.0, hi)) {
      const double mid = 0.5 * (lo + hi);
      if (fraction(mid) >= want)
        lo = mid;
      else
        hi = mid;
    }
    const double delta = 0.5 * (lo + hi);
    const double achieved = fraction(delta);
    if (std::fabs(achieved - target) > plan.tolerance && !none_arm) {
      std::ostringstream msg;
      msg << "calibrate_censoring: achieved " << achieved << " vs target " << target;
      throw std::runtime_error(msg.str());
    }
    return {CensoringMechanism{plan.k, GapSpec{GapSpec::Kind::fixed, delta, 0.0, 0.0}},
            achieved};
  }

  if (plan.knob == CensoringPlan::Knob::uniform_scale) {
    // fraction(s) = P(T > s * B) for the k-gap base schedule sum B
    std::vector<double> ratios(M);
    for (auto& r : ratios) {
      const double t = sample_event(rng);
      double b = 0.0;
      for (int j = 0; j < plan.k; ++j) b += plan.gap.lo + (plan.gap.hi - plan.gap.lo) * uniform01(rng);
      r = t / b;
    }
    std::sort(ratios.begin(), ratios.end());
    auto fraction = [&](double s) {
      const auto it = std::upper_bound(ratios.begin(), ratios.end(), s);
      return static_cast<double>(ratios.end() - it) / static_cast<double>(M);
    };
    double lo = 1e-9, hi = 1e9;
    const double want = none_arm ? 0.004 : target;
    if (fraction(lo) < want || fraction(hi) > want) {
      std::ostringstream msg;
      msg << "calibrate_censoring: target " << target << " unattainable; achievable range ["
          << fraction(hi) << ", " << fraction(lo) << "]";
      throw std::runtime_error(msg.str());
    }
    while (hi - lo > 1e-12 * std::max(1.0, hi)) {
      const double mid = 0.5 * (lo + hi);
      if (fraction(mid) >= want)
        lo = mid;
      else
        hi = mid;
    }
    const double s = 0.5 * (lo + hi);
    const double achieved = fraction(s);
    if (std::fabs(achieved - target) > plan.tolerance && !none_arm) {
      std::ostringstream msg;
      msg << "calibrate_censoring: achieved " << achieved << " vs target " << target;
      throw std::runtime_error(msg.str());
    }
    return {CensoringMechanism{
                plan.k, GapSpec{GapSpec::Kind::uniform, 0.0, s * plan.gap.lo, s * plan.gap.hi}},
            achieved};
  }

  // schedule_length: count, per draw, how many gaps the schedule needs before
  // it covers T; fraction(k) = P(more than k gaps needed).
  std::vector<long> needs(static_cast<std::size_t>(plan.kmax) + 2, 0);
  for (int m = 0; m < M; ++m) {
    const double t = sample_event(rng);
    double cum = 0.0;
    int j = 0;
    while (j < plan.kmax) {
      cum += draw_gap(plan.gap, rng);
      ++j;
      if (t <= cum) break;
    }
    if (t > cum) j = plan.kmax + 1;  // beyond any admissible schedule
    ++needs[static_cast<std::size_t>(j)];
  }
  // fraction(k) = P(schedule of length k does not cover T) = P(needs > k)
  std::vector<double> fraction(static_cast<std::size_t>(plan.kmax) + 1, 0.0);
  {
    long beyond = 0;
    for (int k = plan.kmax; k >= 1; --k) {
      beyond += needs[static_cast<std::size_t>(k) + 1];
      fraction[static_cast<std::size_t>(k)] = static_cast<double>(beyond) / static_cast<double>(M);
    }
  }

  int best_k = -1;
  double best_gap = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= plan.kmax; ++k) {
    const double f = fraction[static_cast<std::size_t>(k)];
    const double gapv = none_arm ? (f < 0.005 ? 0.0 : std::numeric_limits<double>::infinity())
                                 : std::fabs(f - target);
    if (gapv < best_gap) {
      best_gap = gapv;
      best_k = k;
      if (none_arm && gapv == 0.0) break;  // smallest adequate k for the none arm
    }
  }
  const double achievable_max = fraction[1];
  if (best_k < 0 || target > achievable_max) {
    std::ostringstream msg;
    msg << "calibrate_censoring: target " << target << " unattainable; achievable range (0, "
        << achievable_max << "]";
    throw std::runtime_error(msg.str());
  }
  if (best_gap <= plan.tolerance)
    return {CensoringMechanism{best_k, plan.gap}, fraction[static_cast<std::size_t>(best_k)]};

  // Integer k alone can step over the target window when the event-time
  // distribution is concentrated; refine with a common scale on the gaps
  // around the chosen k.
  std::vector<double> ratios(static_cast<std::size_t>(M));
  for (auto& r : ratios) {
    const double t = sample_event(rng);
    double b = 0.0;
    for (int j = 0; j < best_k; ++j) b += draw_gap(plan.gap, rng);
    r = t / b;
  }
  std::sort(ratios.begin(), ratios.end());
  auto frac_scale = [&](double s) {
    const auto it = std::upper_bound(ratios.begin(), ratios.end(), s);
    return static_cast<double>(ratios.end() - it) / static_cast<double>(M);
  };
  double lo = 0.25, hi = 4.0;
  if (frac_scale(lo) < target || frac_scale(hi) > target) {
    std::ostringstream msg;
    msg << "calibrate_censoring: target " << target << " unattainable with k = " << best_k
        << "; achievable range [" << frac_scale(hi) << ", " << frac_scale(lo) << "]";
    throw std::runtime_error(msg.str());
  }
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (frac_scale(mid) >= target)
      lo = mid;
    else
      hi = mid;
  }
  const double s = 0.5 * (lo + hi);
  const double achieved = frac_scale(s);
  if (std::fabs(achieved - target) > plan.tolerance) {
    std::ostringstream msg;
    msg << "calibrate_censoring: achieved " << achieved << " vs target " << target;
    throw std::runtime_error(msg.str());
  }
  GapSpec scaled = plan.gap;
  if (scaled.kind == GapSpec::Kind::fixed) {
    scaled.delta *= s;
  } else {
    scaled.lo *= s;
    scaled.hi *= s;
  }
  return {CensoringMechanism{best_k, scaled}, achieved};
}

// ---------------------------------------------------------------------------
// Ground-truth structure match

bool structure_match(const Tree& tree, const GroundTruthTree& truth) {
  (void)truth;  // the canonical truth fixes variables; leaf params do not matter here
  if (tree.nodes.size() != 7) return false;
  const auto& root = tree.root();
  if (root.terminal || root.split.covariate != 0) return false;

  // Representative rows of the four leaf regions (X1..X6).
  const std::vector<std::vector<double>> reps = {
      {1.5, 1.0, 1.0, 3.0, 1.5, 1.0},  // X1 in {1,2}, X2 = 1
      {1.5, 2.0, 1.0, 3.0, 1.5, 1.0},  // X1 in {1,2}, X2 = 2
      {4.0, 1.5, 0.5, 3.0, 1.5, 1.0},  // X1 in {3,4,5}, X3 <= 1
      {4.0, 1.5, 1.5, 3.0, 1.5, 1.0},  // X1 in {3,4,5}, X3 > 1
  };

  auto first_step = [&](const std::vector<double>& row) {
    const auto& info = tree.covariates[root.split.covariate];
    const double v = row[root.split.covariate];
    const bool left = info.kind == CovariateKind::nominal
                          ? std::binary_search(root.split.left_levels.begin(),
                                               root.split.left_levels.end(),
                                               static_cast<int>(v))
                          : v <= root.split.threshold;
    return left ? root.left_child : root.right_child;
  };

  const int child_a = first_step(reps[0]);
  if (first_step(reps[1]) != child_a) return false;
  const int child_b = first_step(reps[2]);
  if (first_step(reps[3]) != child_b) return false;
  if (child_a == child_b) return false;

  const auto& na = tree.nodes[child_a];
  const auto& nb = tree.nodes[child_b];
  if (na.terminal || nb.terminal) return false;
  if (na.split.covariate != 1 || nb.split.covariate != 2) return false;
  if (!tree.nodes[na.left_child].terminal || !tree.nodes[na.right_child].terminal) return false;
  if (!tree.nodes[nb.left_child].terminal || !tree.nodes[nb.right_child].terminal) return false;

  try {
    if (route_row(tree, reps[0]) == route_row(tree, reps[1])) return false;
    if (route_row(tree, reps[2]) == route_row(tree, reps[3])) return false;
  } catch (const std::exception&) {
    return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Dataset generation

namespace {

int uniform_int(Rng& rng, int k) {  // 0..k-1
  const int v = static_cast<int>(uniform01(rng) * static_cast<double>(k));
  return std::min(v, k - 1);
}

Covariate numeric_covariate(std::string name, std::size_t n) {
  Covariate c;
  c.name = std::move(name);
  c.kind = CovariateKind::numeric;
  c.values.reserve(n);
  return c;
}

EventDistribution theta_dist(ThetaFamily family, double theta) {
  switch (family) {
    case ThetaFamily::exponential: return exponential_dist(std::exp(theta));
    case ThetaFamily::weibull_increasing: return weibull_dist(2.0, 10.0 * std::exp(theta));
    case ThetaFamily::weibull_decreasing: return weibull_dist(0.5, 5.0 * std::exp(theta));
  }
  throw std::logic_error("theta_dist: bad family");
}

}  // namespace

double sample_marginal_event_time(const SimConfig& sim, Rng& rng) {
  switch (sim.setup) {
    case Setup::null_design: return sim.dists.at(0).sample(rng);
    case Setup::tree_structured: {
      const double x1 = 1.0 + uniform_int(rng, 5);
      const double x2 = 1.0 + uniform_int(rng, 2);
      const double x3 = 2.0 * uniform01(rng);
      return sim.dists.at(static_cast<std::size_t>(sim.truth.leaf_index(x1, x2, x3))).sample(rng);
    }
    case Setup::linear:
    case Setup::nonlinear: {
      const double x1 = uniform01(rng);
      const double x2 = static_cast<double>(uniform_int(rng, 2));
      const double theta =
          sim.setup == Setup::linear
              ? -x1 - x2
              : -(std::cos((x1 + x2) * M_PI) + std::sqrt(x1 + x2));
      return theta_dist(sim.theta_family, theta).sample(rng);
    }
  }
  throw std::logic_error("sample_marginal_event_time: bad setup");
}

SimDataset gen_dataset(const SimConfig& sim, const CensoringMechanism* mech, int n, Rng& rng) {
  if (n <= 0) throw std::invalid_argument("gen_dataset: n must be positive");
  SimDataset ds;
  ds.observations.reserve(static_cast<std::size_t>(n));
  ds.true_times.reserve(static_cast<std::size_t>(n));
  ds.true_dists.reserve(static_cast<std::size_t>(n));

  const auto un = static_cast<std::size_t>(n);
  if (sim.setup == Setup::null_design) {
    // X1, X2 uniform(1,2); X3 ordinal on the 11-point grid of (0,1);
    // X4, X5 binary factors.
    ds.covariates.resize(5);
    ds.covariates[0] = numeric_covariate("X1", un);
    ds.covariates[1] = numeric_covariate("X2", un);
    ds.covariates[2].name = "X3";
    ds.covariates[2].kind = CovariateKind::ordinal;
    for (int g = 0; g <= 10; ++g)
      ds.covariates[2].level_scores.push_back(0.1 * static_cast<double>(g));
    ds.covariates[3].name = "X4";
    ds.covariates[3].kind = CovariateKind::nominal;
    ds.covariates[3].levels = {"0", "1"};
    ds.covariates[4].name = "X5";
    ds.covariates[4].kind = CovariateKind::nominal;
    ds.covariates[4].levels = {"0", "1"};

    const auto& dist = sim.dists.at(0);
    for (int i = 0; i < n; ++i) {
      ds.covariates[0].values.push_back(1.0 + uniform01(rng));
      ds.covariates[1].values.push_back(1.0 + uniform01(rng));
      ds.covariates[2].values.push_back(ds.covariates[2].level_scores[static_cast<std::size_t>(
          uniform_int(rng, 11))]);
      ds.covariates[3].values.push_back(static_cast<double>(uniform_int(rng, 2)));
      ds.covariates[4].values.push_back(static_cast<double>(uniform_int(rng, 2)));
      const double t = dist.sample(rng);
      ds.true_times.push_back(t);
      ds.true_dists.push_back(dist);
      ds.observations.push_back(mech ? censor_observation(t, *mech, rng) : exact_obs(t));
    }
    return ds;
  }

  if (sim.setup == Setup::tree_structured) {
    if (sim.dists.size() != 4)
      throw std::invalid_argument("gen_dataset: tree setup needs 4 leaf distributions");
    ds.covariates.resize(6);
    const char* names[] = {"X1", "X2", "X3", "X4", "X5", "X6"};
    for (int c = 0; c < 6; ++c) ds.covariates[c] = numeric_covariate(names[c], un);
    for (int i = 0; i < n; ++i) {
      const double x1 = 1.0 + uniform_int(rng, 5);
      const double x2 = 1.0 + uniform_int(rng, 2);
      const double x3 = 2.0 * uniform01(rng);
      const double x4 = 1.0 + uniform_int(rng, 5);
      const double x5 = 1.0 + uniform_int(rng, 2);
      const double x6 = 2.0 * uniform01(rng);
      ds.covariates[0].values.push_back(x1);
      ds.covariates[1].values.push_back(x2);
      ds.covariates[2].values.push_back(x3);
      ds.covariates[3].values.push_back(x4);
      ds.covariates[4].values.push_back(x5);
      ds.covariates[5].values.push_back(x6);
      const auto& dist = sim.dists[static_cast<std::size_t>(sim.truth.leaf_index(x1, x2, x3))];
      const double t = dist.sample(rng);
      ds.true_times.push_back(t);
      ds.true_dists.push_back(dist);
      ds.observations.push_back(mech ? censor_observation(t, *mech, rng) : exact_obs(t));
    }
    return ds;
  }

  // Setups with a location parameter theta(X1, X2).
  ds.covariates.resize(6);
  const char* names[] = {"X1", "X2", "X3", "X4", "X5", "X6"};
  for (int c = 0; c < 6; ++c) ds.covariates[c] = numeric_covariate(names[c], un);
  for (int i = 0; i < n; ++i) {
    const double x1 = uniform01(rng);
    const double x2 = static_cast<double>(uniform_int(rng, 2));
    const double x3 = static_cast<double>(uniform_int(rng, 2));
    const double x4 = uniform01(rng);
    const double x5 = uniform01(rng);
    const double x6 = static_cast<double>(uniform_int(rng, 2));
    ds.covariates[0].values.push_back(x1);
    ds.covariates[1].values.push_back(x2);
    ds.covariates[2].values.push_back(x3);
    ds.covariates[3].values.push_back(x4);
    ds.covariates[4].values.push_back(x5);
    ds.covariates[5].values.push_back(x6);
    const double theta = sim.setup == Setup::linear
                             ? -x1 - x2
                             : -(std::cos((x1 + x2) * M_PI) + std::sqrt(x1 + x2));
    const EventDistribution dist = theta_dist(sim.theta_family, theta);
    const double t = dist.sample(rng);
    ds.true_times.push_back(t);
    ds.true_dists.push_back(dist);
    ds.observations.push_back(mech ? censor_observation(t, *mech, rng) : exact_obs(t));
  }
  return ds;
}

// ---------------------------------------------------------------------------
// Integrated L2 prediction error

namespace {

double simpson(double fa, double fm, double fb, double a, double b) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(fa, flm, fm, a, m);
  const double right = simpson(fm, frm, fb, m, b);
  const double diff = left + right - whole;
  if (depth <= 0 || std::fabs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate_piece(double c, const EventDistribution& truth, double a, double b,
                       double tol) {
  if (b <= a) return 0.0;
  auto f = [&](double t) {
    const double d = c - truth.survival(t);
    return d * d;
  };
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = simpson(fa, fm, fb, a, b);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 40);
}

}  // namespace

double l2_distance(const SurvivalCurve& curve, const EventDistribution& truth, double tau,
                   double quad_tol) {
  if (!(tau > 0.0)) return 0.0;
  double total = 0.0;
  double prev = 0.0;
  const auto& iv = curve.intervals();
  for (std::size_t j = 0; j < iv.size() && prev < tau; ++j) {
    const double b = std::min(iv[j].upper, tau);
    total += integrate_piece(curve.tail_mass(j), truth, prev, b, quad_tol);
    prev = std::max(prev, b);
  }
  if (prev < tau) total += integrate_piece(0.0, truth, prev, tau, quad_tol);
  return total;
}

double integrated_l2(const std::vector<const SurvivalCurve*>& predicted,
                     const std::vector<EventDistribution>& truth,
                     const std::vector<double>& event_times, double quad_tol) {
  if (predicted.empty() || predicted.size() != truth.size())
    throw std::invalid_argument("integrated_l2: empty or mismatched inputs");
  const double tau = *std::max_element(event_times.begin(), event_times.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i)
    sum += l2_distance(*predicted[i], truth[i], tau, quad_tol) / tau;
  return sum / static_cast<double>(predicted.size());
}

// ---------------------------------------------------------------------------
// Experiment runner

std::string method_name(Method m) {
  switch (m) {
    case Method::oracle: return "oracle";
    case Method::ic: return "ic";
    case Method::impute_left: return "left";
    case Method::impute_mid: return "mid";
    case Method::impute_right: return "right";
  }
  return "?";
}

namespace {

std::vector<CensoredObservation> exact_from_times(const std::vector<double>& times) {
  std::vector<CensoredObservation> obs;
  obs.reserve(times.size());
  for (double t : times) obs.push_back(exact_obs(t));
  return obs;
}

Tree fit_method(Method m, const SimDataset& train, const TreeConfig& config) {
  switch (m) {
    case Method::oracle:
      return grow_tree(exact_from_times(train.true_times), train.covariates, config);
    case Method::ic: return grow_tree(train.observations, train.covariates, config);
    case Method::impute_left:
      return fit_imputed_tree(train.observations, train.covariates, ImputationMode::left, config);
    case Method::impute_mid:
      return fit_imputed_tree(train.observations, train.covariates, ImputationMode::mid, config);
    case Method::impute_right:
      return fit_imputed_tree(train.observations, train.covariates, ImputationMode::right,
                              config);
  }
  throw std::logic_error("fit_method: bad method");
}

std::vector<double> row_values(const SimDataset& ds, int row) {
  std::vector<double> v;
  v.reserve(ds.covariates.size());
  for (const auto& c : ds.covariates) v.push_back(c.values[static_cast<std::size_t>(row)]);
  return v;
}

TrialRecord run_one_trial(const ExperimentConfig& cfg, const CensoringMechanism& mech,
                          int trial) {
  TrialRecord rec;
  rec.trial = trial;
  Rng rng = make_trial_rng(cfg.seed, static_cast<std::uint64_t>(trial));

  try {
    switch (cfg.kind) {
      case ExperimentKind::unbiasedness: {
        const SimDataset ds = gen_dataset(cfg.sim, &mech, cfg.n, rng);
        const auto sel = select_variable(ds.observations, ds.covariates, cfg.tree);
        rec.selected = sel.best;
        rec.split_at_alpha = sel.significant;
        break;
      }
      case ExperimentKind::recovery: {
        const SimDataset ds = gen_dataset(cfg.sim, &mech, cfg.n, rng);
        rec.recovered.reserve(cfg.methods.size());
        for (Method m : cfg.methods) {
          const Tree tree = fit_method(m, ds, cfg.tree);
          rec.recovered.push_back(structure_match(tree, cfg.sim.truth) ? 1 : 0);
        }
        break;
      }
      case ExperimentKind::prediction: {
        const SimDataset train = gen_dataset(cfg.sim, &mech, cfg.n, rng);
        const SimDataset test = gen_dataset(cfg.sim, nullptr, cfg.n, rng);
        const double tau =
            *std::max_element(test.true_times.begin(), test.true_times.end());

        // Distinct true curves (few in the tree setup); cache the per-pair
        // integral by (terminal node, true curve).
        std::vector<EventDistribution> uniq;
        std::vector<int> dist_id(test.true_dists.size());
        for (std::size_t i = 0; i < test.true_dists.size(); ++i) {
          const auto it = std::find(uniq.begin(), uniq.end(), test.true_dists[i]);
          if (it == uniq.end()) {
            dist_id[i] = static_cast<int>(uniq.size());
            uniq.push_back(test.true_dists[i]);
          } else {
            dist_id[i] = static_cast<int>(it - uniq.begin());
          }
        }

        rec.l2.reserve(cfg.methods.size());
        for (Method m : cfg.methods) {
          const Tree tree = fit_method(m, train, cfg.tree);
          std::map<std::pair<int, int>, double> cache;
          double sum = 0.0;
          for (int i = 0; i < cfg.n; ++i) {
            const int node = route_row(tree, row_values(test, i));
            const auto key = std::make_pair(node, dist_id[static_cast<std::size_t>(i)]);
            auto it = cache.find(key);
            if (it == cache.end()) {
              const double v = l2_distance(tree.nodes[node].curve,
                                           uniq[static_cast<std::size_t>(key.second)], tau);
              it = cache.emplace(key, v).first;
            }
            sum += it->second;
          }
          rec.l2.push_back(sum / (tau * static_cast<double>(cfg.n)));
        }
        break;
      }
    }
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.error = e.what();
  }
  return rec;
}

void aggregate(ExperimentResult& res) {
  const auto& cfg = res.config;
  auto& agg = res.agg;
  const std::size_t n_methods = cfg.methods.size();

  for (const auto& t : res.trials) (t.ok ? agg.ok_trials : agg.failed_trials)++;

  if (cfg.kind == ExperimentKind::unbiasedness) {
    const std::size_t n_cov = cfg.sim.setup == Setup::null_design ? 5 : 6;
    agg.selection_counts.assign(n_cov, 0);
    long split = 0;
    for (const auto& t : res.trials) {
      if (!t.ok || t.selected < 0) continue;
      ++agg.selection_counts[static_cast<std::size_t>(t.selected)];
      split += t.split_at_alpha ? 1 : 0;
    }
    agg.chisq_p = chisq_uniformity_pvalue(agg.selection_counts);
    agg.split_fraction =
        agg.ok_trials > 0 ? static_cast<double>(split) / static_cast<double>(agg.ok_trials) : 0.0;
    return;
  }

  if (cfg.kind == ExperimentKind::recovery) {
    agg.recovery_pct.assign(n_methods, 0.0);
    for (std::size_t m = 0; m < n_methods; ++m) {
      long hits = 0;
      for (const auto& t : res.trials)
        if (t.ok) hits += t.recovered[m];
      agg.recovery_pct[m] =
          agg.ok_trials > 0 ? 100.0 * static_cast<double>(hits) / static_cast<double>(agg.ok_trials)
                            : 0.0;
    }
    return;
  }

  agg.mean_l2.assign(n_methods, 0.0);
  agg.median_l2.assign(n_methods, 0.0);
  agg.signed_rank_vs_ic.assign(n_methods, 1.0);
  int ic_index = -1;
  for (std::size_t m = 0; m < n_methods; ++m)
    if (cfg.methods[m] == Method::ic) ic_index = static_cast<int>(m);

  for (std::size_t m = 0; m < n_methods; ++m) {
    std::vector<double> vals;
    for (const auto& t : res.trials)
      if (t.ok) vals.push_back(t.l2[m]);
    if (vals.empty()) continue;
    double mean = 0.0;
    for (double v : vals) mean += v;
    agg.mean_l2[m] = mean / static_cast<double>(vals.size());
    std::vector<double> sorted = vals;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t mid = sorted.size() / 2;
    agg.median_l2[m] = sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  }
  if (ic_index >= 0) {
    for (std::size_t m = 0; m < n_methods; ++m) {
      if (static_cast<int>(m) == ic_index) continue;
      std::vector<double> diffs;
      for (const auto& t : res.trials)
        if (t.ok) diffs.push_back(t.l2[m] - t.l2[static_cast<std::size_t>(ic_index)]);
      agg.signed_rank_vs_ic[m] = signed_rank_pvalue(diffs);
    }
  }
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  if (config.trials < 1) throw std::invalid_argument("run_experiment: trials >= 1 required");
  ExperimentResult res;
  res.config = config;

  const SimConfig& sim = config.sim;
  auto sampler = [&sim](Rng& r) { return sample_marginal_event_time(sim, r); };
  res.mechanism = calibrate_censoring(sampler, config.censoring.target, config.censoring,
                                      config.seed);

  res.trials.resize(static_cast<std::size_t>(config.trials));
  const CensoringMechanism mech = res.mechanism.mechanism;

#ifdef _OPENMP
  const int jobs = config.jobs > 0 ? config.jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
#endif
  for (int t = 0; t < config.trials; ++t)
    res.trials[static_cast<std::size_t>(t)] = run_one_trial(config, mech, t);

  aggregate(res);
  return res;
}

}  // namespace ictree
