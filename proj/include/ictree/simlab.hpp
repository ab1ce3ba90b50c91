#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ictree/impute.hpp"
#include "ictree/rng.hpp"
#include "ictree/tree.hpp"

namespace ictree {

// Event-time distribution with a closed-form survival function. Sampling is
// by inversion; the bathtub family inverts S numerically.
struct EventDistribution {
  enum class Family { exponential, weibull, lognormal, bathtub };
  Family family = Family::exponential;
  double p1 = 1.0;  // rate | shape | mu    | a
  double p2 = 0.0;  //      | scale | sigma | b
  double p3 = 0.0;  //                      | c

  double survival(double t) const;
  double sample(Rng& rng) const;

  friend bool operator==(const EventDistribution&, const EventDistribution&) = default;
};

EventDistribution exponential_dist(double rate);
EventDistribution weibull_dist(double shape, double scale);
EventDistribution lognormal_dist(double mu, double sigma);  // log-scale parameters
EventDistribution bathtub_dist(double a, double b, double c);

double sample_event_time(const EventDistribution& dist, Rng& rng);

// Examination-schedule censoring: k interior examination times at cumulative
// gaps, each observation drawing its own schedule independent of T.
struct GapSpec {
  enum class Kind { fixed, uniform };
  Kind kind = Kind::fixed;
  double delta = 1.0;         // fixed
  double lo = 0.3, hi = 0.7;  // uniform
};

struct CensoringMechanism {
  int k = 5;
  GapSpec gap;
};

// Returns the unique schedule interval (t_{j-1}, t_j] containing T, or a
// right-censored observation at t_k when T lies beyond the last examination.
CensoredObservation censor_observation(double T, const CensoringMechanism& mech, Rng& rng);

struct CensoringPlan {
  double target = 0.2;  // right-censoring fraction; <= 0.005 is the "none" arm
  enum class Knob {
    fixed_delta,      // k fixed, bisect the fixed gap width
    schedule_length,  // gap spec fixed, search the number of examinations k
    uniform_scale,    // k fixed, bisect a common scale on uniform gaps
  };
  Knob knob = Knob::schedule_length;
  int k = 5;
  GapSpec gap{GapSpec::Kind::uniform, 0.5, 0.3, 0.7};
  int draws = 100000;
  int kmax = 4096;
  double tolerance = 0.02;
};

struct CalibratedMechanism {
  CensoringMechanism mechanism;
  double achieved = 0.0;  // Monte Carlo right-censoring fraction of the result
};

// Monte Carlo search of the plan's free knob until the right-censoring
// fraction is within plan.tolerance of the target; deterministic given seed.
// Throws std::runtime_error with the achievable range when the target cannot
// be reached.
CalibratedMechanism calibrate_censoring(const std::function<double(Rng&)>& sample_event,
                                        double target, const CensoringPlan& plan,
                                        std::uint64_t seed);

// Canonical reconstruction of the simulated tree truth: root on X1 {1,2} vs
// {3,4,5}, left child on X2 = 1 vs 2, right child on X3 <= 1 vs > 1, leaves
// numbered left to right.
struct GroundTruthTree {
  std::array<int, 4> leaf_params{0, 1, 2, 3};

  int leaf_index(double x1, double x2, double x3) const {
    if (x1 <= 2.5) return leaf_params[x2 <= 1.5 ? 0 : 1];
    return leaf_params[x3 <= 1.0 ? 2 : 3];
  }
};

// True iff the fitted tree reproduces the truth's topology and split
// variables: three internal nodes on X1/X2/X3 whose rules route the four
// leaf-region representative points to four distinct terminals (left/right
// orientation is not distinguished). Thresholds are only required to put the
// region centroids on the correct side.
bool structure_match(const Tree& tree, const GroundTruthTree& truth);

enum class Setup { null_design, tree_structured, linear, nonlinear };
enum class ThetaFamily { exponential, weibull_increasing, weibull_decreasing };

struct SimConfig {
  Setup setup = Setup::tree_structured;
  // null_design: dists[0]; tree_structured: one distribution per truth leaf
  std::vector<EventDistribution> dists;
  ThetaFamily theta_family = ThetaFamily::exponential;  // linear / nonlinear
  GroundTruthTree truth;
};

struct SimDataset {
  std::vector<CensoredObservation> observations;  // censored, or exact when uncensored
  std::vector<Covariate> covariates;
  std::vector<double> true_times;
  std::vector<EventDistribution> true_dists;  // per-row true survival function
};

// Draws covariates, the event time, and (when mech != nullptr) the censoring
// interval for each row; with mech == nullptr the observations are the exact
// event times (test sets and oracle fits).
SimDataset gen_dataset(const SimConfig& sim, const CensoringMechanism* mech, int n, Rng& rng);

// Marginal event-time sampler of the setup (used to calibrate censoring).
double sample_marginal_event_time(const SimConfig& sim, Rng& rng);

// Average over rows of (1/tau) * integral_0^tau (Shat_i - S_i)^2 dt with
// tau = max event time; the integral is taken piecewise over the step
// breakpoints of Shat_i with adaptive quadrature per piece.
double integrated_l2(const std::vector<const SurvivalCurve*>& predicted,
                     const std::vector<EventDistribution>& truth,
                     const std::vector<double>& event_times, double quad_tol = 1e-8);

// One step curve against one smooth survival function on [0, tau]
// (unnormalized integral).
double l2_distance(const SurvivalCurve& curve, const EventDistribution& truth, double tau,
                   double quad_tol = 1e-8);

enum class ExperimentKind { unbiasedness, recovery, prediction };
enum class Method { oracle, ic, impute_left, impute_mid, impute_right };

std::string method_name(Method m);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::recovery;
  SimConfig sim;
  CensoringPlan censoring;
  int n = 200;
  int trials = 200;
  std::uint64_t seed = 1;
  int jobs = 0;  // 0 = OpenMP default
  TreeConfig tree;
  std::vector<Method> methods{Method::oracle, Method::ic, Method::impute_left,
                              Method::impute_mid, Method::impute_right};
};

struct TrialRecord {
  int trial = 0;
  bool ok = true;
  std::string error;
  int selected = -1;            // unbiasedness: forced root selection
  bool split_at_alpha = false;  // unbiasedness: would the gated tree split
  std::vector<int> recovered;   // recovery: per method
  std::vector<double> l2;       // prediction: per method
};

struct ExperimentAggregates {
  long ok_trials = 0;
  long failed_trials = 0;
  std::vector<long> selection_counts;  // unbiasedness
  double chisq_p = 1.0;
  double split_fraction = 0.0;
  std::vector<double> recovery_pct;       // per method
  std::vector<double> mean_l2;            // per method
  std::vector<double> median_l2;          // per method
  std::vector<double> signed_rank_vs_ic;  // per method (1.0 for IC itself)
};

struct ExperimentResult {
  ExperimentConfig config;
  CalibratedMechanism mechanism;
  std::vector<TrialRecord> trials;
  ExperimentAggregates agg;
};

// Runs all trials (in parallel when OpenMP is available; each trial draws an
// independent stream from (seed, trial), so results are identical for any job
// count) and aggregates. Individual trial failures are recorded and excluded.
ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace ictree
