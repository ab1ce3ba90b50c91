#pragma once

// Test-only oracles, coded independently of the library implementation paths
// they check.

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "ictree/censored_data.hpp"
#include "ictree/turnbull.hpp"

namespace oracles {

// Product-limit estimator computed directly from exact-time data (unit
// weights): S(t) = prod_{event s <= t} (1 - d_s / n_s).
struct KmOracle {
  std::vector<double> times;   // distinct event times, sorted
  std::vector<double> s_after; // S just after each event time

  static KmOracle fit(const std::vector<double>& time, const std::vector<bool>& is_event);
  double survival(double t) const;
};

// Mean and covariance of T = sum_i g_i h_perm(i) over all n! permutations,
// accumulated in long double.
struct PermMoments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};
PermMoments enumerate_permutation_moments(const Eigen::MatrixXd& g,
                                          const std::vector<double>& h);

// Exhaustive maximum of the log-likelihood over the probability simplex on
// the given intervals, masses restricted to multiples of 1/steps. Containment
// of intervals in observations is decided by literal set inclusion.
double simplex_grid_best_loglik(const std::vector<ictree::CensoredObservation>& obs,
                                const std::vector<ictree::TurnbullInterval>& intervals,
                                int steps = 100);

// All (L-endpoint, R-endpoint) pairs that contain no other endpoint strictly
// inside; the brute-force route to the maximal intersections.
std::vector<ictree::TurnbullInterval> enumerate_maximal_intersections(
    const std::vector<ictree::CensoredObservation>& obs);

// sup_t |F_n(t) - F(t)| for a sorted sample against a continuous CDF.
double ks_statistic(const std::vector<double>& sorted_sample,
                    const std::function<double(double)>& cdf);

}  // namespace oracles
