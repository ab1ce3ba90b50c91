#pragma once

#include <limits>
#include <vector>

namespace ictree {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// One subject's censoring interval (left, right] with a case weight.
// right == +inf encodes right-censoring at `left`; an exactly observed event
// time has exact == true and left == right.
struct CensoredObservation {
  double left = 0.0;
  double right = kInf;
  bool exact = false;
  double weight = 1.0;

  bool right_censored() const { return !exact && right == kInf; }
};

inline CensoredObservation interval_obs(double left, double right, double w = 1.0) {
  return {left, right, false, w};
}
inline CensoredObservation exact_obs(double t, double w = 1.0) { return {t, t, true, w}; }
inline CensoredObservation right_censored_obs(double left, double w = 1.0) {
  return {left, kInf, false, w};
}

// Throws std::invalid_argument on a violated invariant (left > right,
// negative weight, exact with left != right, negative time).
void validate_observations(const std::vector<CensoredObservation>& obs);

// True when every observation is an exact event or right-censored at a point,
// i.e. classical survival data where the NPMLE is the product-limit estimator.
bool is_exact_time_data(const std::vector<CensoredObservation>& obs);

}  // namespace ictree
