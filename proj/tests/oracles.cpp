#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>

namespace oracles {

using ictree::CensoredObservation;
using ictree::TurnbullInterval;

KmOracle KmOracle::fit(const std::vector<double>& time, const std::vector<bool>& is_event) {
  KmOracle km;
  std::set<double> distinct;
  for (std::size_t i = 0; i < time.size(); ++i)
    if (is_event[i]) distinct.insert(time[i]);
  double s = 1.0;
  for (double t : distinct) {
    int d = 0, n = 0;
    for (std::size_t i = 0; i < time.size(); ++i) {
      if (time[i] >= t) ++n;
      if (is_event[i] && time[i] == t) ++d;
    }
    s *= 1.0 - static_cast<double>(d) / static_cast<double>(n);
    km.times.push_back(t);
    km.s_after.push_back(s);
  }
  return km;
}

double KmOracle::survival(double t) const {
  double s = 1.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] <= t)
      s = s_after[i];
    else
      break;
  }
  return s;
}

PermMoments enumerate_permutation_moments(const Eigen::MatrixXd& g,
                                          const std::vector<double>& h) {
  const auto n = static_cast<std::size_t>(g.rows());
  const auto p = g.cols();
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);

  using VecLd = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
  using MatLd = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  VecLd sum = VecLd::Zero(p);
  MatLd sum2 = MatLd::Zero(p, p);
  long double count = 0.0L;

  std::sort(idx.begin(), idx.end());
  do {
    VecLd t = VecLd::Zero(p);
    for (std::size_t i = 0; i < n; ++i)
      for (Eigen::Index c = 0; c < p; ++c)
        t(c) += static_cast<long double>(g(static_cast<Eigen::Index>(i), c)) *
                static_cast<long double>(h[static_cast<std::size_t>(idx[i])]);
    sum += t;
    sum2 += t * t.transpose();
    count += 1.0L;
  } while (std::next_permutation(idx.begin(), idx.end()));

  PermMoments out;
  const VecLd mean = sum / count;
  const MatLd cov = sum2 / count - mean * mean.transpose();
  out.mean = mean.cast<double>();
  out.cov = cov.cast<double>();
  return out;
}

namespace {

bool contains(const CensoredObservation& o, const TurnbullInterval& tb) {
  if (o.exact) return tb.degenerate() && tb.lower == o.left;
  if (tb.degenerate()) return o.left < tb.lower && tb.lower <= o.right;
  return tb.lower >= o.left && tb.upper <= o.right;
}

}  // namespace

double simplex_grid_best_loglik(const std::vector<CensoredObservation>& obs,
                                const std::vector<TurnbullInterval>& intervals, int steps) {
  const std::size_t J = intervals.size();
  std::vector<std::vector<char>> member(obs.size(), std::vector<char>(J, 0));
  for (std::size_t i = 0; i < obs.size(); ++i)
    for (std::size_t j = 0; j < J; ++j) member[i][j] = contains(obs[i], intervals[j]) ? 1 : 0;

  auto loglik = [&](const std::vector<double>& mass) {
    double ll = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
      double prob = 0.0;
      for (std::size_t j = 0; j < J; ++j)
        if (member[i][j]) prob += mass[j];
      if (prob <= 0.0) return -ictree::kInf;
      ll += obs[i].weight * std::log(prob);
    }
    return ll;
  };

  double best = -ictree::kInf;
  std::vector<double> mass(J, 0.0);
  const double inv = 1.0 / static_cast<double>(steps);
  if (J == 1) return loglik({1.0});
  if (J == 2) {
    for (int a = 0; a <= steps; ++a) {
      mass[0] = a * inv;
      mass[1] = (steps - a) * inv;
      best = std::max(best, loglik(mass));
    }
    return best;
  }
  if (J == 3) {
    for (int a = 0; a <= steps; ++a)
      for (int b = 0; a + b <= steps; ++b) {
        mass[0] = a * inv;
        mass[1] = b * inv;
        mass[2] = (steps - a - b) * inv;
        best = std::max(best, loglik(mass));
      }
    return best;
  }
  throw std::invalid_argument("simplex_grid_best_loglik supports at most 3 intervals");
}

std::vector<TurnbullInterval> enumerate_maximal_intersections(
    const std::vector<CensoredObservation>& obs) {
  // Endpoint keys (t, bump): bump 1 is "just after t" for open left endpoints.
  using Key = std::pair<double, int>;
  std::vector<Key> lefts, rights;
  for (const auto& o : obs) {
    lefts.push_back(o.exact ? Key{o.left, 0} : Key{o.left, 1});
    rights.push_back({o.right, 0});
  }

  // (l, r] is maximal iff no left endpoint lies in (l, r] and no right
  // endpoint lies in [l, r): any such endpoint would cut the intersection.
  std::set<std::pair<Key, Key>> kept;
  for (const auto& l : lefts)
    for (const auto& r : rights) {
      if (r < l) continue;  // empty candidate
      bool cut = false;
      for (const auto& e : lefts)
        if (l < e && !(r < e)) {
          cut = true;
          break;
        }
      if (!cut)
        for (const auto& e : rights)
          if (!(e < l) && e < r) {
            cut = true;
            break;
          }
      if (!cut) kept.insert({l, r});
    }

  std::vector<TurnbullInterval> out;
  for (const auto& [l, r] : kept) out.push_back({l.first, r.first});
  return out;
}

double ks_statistic(const std::vector<double>& sorted_sample,
                    const std::function<double(double)>& cdf) {
  const double n = static_cast<double>(sorted_sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted_sample.size(); ++i) {
    const double f = cdf(sorted_sample[i]);
    d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
    d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - f));
  }
  return d;
}

}  // namespace oracles
