#include "ictree/scores.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ictree {

namespace {

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

// Cumulative hazard accumulated over jump points: H after interval j is
// sum_{k<=j} m_k / tail_k. Returned array has size J+1 with H before any
// jump at index 0.
std::vector<double> cumulative_hazard(const SurvivalCurve& curve) {
  const auto& m = curve.masses();
  std::vector<double> H(m.size() + 1, 0.0);
  for (std::size_t j = 0; j < m.size(); ++j) {
    const double tail = curve.tail_mass(j);
    H[j + 1] = H[j] + (m[j] > 0.0 && tail > 0.0 ? m[j] / tail : 0.0);
  }
  return H;
}

// H(t): hazard of all jump points <= t.
double hazard_at(const SurvivalCurve& curve, const std::vector<double>& H, double t) {
  const auto& iv = curve.intervals();
  std::size_t lo = 0, hi = iv.size();
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (iv[mid].upper <= t)
      lo = mid + 1;
    else
      hi = mid;
  }
  return H[lo];
}

}  // namespace

ScoreResult logrank_scores(const std::vector<CensoredObservation>& obs,
                           const SurvivalCurve& curve, const ScoreOptions& opt) {
  bool has_exact = false;
  for (const auto& o : obs)
    if (o.exact) {
      has_exact = true;
      break;
    }

  std::vector<double> H;
  if (has_exact) H = cumulative_hazard(curve);

  ScoreResult out;
  out.scores.resize(obs.size());

  for (std::size_t i = 0; i < obs.size(); ++i) {
    const auto& o = obs[i];
    if (o.exact) {
      out.scores[i] = 1.0 - hazard_at(curve, H, o.left);
      continue;
    }
    if (has_exact && o.right_censored()) {
      out.scores[i] = -hazard_at(curve, H, o.left);
      continue;
    }
    const double sl = curve.survival(o.left);
    if (sl <= 0.0)
      throw std::invalid_argument("logrank_scores: observation after all curve mass");
    const double sr = o.right == kInf ? 0.0 : curve.survival(o.right);
    if (sl - sr < opt.flat_eps) {
      out.scores[i] = 1.0 + std::log(sl);
      ++out.flat_fallbacks;
      continue;
    }
    out.scores[i] = (xlogx(sl) - xlogx(sr)) / (sl - sr);
  }
  return out;
}

}  // namespace ictree
