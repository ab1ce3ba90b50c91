#pragma once

#include <vector>

#include "ictree/turnbull.hpp"

namespace ictree {

struct ScoreResult {
  std::vector<double> scores;   // U_i, aligned with the input order
  int flat_fallbacks = 0;       // intervals scored by the derivative form
};

struct ScoreOptions {
  double flat_eps = 1e-12;  // S(L) - S(R) below this uses the derivative form
};

// Log-rank score per observation against the fitted NPMLE:
//
//   U_i = (S(L) log S(L) - S(R) log S(R)) / (S(L) - S(R)),  0*log(0) := 0,
//
// so a right-censored observation gets U = log S(L). Exact observations use
// the derivative form, with the survival value taken as exp(-H) for the
// cumulative hazard H implied by the curve's point masses: U = 1 - H(t) for
// events. When the data set contains exact observations, right-censored
// observations are scored on the same hazard scale, U = -H(L), which makes
// the weighted scores sum to zero exactly (the counting-process identity).
//
// Throws std::invalid_argument when an observation lies after all curve mass.
ScoreResult logrank_scores(const std::vector<CensoredObservation>& obs,
                           const SurvivalCurve& curve, const ScoreOptions& opt = {});

}  // namespace ictree
