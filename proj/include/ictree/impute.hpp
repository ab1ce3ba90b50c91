#pragma once

#include <vector>

#include "ictree/tree.hpp"

namespace ictree {

enum class ImputationMode { left, mid, right };

struct ImputeStats {
  int zero_clamped = 0;  // left-imputed times clamped away from zero
};

// Replace each finite censoring interval by an exact event at its left,
// middle, or right endpoint. Right-censored observations stay right-censored
// at their left endpoint; exact observations pass through unchanged. A left
// imputation that would produce time 0 is clamped to 1e-9 (zero event times
// break rank scores) and counted in stats.
std::vector<CensoredObservation> impute(const std::vector<CensoredObservation>& obs,
                                        ImputationMode mode, ImputeStats* stats = nullptr);

// Imputation followed by the same tree engine; with exact-time data the node
// curves are product-limit estimates and the scores use the cumulative-hazard
// form automatically.
Tree fit_imputed_tree(const std::vector<CensoredObservation>& obs,
                      const std::vector<Covariate>& covariates, ImputationMode mode,
                      const TreeConfig& config = {});

}  // namespace ictree
