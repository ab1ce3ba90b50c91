#include "ictree/impute.hpp"

namespace ictree {

std::vector<CensoredObservation> impute(const std::vector<CensoredObservation>& obs,
                                        ImputationMode mode, ImputeStats* stats) {
  std::vector<CensoredObservation> out;
  out.reserve(obs.size());
  for (const auto& o : obs) {
    if (o.exact || o.right_censored()) {
      out.push_back(o);
      continue;
    }
    double t;
    switch (mode) {
      case ImputationMode::left: t = o.left; break;
      case ImputationMode::mid: t = 0.5 * (o.left + o.right); break;
      case ImputationMode::right: t = o.right; break;
      default: t = o.right; break;
    }
    if (t <= 0.0) {
      t = o.left + 1e-9;
      if (stats) ++stats->zero_clamped;
    }
    out.push_back(exact_obs(t, o.weight));
  }
  return out;
}

Tree fit_imputed_tree(const std::vector<CensoredObservation>& obs,
                      const std::vector<Covariate>& covariates, ImputationMode mode,
                      const TreeConfig& config) {
  return grow_tree(impute(obs, mode), covariates, config);
}

}  // namespace ictree
