#include "ictree/tree.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ictree {

namespace {

void validate_inputs(const std::vector<CensoredObservation>& obs,
                     const std::vector<Covariate>& covariates, const TreeConfig& config) {
  if (obs.empty()) throw std::invalid_argument("grow_tree: empty dataset");
  if (!(config.alpha > 0.0 && config.alpha <= 1.0))
    throw std::invalid_argument("tree config: alpha must be in (0, 1]");
  if (config.minbucket < 1) throw std::invalid_argument("tree config: minbucket >= 1 required");
  if (2 * config.minbucket > config.minsplit)
    throw std::invalid_argument("tree config: 2 * minbucket <= minsplit required");
  for (const auto& c : covariates) {
    if (c.values.size() != obs.size())
      throw std::invalid_argument("covariate '" + c.name + "': length mismatch");
    if (c.kind == CovariateKind::nominal) {
      if (c.levels.size() < 2)
        throw std::invalid_argument("covariate '" + c.name + "': nominal needs >= 2 levels");
      if (static_cast<int>(c.levels.size()) > config.max_nominal_levels)
        throw std::invalid_argument("covariate '" + c.name +
                                    "': too many nominal levels for exhaustive subset "
                                    "search; recode the variable");
      for (double v : c.values) {
        const int idx = static_cast<int>(v);
        if (idx < 0 || idx >= static_cast<int>(c.levels.size()))
          throw std::invalid_argument("covariate '" + c.name + "': level index out of range");
      }
    }
    if (c.kind == CovariateKind::ordinal) {
      if (c.level_scores.size() < 2)
        throw std::invalid_argument("covariate '" + c.name + "': ordinal needs >= 2 scores");
      for (std::size_t i = 1; i < c.level_scores.size(); ++i)
        if (!(c.level_scores[i - 1] < c.level_scores[i]))
          throw std::invalid_argument("covariate '" + c.name +
                                      "': ordinal scores must be strictly increasing");
    }
  }
}

struct NodeScores {
  std::vector<double> h;  // log-rank scores of the node members
  std::vector<double> w;  // case weights of the node members
};

// Statistics shared by every candidate binary split of one node.
struct SplitContext {
  double W = 0.0;
  double eh = 0.0;
  double vh = 0.0;
};

SplitContext make_context(const NodeScores& ns) {
  SplitContext cx;
  for (double wi : ns.w) cx.W += wi;
  for (std::size_t i = 0; i < ns.h.size(); ++i) cx.eh += ns.w[i] * ns.h[i];
  cx.eh /= cx.W;
  for (std::size_t i = 0; i < ns.h.size(); ++i)
    cx.vh += ns.w[i] * (ns.h[i] - cx.eh) * (ns.h[i] - cx.eh);
  cx.vh /= cx.W;
  return cx;
}

// |T - mu| / sqrt(Var) for the membership indicator with left weight wl and
// left statistic tl; closed form of the permutation variance for binary g.
double indicator_statistic(const SplitContext& cx, double wl, double tl) {
  const double var = cx.vh * wl * (cx.W - wl) / (cx.W - 1.0);
  if (!(var > 0.0)) return -1.0;
  return std::fabs(tl - cx.eh * wl) / std::sqrt(var);
}

bool splittable_in_node(const Covariate& cov, const std::vector<int>& rows) {
  if (rows.empty()) return false;
  const double first = cov.values[rows.front()];
  for (int r : rows)
    if (cov.values[r] != first) return true;
  return false;
}

std::optional<SplitRule> best_split_impl(const Covariate& cov, int cov_index,
                                         const std::vector<int>& rows, const NodeScores& ns,
                                         const TreeConfig& config) {
  const SplitContext cx = make_context(ns);
  if (!(cx.vh > 0.0)) return std::nullopt;
  const int n = static_cast<int>(rows.size());

  if (cov.kind != CovariateKind::nominal) {
    // Sweep the thresholds between consecutive distinct observed values.
    std::vector<int> ord(ns.h.size());
    for (std::size_t i = 0; i < ord.size(); ++i) ord[i] = static_cast<int>(i);
    std::sort(ord.begin(), ord.end(),
              [&](int a, int b) { return cov.values[rows[a]] < cov.values[rows[b]]; });

    double best_stat = -1.0, best_threshold = 0.0;
    double wl = 0.0, tl = 0.0;
    int count_left = 0;
    for (int i = 0; i < n;) {
      const double v = cov.values[rows[ord[i]]];
      int j = i;
      while (j < n && cov.values[rows[ord[j]]] == v) {
        wl += ns.w[ord[j]];
        tl += ns.w[ord[j]] * ns.h[ord[j]];
        ++count_left;
        ++j;
      }
      if (j == n) break;  // no threshold after the largest value
      if (count_left >= config.minbucket && n - count_left >= config.minbucket) {
        const double stat = indicator_statistic(cx, wl, tl);
        if (stat > best_stat) {
          best_stat = stat;
          best_threshold = 0.5 * (v + cov.values[rows[ord[j]]]);
        }
      }
      i = j;
    }
    if (best_stat < 0.0) return std::nullopt;
    SplitRule rule;
    rule.covariate = cov_index;
    rule.threshold = best_threshold;
    return rule;
  }

  // Nominal: exhaustive 2^(k-1) - 1 subsets of the levels present in the node.
  std::vector<int> present;
  {
    std::set<int> seen;
    for (int r : rows) seen.insert(static_cast<int>(cov.values[r]));
    present.assign(seen.begin(), seen.end());
  }
  const int k = static_cast<int>(present.size());
  if (k < 2) return std::nullopt;

  std::vector<double> lv_w(k, 0.0), lv_t(k, 0.0);
  std::vector<int> lv_n(k, 0);
  for (std::size_t i = 0; i < ns.h.size(); ++i) {
    const int idx = static_cast<int>(cov.values[rows[i]]);
    const int pos = static_cast<int>(std::lower_bound(present.begin(), present.end(), idx) -
                                     present.begin());
    lv_w[pos] += ns.w[i];
    lv_t[pos] += ns.w[i] * ns.h[i];
    ++lv_n[pos];
  }

  double best_stat = -1.0;
  unsigned best_mask = 0;
  // Masks with bit 0 set cover each {S, complement} pair exactly once.
  const unsigned full = (1u << k) - 1u;
  for (unsigned mask = 1; mask < full; mask += 2) {
    double wl = 0.0, tl = 0.0;
    int nl = 0;
    for (int b = 0; b < k; ++b)
      if (mask & (1u << b)) {
        wl += lv_w[b];
        tl += lv_t[b];
        nl += lv_n[b];
      }
    if (nl < config.minbucket || n - nl < config.minbucket) continue;
    const double stat = indicator_statistic(cx, wl, tl);
    if (stat > best_stat) {
      best_stat = stat;
      best_mask = mask;
    }
  }
  if (best_stat < 0.0) return std::nullopt;
  SplitRule rule;
  rule.covariate = cov_index;
  for (int b = 0; b < k; ++b)
    if (best_mask & (1u << b)) rule.left_levels.push_back(present[b]);
  return rule;
}

VariableSelection select_impl(const std::vector<Covariate>& covariates,
                              const std::vector<int>& rows, const NodeScores& ns,
                              const TreeConfig& config) {
  const int m_total = static_cast<int>(covariates.size());
  VariableSelection sel;
  sel.adjusted_p.assign(m_total, 1.0);
  sel.splittable.assign(m_total, false);

  std::vector<double> raw_p(m_total, 1.0);
  for (int c = 0; c < m_total; ++c) sel.splittable[c] = splittable_in_node(covariates[c], rows);
  int m = 0;
  for (int c = 0; c < m_total; ++c)
    if (sel.splittable[c]) ++m;
  if (m == 0) return sel;

  // Per-covariate tests read shared node data and write disjoint slots, so
  // they can run concurrently.
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int c = 0; c < m_total; ++c) {
    if (!sel.splittable[c]) continue;
    const Eigen::MatrixXd g = covariate_transform(covariates[c], rows);
    const auto mom = linear_statistic_moments(g, ns.h, ns.w);
    raw_p[c] = mom.degenerate ? 1.0 : mom.p_value;
  }

  for (int c = 0; c < m_total; ++c) {
    if (!sel.splittable[c]) continue;
    double p = raw_p[c];
    if (config.multiplicity == Multiplicity::bonferroni)
      p = std::min(1.0, static_cast<double>(m) * p);
    sel.adjusted_p[c] = p;
    if (sel.best == -1 || p < sel.best_p_adjusted) {
      sel.best = c;
      sel.best_p_adjusted = p;
    }
  }
  sel.significant = sel.best != -1 && sel.best_p_adjusted <= config.alpha;
  return sel;
}

std::vector<CensoredObservation> gather(const std::vector<CensoredObservation>& obs,
                                        const std::vector<int>& rows) {
  std::vector<CensoredObservation> out;
  out.reserve(rows.size());
  for (int r : rows) out.push_back(obs[r]);
  return out;
}

bool route_left(const SplitRule& rule, CovariateKind kind, double value,
                const std::vector<std::string>& levels) {
  if (kind == CovariateKind::nominal) {
    const int idx = static_cast<int>(value);
    if (value < 0.0 || idx >= static_cast<int>(levels.size())) {
      std::ostringstream msg;
      msg << "unroutable level for nominal covariate (index " << value << ")";
      throw std::invalid_argument(msg.str());
    }
    return std::binary_search(rule.left_levels.begin(), rule.left_levels.end(), idx);
  }
  return value <= rule.threshold;
}

struct GrowState {
  const std::vector<CensoredObservation>& obs;
  const std::vector<Covariate>& covariates;
  const TreeConfig& config;
  Tree& tree;
};

int grow_node(GrowState& st, const std::vector<int>& rows, int depth, int parent) {
  const int id = static_cast<int>(st.tree.nodes.size());
  st.tree.nodes.emplace_back();
  {
    auto& node = st.tree.nodes[id];
    node.id = id;
    node.parent = parent;
    node.depth = depth;
    node.member_count = static_cast<int>(rows.size());
  }

  auto node_obs = gather(st.obs, rows);
  SurvivalCurve curve;
  bool em_failed = false;
  try {
    curve = fit_npmle(node_obs, st.config.em);
  } catch (const EmNotConverged& e) {
    curve = e.last;
    em_failed = true;
  }

  auto make_terminal = [&](double min_p) {
    auto& node = st.tree.nodes[id];
    node.terminal = true;
    node.curve = std::move(curve);
    node.em_failed = em_failed;
    node.min_adjusted_p = min_p;
  };

  const bool depth_capped = st.config.maxdepth > 0 && depth >= st.config.maxdepth;
  if (em_failed || depth_capped || static_cast<int>(rows.size()) < st.config.minsplit) {
    make_terminal(1.0);
    return id;
  }

  NodeScores ns;
  ns.h = logrank_scores(node_obs, curve).scores;
  ns.w.reserve(rows.size());
  for (int r : rows) ns.w.push_back(st.obs[r].weight);

  const VariableSelection sel = select_impl(st.covariates, rows, ns, st.config);
  if (!sel.significant) {
    make_terminal(sel.best == -1 ? 1.0 : sel.best_p_adjusted);
    return id;
  }

  const auto rule = best_split_impl(st.covariates[sel.best], sel.best, rows, ns, st.config);
  if (!rule) {
    make_terminal(sel.best_p_adjusted);
    return id;
  }

  std::vector<int> left_rows, right_rows;
  const auto& cov = st.covariates[sel.best];
  for (int r : rows) {
    if (route_left(*rule, cov.kind, cov.values[r], cov.levels))
      left_rows.push_back(r);
    else
      right_rows.push_back(r);
  }

  {
    auto& node = st.tree.nodes[id];
    node.terminal = false;
    node.split = *rule;
    node.selected_covariate = sel.best;
    node.min_adjusted_p = sel.best_p_adjusted;
    node.em_failed = false;
  }
  const int left = grow_node(st, left_rows, depth + 1, id);
  const int right = grow_node(st, right_rows, depth + 1, id);
  st.tree.nodes[id].left_child = left;
  st.tree.nodes[id].right_child = right;
  return id;
}

}  // namespace

Eigen::MatrixXd covariate_transform(const Covariate& cov, const std::vector<int>& rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  if (cov.kind == CovariateKind::nominal) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(cov.levels.size()));
    for (Eigen::Index i = 0; i < n; ++i)
      g(i, static_cast<Eigen::Index>(cov.values[rows[i]])) = 1.0;
    return g;
  }
  Eigen::MatrixXd g(n, 1);
  for (Eigen::Index i = 0; i < n; ++i) g(i, 0) = cov.values[rows[i]];
  return g;
}

VariableSelection select_variable(const std::vector<CensoredObservation>& obs,
                                  const std::vector<Covariate>& covariates,
                                  const TreeConfig& config) {
  validate_inputs(obs, covariates, config);
  std::vector<int> rows(obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) rows[i] = static_cast<int>(i);
  SurvivalCurve curve = fit_npmle(obs, config.em);
  NodeScores ns;
  ns.h = logrank_scores(obs, curve).scores;
  for (const auto& o : obs) ns.w.push_back(o.weight);
  return select_impl(covariates, rows, ns, config);
}

std::optional<SplitRule> best_split(const std::vector<CensoredObservation>& obs,
                                    const std::vector<Covariate>& covariates, int covariate,
                                    const TreeConfig& config) {
  validate_inputs(obs, covariates, config);
  std::vector<int> rows(obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) rows[i] = static_cast<int>(i);
  SurvivalCurve curve = fit_npmle(obs, config.em);
  NodeScores ns;
  ns.h = logrank_scores(obs, curve).scores;
  for (const auto& o : obs) ns.w.push_back(o.weight);
  return best_split_impl(covariates[covariate], covariate, rows, ns, config);
}

Tree grow_tree(const std::vector<CensoredObservation>& obs,
               const std::vector<Covariate>& covariates, const TreeConfig& config) {
  validate_inputs(obs, covariates, config);
  Tree tree;
  tree.config = config;
  tree.covariates.reserve(covariates.size());
  for (const auto& c : covariates)
    tree.covariates.push_back({c.name, c.kind, c.levels, c.level_scores});

  std::vector<int> rows(obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) rows[i] = static_cast<int>(i);
  GrowState st{obs, covariates, config, tree};
  grow_node(st, rows, 0, -1);
  return tree;
}

int Tree::terminal_count() const {
  int n = 0;
  for (const auto& node : nodes) n += node.terminal ? 1 : 0;
  return n;
}

std::vector<double> Tree::p_trace(int node_id) const {
  std::vector<double> trace;
  for (int id = node_id; id != -1; id = nodes[id].parent)
    trace.push_back(nodes[id].min_adjusted_p);
  std::reverse(trace.begin(), trace.end());
  return trace;
}

int route_row(const Tree& tree, const std::vector<double>& row) {
  if (row.size() != tree.covariates.size())
    throw std::invalid_argument("route_row: row length does not match tree covariates");
  int id = 0;
  while (!tree.nodes[id].terminal) {
    const auto& node = tree.nodes[id];
    const auto& info = tree.covariates[node.split.covariate];
    const bool left = route_left(node.split, info.kind, row[node.split.covariate], info.levels);
    id = left ? node.left_child : node.right_child;
  }
  return id;
}

const SurvivalCurve& predict_curve(const Tree& tree, const std::vector<double>& row) {
  return tree.nodes[route_row(tree, row)].curve;
}

}  // namespace ictree
