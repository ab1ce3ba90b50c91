#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "ictree/scores.hpp"
#include "ictree/stats.hpp"
#include "ictree/turnbull.hpp"

namespace ictree {

enum class CovariateKind { numeric, ordinal, nominal };

// One covariate column. Ordinal values are carried on their (strictly
// increasing) level-score scale, so splits and transforms read them like
// numeric values; nominal values are 0-based indices into `levels`.
struct Covariate {
  std::string name;
  CovariateKind kind = CovariateKind::numeric;
  std::vector<double> values;
  std::vector<std::string> levels;       // nominal
  std::vector<double> level_scores;      // ordinal: the admissible score grid
};

enum class Multiplicity { bonferroni, none };

struct TreeConfig {
  double alpha = 0.05;
  int minsplit = 20;
  int minbucket = 7;
  int maxdepth = 0;  // 0 = unlimited
  Multiplicity multiplicity = Multiplicity::bonferroni;
  NpmleOptions em;
  int max_nominal_levels = 12;  // exhaustive subset search cap
};

struct SplitRule {
  int covariate = -1;
  double threshold = 0.0;        // numeric / ordinal: x <= threshold goes left
  std::vector<int> left_levels;  // nominal: sorted level indices routed left
};

struct TreeNode {
  int id = 0;
  int parent = -1;
  int depth = 0;
  bool terminal = true;
  SplitRule split;               // internal nodes
  int left_child = -1;
  int right_child = -1;
  SurvivalCurve curve;           // terminal nodes
  int member_count = 0;
  double min_adjusted_p = 1.0;   // best adjusted p-value seen at this node
  int selected_covariate = -1;
  bool em_failed = false;        // NPMLE did not converge; node forced terminal
};

struct CovariateInfo {
  std::string name;
  CovariateKind kind = CovariateKind::numeric;
  std::vector<std::string> levels;
  std::vector<double> level_scores;
};

struct Tree {
  TreeConfig config;
  std::vector<CovariateInfo> covariates;
  std::vector<TreeNode> nodes;  // preorder; root at index 0

  const TreeNode& root() const { return nodes.front(); }
  int terminal_count() const;
  // Selection p-values along the path root -> node (inclusive).
  std::vector<double> p_trace(int node_id) const;
};

// g_j: numeric/ordinal covariates map to their single value column, nominal
// covariates to one indicator column per declared level. `rows` selects the
// node's members.
Eigen::MatrixXd covariate_transform(const Covariate& cov, const std::vector<int>& rows);

struct VariableSelection {
  int best = -1;                    // argmin adjusted p among splittable covariates
  double best_p_adjusted = 1.0;
  bool significant = false;         // best_p_adjusted <= alpha
  std::vector<double> adjusted_p;   // per covariate; 1 when not splittable
  std::vector<bool> splittable;
};

// Node-local variable selection: fits the NPMLE of `obs`, computes log-rank
// scores, tests each covariate and applies the multiplicity adjustment.
VariableSelection select_variable(const std::vector<CensoredObservation>& obs,
                                  const std::vector<Covariate>& covariates,
                                  const TreeConfig& config);

// Best threshold / level subset for one covariate, maximizing the
// standardized two-sample statistic of the node's scores; nullopt when no
// candidate satisfies minbucket on both sides.
std::optional<SplitRule> best_split(const std::vector<CensoredObservation>& obs,
                                    const std::vector<Covariate>& covariates, int covariate,
                                    const TreeConfig& config);

Tree grow_tree(const std::vector<CensoredObservation>& obs,
               const std::vector<Covariate>& covariates, const TreeConfig& config = {});

// Route one covariate row to its terminal node. Values are aligned with
// tree.covariates: numeric/ordinal pass the (score) value, nominal pass the
// level index (use -1 for a level unknown to the tree). Throws
// std::invalid_argument("unroutable level ...") when a split needs a level
// the tree has not seen.
int route_row(const Tree& tree, const std::vector<double>& row);
const SurvivalCurve& predict_curve(const Tree& tree, const std::vector<double>& row);

}  // namespace ictree
