#include "ictree/treedoc.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

namespace ictree {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr const char* kFormat = "ictree-tree/1";

ordered_json endpoint_to_json(double x) {
  if (x == kInf) return ordered_json("inf");
  return ordered_json(x);
}

double endpoint_from_json(const ordered_json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return kInf;
    throw std::invalid_argument("tree document: bad endpoint token");
  }
  return j.get<double>();
}

const char* kind_tag(CovariateKind k) {
  switch (k) {
    case CovariateKind::numeric: return "num";
    case CovariateKind::ordinal: return "ord";
    case CovariateKind::nominal: return "nom";
  }
  return "num";
}

CovariateKind kind_from_tag(const std::string& tag) {
  if (tag == "num") return CovariateKind::numeric;
  if (tag == "ord") return CovariateKind::ordinal;
  if (tag == "nom") return CovariateKind::nominal;
  throw std::invalid_argument("tree document: unknown covariate kind '" + tag + "'");
}

ordered_json node_to_json(const Tree& tree, int id) {
  const TreeNode& node = tree.nodes[static_cast<std::size_t>(id)];
  ordered_json j;
  j["id"] = node.id;
  j["n"] = node.member_count;
  if (!node.terminal) {
    j["kind"] = "internal";
    j["p_adjusted"] = node.min_adjusted_p;
    ordered_json split;
    const auto& info = tree.covariates[static_cast<std::size_t>(node.split.covariate)];
    split["variable"] = info.name;
    if (info.kind == CovariateKind::nominal) {
      ordered_json levels = ordered_json::array();
      for (int idx : node.split.left_levels)
        levels.push_back(info.levels[static_cast<std::size_t>(idx)]);
      split["left_levels"] = levels;
    } else {
      split["threshold"] = node.split.threshold;
    }
    j["split"] = split;
    j["left"] = node_to_json(tree, node.left_child);
    j["right"] = node_to_json(tree, node.right_child);
    return j;
  }
  j["kind"] = "terminal";
  j["p_trace"] = tree.p_trace(id);
  j["em_converged"] = !node.em_failed;
  ordered_json curve = ordered_json::array();
  const auto& iv = node.curve.intervals();
  const auto& m = node.curve.masses();
  for (std::size_t k = 0; k < iv.size(); ++k) {
    ordered_json triple = ordered_json::array();
    triple.push_back(endpoint_to_json(iv[k].lower));
    triple.push_back(endpoint_to_json(iv[k].upper));
    triple.push_back(m[k]);
    curve.push_back(triple);
  }
  j["curve"] = curve;
  return j;
}

int find_covariate(const Tree& tree, const std::string& name) {
  for (std::size_t c = 0; c < tree.covariates.size(); ++c)
    if (tree.covariates[c].name == name) return static_cast<int>(c);
  throw std::invalid_argument("tree document: unknown split variable '" + name + "'");
}

int node_from_json(Tree& tree, const ordered_json& j, int parent, int depth) {
  const int id = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  {
    auto& node = tree.nodes[static_cast<std::size_t>(id)];
    node.id = j.at("id").get<int>();
    node.parent = parent;
    node.depth = depth;
    node.member_count = j.at("n").get<int>();
  }
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "internal") {
    const auto& split = j.at("split");
    SplitRule rule;
    rule.covariate = find_covariate(tree, split.at("variable").get<std::string>());
    const auto& info = tree.covariates[static_cast<std::size_t>(rule.covariate)];
    if (info.kind == CovariateKind::nominal) {
      for (const auto& label : split.at("left_levels")) {
        const auto it =
            std::find(info.levels.begin(), info.levels.end(), label.get<std::string>());
        if (it == info.levels.end())
          throw std::invalid_argument("tree document: split level not in schema");
        rule.left_levels.push_back(static_cast<int>(it - info.levels.begin()));
      }
      std::sort(rule.left_levels.begin(), rule.left_levels.end());
    } else {
      rule.threshold = split.at("threshold").get<double>();
    }
    {
      auto& node = tree.nodes[static_cast<std::size_t>(id)];
      node.terminal = false;
      node.split = rule;
      node.selected_covariate = rule.covariate;
      node.min_adjusted_p = j.at("p_adjusted").get<double>();
    }
    const int left = node_from_json(tree, j.at("left"), id, depth + 1);
    const int right = node_from_json(tree, j.at("right"), id, depth + 1);
    tree.nodes[static_cast<std::size_t>(id)].left_child = left;
    tree.nodes[static_cast<std::size_t>(id)].right_child = right;
    return id;
  }
  if (kind != "terminal") throw std::invalid_argument("tree document: bad node kind");

  std::vector<TurnbullInterval> intervals;
  std::vector<double> masses;
  for (const auto& triple : j.at("curve")) {
    intervals.push_back({endpoint_from_json(triple.at(0)), endpoint_from_json(triple.at(1))});
    masses.push_back(triple.at(2).get<double>());
  }
  const bool converged = j.at("em_converged").get<bool>();
  auto& node = tree.nodes[static_cast<std::size_t>(id)];
  node.terminal = true;
  node.em_failed = !converged;
  node.curve = SurvivalCurve(std::move(intervals), std::move(masses), 0.0, 0, converged);
  const auto trace = j.at("p_trace").get<std::vector<double>>();
  node.min_adjusted_p = trace.empty() ? 1.0 : trace.back();
  return id;
}

}  // namespace

std::string tree_to_json(const Tree& tree) {
  ordered_json j;
  j["format"] = kFormat;
  ordered_json cfg;
  cfg["alpha"] = tree.config.alpha;
  cfg["minsplit"] = tree.config.minsplit;
  cfg["minbucket"] = tree.config.minbucket;
  cfg["maxdepth"] = tree.config.maxdepth;
  cfg["multiplicity"] =
      tree.config.multiplicity == Multiplicity::bonferroni ? "bonferroni" : "none";
  cfg["em_tol"] = tree.config.em.tol;
  cfg["em_max_iter"] = tree.config.em.max_iter;
  j["config"] = cfg;

  ordered_json covs = ordered_json::array();
  for (const auto& c : tree.covariates) {
    ordered_json jc;
    jc["name"] = c.name;
    jc["kind"] = kind_tag(c.kind);
    if (c.kind == CovariateKind::nominal) jc["levels"] = c.levels;
    if (c.kind == CovariateKind::ordinal) jc["scores"] = c.level_scores;
    covs.push_back(jc);
  }
  j["covariates"] = covs;
  j["root"] = node_to_json(tree, 0);
  return j.dump(2) + "\n";
}

Tree tree_from_json(const std::string& text) {
  const auto j = ordered_json::parse(text);
  if (j.at("format").get<std::string>() != kFormat)
    throw std::invalid_argument("tree document: unsupported format tag");
  Tree tree;
  const auto& cfg = j.at("config");
  tree.config.alpha = cfg.at("alpha").get<double>();
  tree.config.minsplit = cfg.at("minsplit").get<int>();
  tree.config.minbucket = cfg.at("minbucket").get<int>();
  tree.config.maxdepth = cfg.at("maxdepth").get<int>();
  tree.config.multiplicity = cfg.at("multiplicity").get<std::string>() == "none"
                                 ? Multiplicity::none
                                 : Multiplicity::bonferroni;
  tree.config.em.tol = cfg.at("em_tol").get<double>();
  tree.config.em.max_iter = cfg.at("em_max_iter").get<long>();

  for (const auto& jc : j.at("covariates")) {
    CovariateInfo info;
    info.name = jc.at("name").get<std::string>();
    info.kind = kind_from_tag(jc.at("kind").get<std::string>());
    if (info.kind == CovariateKind::nominal)
      info.levels = jc.at("levels").get<std::vector<std::string>>();
    if (info.kind == CovariateKind::ordinal)
      info.level_scores = jc.at("scores").get<std::vector<double>>();
    tree.covariates.push_back(std::move(info));
  }
  node_from_json(tree, j.at("root"), -1, 0);
  return tree;
}

void write_tree_file(const std::string& path, const Tree& tree) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << tree_to_json(tree);
  if (!out) throw std::runtime_error("failed writing tree file: " + path);
}

Tree read_tree_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open tree file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return tree_from_json(ss.str());
}

std::string render_tree_text(const Tree& tree) {
  std::ostringstream out;
  auto fmt = [](double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return std::string(buf);
  };
  auto quart = [&](const SurvivalCurve& curve, double level) {
    const auto q = curve.quantile(level);
    return q ? fmt(*q) : std::string("-");
  };

  // Depth-first in child order, two spaces per level.
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    const auto& node = tree.nodes[static_cast<std::size_t>(id)];
    out << std::string(static_cast<std::size_t>(node.depth) * 2, ' ');
    if (!node.terminal) {
      const auto& info = tree.covariates[static_cast<std::size_t>(node.split.covariate)];
      out << "[" << node.id << "] " << info.name;
      if (info.kind == CovariateKind::nominal) {
        out << " in {";
        for (std::size_t i = 0; i < node.split.left_levels.size(); ++i)
          out << (i ? "," : "")
              << info.levels[static_cast<std::size_t>(node.split.left_levels[i])];
        out << "}";
      } else {
        out << " <= " << fmt(node.split.threshold);
      }
      out << "  (p = " << fmt(node.min_adjusted_p) << ", n = " << node.member_count << ")\n";
      stack.push_back(node.right_child);
      stack.push_back(node.left_child);
    } else {
      out << "[" << node.id << "]* n = " << node.member_count
          << ", quartile times: q25 = " << quart(node.curve, 0.75)
          << ", median = " << quart(node.curve, 0.5) << ", q75 = " << quart(node.curve, 0.25);
      if (node.em_failed) out << "  [EM not converged]";
      out << "\n";
    }
  }
  return out.str();
}

}  // namespace ictree
