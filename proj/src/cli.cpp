#include "ictree/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "ictree/csvio.hpp"
#include "ictree/simlab.hpp"
#include "ictree/treedoc.hpp"

namespace ictree::cli {

namespace {

using nlohmann::json;

struct CliError : std::runtime_error {
  CliError(std::string code_, const std::string& msg)
      : std::runtime_error(msg), code(std::move(code_)) {}
  std::string code;
};

void write_file(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw CliError("E_IO", "cannot open output file: " + path);
    out << content;
    if (!out) {
      std::remove(tmp.c_str());
      throw CliError("E_IO", "failed writing output file: " + path);
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw CliError("E_IO", "cannot move output into place: " + path);
  }
}

std::vector<double> parse_times(const std::string& text) {
  std::vector<double> times;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      times.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw CliError("E_USAGE", "bad --times entry: '" + tok + "'");
    }
  }
  if (times.empty()) throw CliError("E_USAGE", "--times needs at least one time");
  return times;
}

// --------------------------------------------------------------------------
// simulate: JSON experiment configuration

EventDistribution dist_from_json(const std::string& family, const json& p) {
  if (family == "exponential") return exponential_dist(p.at("rate").get<double>());
  if (family == "weibull")
    return weibull_dist(p.at("shape").get<double>(), p.at("scale").get<double>());
  if (family == "lognormal")
    return lognormal_dist(p.at("mu").get<double>(), p.at("sigma").get<double>());
  if (family == "bathtub")
    return bathtub_dist(p.at("a").get<double>(), p.at("b").get<double>(),
                        p.at("c").get<double>());
  throw CliError("E_CONFIG", "unknown distribution family: " + family);
}

Method method_from_name(const std::string& name) {
  if (name == "oracle") return Method::oracle;
  if (name == "ic") return Method::ic;
  if (name == "left") return Method::impute_left;
  if (name == "mid") return Method::impute_mid;
  if (name == "right") return Method::impute_right;
  throw CliError("E_CONFIG", "unknown method: " + name);
}

ExperimentConfig experiment_config_from_json(const json& j) {
  ExperimentConfig cfg;

  const std::string setup = j.value("setup", std::string("tree"));
  if (setup == "null")
    cfg.sim.setup = Setup::null_design;
  else if (setup == "tree")
    cfg.sim.setup = Setup::tree_structured;
  else if (setup == "linear")
    cfg.sim.setup = Setup::linear;
  else if (setup == "nonlinear")
    cfg.sim.setup = Setup::nonlinear;
  else
    throw CliError("E_CONFIG", "unknown setup: " + setup);

  if (j.contains("distribution")) {
    const auto& d = j.at("distribution");
    const std::string family = d.at("family").get<std::string>();
    for (const auto& p : d.at("params")) cfg.sim.dists.push_back(dist_from_json(family, p));
  }
  if (j.contains("theta_family")) {
    const std::string f = j.at("theta_family").get<std::string>();
    if (f == "exponential")
      cfg.sim.theta_family = ThetaFamily::exponential;
    else if (f == "weibull-increasing")
      cfg.sim.theta_family = ThetaFamily::weibull_increasing;
    else if (f == "weibull-decreasing")
      cfg.sim.theta_family = ThetaFamily::weibull_decreasing;
    else
      throw CliError("E_CONFIG", "unknown theta_family: " + f);
  }
  if (j.contains("leaf_params")) {
    const auto lp = j.at("leaf_params").get<std::vector<int>>();
    if (lp.size() != 4) throw CliError("E_CONFIG", "leaf_params needs 4 entries");
    for (int i = 0; i < 4; ++i) cfg.sim.truth.leaf_params[static_cast<std::size_t>(i)] = lp[static_cast<std::size_t>(i)];
  }

  if (j.contains("censoring")) {
    const auto& c = j.at("censoring");
    cfg.censoring.target = c.value("target", 0.2);
    const std::string knob = c.value("knob", std::string("schedule-length"));
    if (knob == "fixed-delta")
      cfg.censoring.knob = CensoringPlan::Knob::fixed_delta;
    else if (knob == "schedule-length")
      cfg.censoring.knob = CensoringPlan::Knob::schedule_length;
    else if (knob == "uniform-scale")
      cfg.censoring.knob = CensoringPlan::Knob::uniform_scale;
    else
      throw CliError("E_CONFIG", "unknown censoring knob: " + knob);
    cfg.censoring.k = c.value("k", 5);
    cfg.censoring.draws = c.value("draws", 100000);
    cfg.censoring.kmax = c.value("kmax", 4096);
    cfg.censoring.tolerance = c.value("tolerance", 0.02);
    if (c.contains("gap")) {
      const auto& g = c.at("gap");
      const std::string kind = g.value("kind", std::string("uniform"));
      cfg.censoring.gap.kind =
          kind == "fixed" ? GapSpec::Kind::fixed : GapSpec::Kind::uniform;
      cfg.censoring.gap.delta = g.value("delta", 0.5);
      cfg.censoring.gap.lo = g.value("lo", 0.3);
      cfg.censoring.gap.hi = g.value("hi", 0.7);
    }
  }

  cfg.n = j.value("n", 200);
  cfg.trials = j.value("trials", 200);
  cfg.seed = j.value("seed", static_cast<std::uint64_t>(1));
  cfg.jobs = j.value("jobs", 0);

  if (j.contains("tree")) {
    const auto& t = j.at("tree");
    cfg.tree.alpha = t.value("alpha", 0.05);
    cfg.tree.minsplit = t.value("minsplit", 20);
    cfg.tree.minbucket = t.value("minbucket", 7);
    cfg.tree.maxdepth = t.value("maxdepth", 0);
    cfg.tree.multiplicity = t.value("multiplicity", std::string("bonferroni")) == "none"
                                ? Multiplicity::none
                                : Multiplicity::bonferroni;
    cfg.tree.em.tol = t.value("em_tol", 1e-10);
    cfg.tree.em.max_iter = t.value("em_max_iter", 100000L);
  }

  if (j.contains("methods")) {
    cfg.methods.clear();
    for (const auto& m : j.at("methods"))
      cfg.methods.push_back(method_from_name(m.get<std::string>()));
  }
  return cfg;
}

std::string mechanism_line(const CalibratedMechanism& cal) {
  std::ostringstream out;
  const auto& mech = cal.mechanism;
  out << "# mechanism,k=" << mech.k << ",gap=";
  if (mech.gap.kind == GapSpec::Kind::fixed)
    out << "fixed(" << format_double(mech.gap.delta) << ")";
  else
    out << "uniform(" << format_double(mech.gap.lo) << "," << format_double(mech.gap.hi) << ")";
  out << ",achieved_rc=" << format_double(cal.achieved);
  return out.str();
}

std::string result_to_csv(const ExperimentResult& res) {
  std::ostringstream out;
  const auto& cfg = res.config;

  out << "trial,ok";
  if (cfg.kind == ExperimentKind::unbiasedness) {
    out << ",selected,split_at_alpha";
  } else {
    for (Method m : cfg.methods) out << ',' << method_name(m);
  }
  out << ",error\n";

  for (const auto& t : res.trials) {
    out << t.trial << ',' << (t.ok ? 1 : 0);
    if (cfg.kind == ExperimentKind::unbiasedness) {
      out << ',' << t.selected << ',' << (t.split_at_alpha ? 1 : 0);
    } else if (cfg.kind == ExperimentKind::recovery) {
      for (std::size_t m = 0; m < cfg.methods.size(); ++m)
        out << ',' << (t.ok ? std::to_string(t.recovered[m]) : std::string());
    } else {
      for (std::size_t m = 0; m < cfg.methods.size(); ++m)
        out << ',' << (t.ok ? format_double(t.l2[m]) : std::string());
    }
    out << ',' << t.error << '\n';
  }

  out << mechanism_line(res.mechanism) << '\n';
  out << "# trials_ok," << res.agg.ok_trials << ",trials_failed," << res.agg.failed_trials
      << '\n';

  if (cfg.kind == ExperimentKind::unbiasedness) {
    out << "# aggregate";
    for (std::size_t c = 0; c < res.agg.selection_counts.size(); ++c) out << ",X" << c + 1;
    out << ",chisq_p\n# counts";
    for (long v : res.agg.selection_counts) out << ',' << v;
    out << ',' << format_double(res.agg.chisq_p) << "\n# proportions";
    for (long v : res.agg.selection_counts)
      out << ','
          << format_double(res.agg.ok_trials > 0
                               ? static_cast<double>(v) / static_cast<double>(res.agg.ok_trials)
                               : 0.0);
    out << "\n# split_fraction," << format_double(res.agg.split_fraction) << '\n';
  } else if (cfg.kind == ExperimentKind::recovery) {
    out << "# aggregate,method,recovery_pct\n";
    for (std::size_t m = 0; m < cfg.methods.size(); ++m)
      out << "# row," << method_name(cfg.methods[m]) << ','
          << format_double(res.agg.recovery_pct[m]) << '\n';
  } else {
    out << "# aggregate,method,mean_l2,median_l2,signed_rank_vs_ic\n";
    for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
      out << "# row," << method_name(cfg.methods[m]) << ','
          << format_double(res.agg.mean_l2[m]) << ',' << format_double(res.agg.median_l2[m])
          << ',';
      if (cfg.methods[m] == Method::ic)
        out << '-';
      else
        out << format_double(res.agg.signed_rank_vs_ic[m]);
      out << '\n';
    }
  }
  return out.str();
}

// --------------------------------------------------------------------------
// commands

void tree_config_flags(CLI::App* cmd, double* alpha, int* minsplit, int* minbucket,
                       int* maxdepth, std::string* multiplicity, double* em_tol,
                       long* em_max_iter) {
  cmd->add_option("--alpha", *alpha, "significance threshold for splitting");
  cmd->add_option("--minsplit", *minsplit, "minimum node size to attempt a split");
  cmd->add_option("--minbucket", *minbucket, "minimum terminal node size");
  cmd->add_option("--maxdepth", *maxdepth, "maximum depth (0 = unlimited)");
  cmd->add_option("--multiplicity", *multiplicity, "bonferroni|none");
  cmd->add_option("--em-tol", *em_tol, "NPMLE EM convergence tolerance");
  cmd->add_option("--em-max-iter", *em_max_iter, "NPMLE EM iteration cap");
}

TreeConfig collect_tree_config(double alpha, int minsplit, int minbucket, int maxdepth,
                               const std::string& multiplicity, double em_tol,
                               long em_max_iter) {
  TreeConfig cfg;
  cfg.alpha = alpha;
  cfg.minsplit = minsplit;
  cfg.minbucket = minbucket;
  cfg.maxdepth = maxdepth;
  if (multiplicity == "bonferroni")
    cfg.multiplicity = Multiplicity::bonferroni;
  else if (multiplicity == "none")
    cfg.multiplicity = Multiplicity::none;
  else
    throw CliError("E_USAGE", "--multiplicity must be bonferroni or none");
  cfg.em.tol = em_tol;
  cfg.em.max_iter = em_max_iter;
  return cfg;
}

int cmd_fit(const std::string& data_path, const std::string& out_path, const TreeConfig& cfg) {
  ParsedDataset ds;
  try {
    ds = parse_dataset_file(data_path);
  } catch (const std::invalid_argument& e) {
    throw CliError("E_PARSE", std::string(e.what()));
  }
  Tree tree;
  try {
    tree = grow_tree(ds.observations, ds.covariates, cfg);
  } catch (const std::invalid_argument& e) {
    throw CliError("E_DATA", std::string(e.what()));
  }
  write_file(out_path, tree_to_json(tree));
  std::cout << render_tree_text(tree);
  return 0;
}

int cmd_predict(const std::string& tree_path, const std::string& data_path,
                const std::string& times_text, const std::string& out_path) {
  const Tree tree = read_tree_file(tree_path);
  ParsedDataset ds;
  try {
    ds = parse_dataset_file(data_path);
  } catch (const std::invalid_argument& e) {
    throw CliError("E_PARSE", std::string(e.what()));
  }
  const auto times = parse_times(times_text);

  std::ostringstream out;
  out << "row";
  for (double t : times) out << ",S@" << format_double(t);
  out << '\n';
  for (std::size_t i = 0; i < ds.observations.size(); ++i) {
    const auto row = prediction_row(ds, tree, static_cast<int>(i));
    const SurvivalCurve& curve = predict_curve(tree, row);
    out << i;
    for (double t : times) out << ',' << format_double(curve.survival(t));
    out << '\n';
  }
  write_file(out_path, out.str());
  return 0;
}

int cmd_impute(const std::string& mode_text, const std::string& data_path,
               const std::string& out_path) {
  ImputationMode mode;
  if (mode_text == "left")
    mode = ImputationMode::left;
  else if (mode_text == "mid")
    mode = ImputationMode::mid;
  else if (mode_text == "right")
    mode = ImputationMode::right;
  else
    throw CliError("E_USAGE", "--mode must be left, mid or right");

  ParsedDataset ds;
  try {
    ds = parse_dataset_file(data_path);
  } catch (const std::invalid_argument& e) {
    throw CliError("E_PARSE", std::string(e.what()));
  }
  ImputeStats stats;
  const auto imputed = impute(ds.observations, mode, &stats);
  std::ostringstream out;
  write_dataset(out, imputed, ds.covariates);
  write_file(out_path, out.str());
  if (stats.zero_clamped > 0)
    std::cerr << "note: " << stats.zero_clamped
              << " left-imputed time(s) clamped away from zero\n";
  return 0;
}

int cmd_simulate(const std::string& experiment, const std::string& config_path,
                 long trials_override, long seed_override, int jobs_override,
                 const std::string& out_path) {
  json j;
  {
    std::ifstream in(config_path);
    if (!in) throw CliError("E_IO", "cannot open config file: " + config_path);
    try {
      in >> j;
    } catch (const std::exception& e) {
      throw CliError("E_CONFIG", std::string("bad config JSON: ") + e.what());
    }
  }
  ExperimentConfig cfg;
  try {
    cfg = experiment_config_from_json(j);
  } catch (const json::exception& e) {
    throw CliError("E_CONFIG", std::string("bad config: ") + e.what());
  }

  if (experiment == "unbiasedness")
    cfg.kind = ExperimentKind::unbiasedness;
  else if (experiment == "recovery")
    cfg.kind = ExperimentKind::recovery;
  else if (experiment == "prediction")
    cfg.kind = ExperimentKind::prediction;
  else
    throw CliError("E_USAGE", "--experiment must be unbiasedness, recovery or prediction");

  if (trials_override > 0) cfg.trials = static_cast<int>(trials_override);
  if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
  if (jobs_override > 0) cfg.jobs = jobs_override;

  ExperimentResult res;
  try {
    res = run_experiment(cfg);
  } catch (const std::exception& e) {
    throw CliError("E_RUN", std::string(e.what()));
  }
  write_file(out_path, result_to_csv(res));

  // Short summary on stdout.
  std::cout << mechanism_line(res.mechanism) << '\n';
  if (cfg.kind == ExperimentKind::unbiasedness) {
    std::cout << "selection counts:";
    for (long v : res.agg.selection_counts) std::cout << ' ' << v;
    std::cout << "  chisq p = " << res.agg.chisq_p
              << "  split fraction = " << res.agg.split_fraction << '\n';
  } else if (cfg.kind == ExperimentKind::recovery) {
    for (std::size_t m = 0; m < cfg.methods.size(); ++m)
      std::cout << method_name(cfg.methods[m]) << " recovery = " << res.agg.recovery_pct[m]
                << "%\n";
  } else {
    for (std::size_t m = 0; m < cfg.methods.size(); ++m)
      std::cout << method_name(cfg.methods[m]) << " mean L2 = " << res.agg.mean_l2[m]
                << (cfg.methods[m] == Method::ic
                        ? ""
                        : "  (signed-rank vs ic p = " +
                              std::to_string(res.agg.signed_rank_vs_ic[m]) + ")")
                << '\n';
  }
  if (res.agg.failed_trials > 0)
    std::cerr << "note: " << res.agg.failed_trials << " trial(s) failed and were excluded\n";
  return 0;
}

int cmd_bench(const std::string& sizes_text, std::uint64_t seed);

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"interval-censored conditional-inference survival trees"};
  app.require_subcommand(1);

  // fit
  auto* fit = app.add_subcommand("fit", "fit a survival tree to a CSV dataset");
  std::string fit_data, fit_out;
  double alpha = 0.05, em_tol = 1e-10;
  int minsplit = 20, minbucket = 7, maxdepth = 0;
  long em_max_iter = 100000;
  std::string multiplicity = "bonferroni";
  fit->add_option("--data", fit_data, "input dataset")->required();
  fit->add_option("--out", fit_out, "output tree JSON")->required();
  tree_config_flags(fit, &alpha, &minsplit, &minbucket, &maxdepth, &multiplicity, &em_tol,
                    &em_max_iter);

  // predict
  auto* predict = app.add_subcommand("predict", "evaluate fitted curves at given times");
  std::string pr_tree, pr_data, pr_times, pr_out;
  predict->add_option("--tree", pr_tree, "tree JSON from fit")->required();
  predict->add_option("--data", pr_data, "dataset with the tree's covariates")->required();
  predict->add_option("--times", pr_times, "comma-separated evaluation times")->required();
  predict->add_option("--out", pr_out, "output CSV")->required();

  // impute
  auto* imp = app.add_subcommand("impute", "convert intervals to exact times");
  std::string im_mode, im_data, im_out;
  imp->add_option("--mode", im_mode, "left|mid|right")->required();
  imp->add_option("--data", im_data, "input dataset")->required();
  imp->add_option("--out", im_out, "output dataset")->required();

  // simulate
  auto* sim = app.add_subcommand("simulate", "run a Monte Carlo experiment");
  std::string sm_experiment, sm_config, sm_out;
  long sm_trials = 0, sm_seed = -1;
  int sm_jobs = 0;
  sim->add_option("--experiment", sm_experiment, "unbiasedness|recovery|prediction")
      ->required();
  sim->add_option("--config", sm_config, "experiment config JSON")->required();
  sim->add_option("--trials", sm_trials, "override trial count");
  sim->add_option("--seed", sm_seed, "override seed");
  sim->add_option("--jobs", sm_jobs, "parallel trial workers");
  sim->add_option("--out", sm_out, "output CSV")->required();

  // bench
  auto* bench = app.add_subcommand("bench", "informational timing report");
  std::string bn_sizes = "50,100,200";
  std::uint64_t bn_seed = 7;
  bench->add_option("--sizes", bn_sizes, "comma-separated sample sizes");
  bench->add_option("--seed", bn_seed, "rng seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "E_USAGE: " << e.what() << '\n';
    return 1;
  }

  try {
    if (fit->parsed())
      return cmd_fit(fit_data, fit_out,
                     collect_tree_config(alpha, minsplit, minbucket, maxdepth, multiplicity,
                                         em_tol, em_max_iter));
    if (predict->parsed()) return cmd_predict(pr_tree, pr_data, pr_times, pr_out);
    if (imp->parsed()) return cmd_impute(im_mode, im_data, im_out);
    if (sim->parsed())
      return cmd_simulate(sm_experiment, sm_config, sm_trials, sm_seed, sm_jobs, sm_out);
    if (bench->parsed()) return cmd_bench(bn_sizes, bn_seed);
  } catch (const CliError& e) {
    std::cerr << e.code << ": " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "E_DATA: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "E_RUN: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("ictree");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

namespace {

// --------------------------------------------------------------------------
// bench: optimized vs reference EM, IC vs imputed trees, serial vs parallel
// trial execution. Informational only.

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int cmd_bench(const std::string& sizes_text, std::uint64_t seed) {
  std::vector<int> sizes;
  for (const auto& tok : [&] {
         std::vector<std::string> parts;
         std::stringstream ss(sizes_text);
         std::string t;
         while (std::getline(ss, t, ',')) parts.push_back(t);
         return parts;
       }())
    sizes.push_back(std::stoi(tok));

  SimConfig sim;
  sim.setup = Setup::tree_structured;
  sim.dists = {exponential_dist(0.1), exponential_dist(0.23), exponential_dist(0.4),
               exponential_dist(0.9)};
  CensoringPlan plan;
  plan.target = 0.2;
  plan.knob = CensoringPlan::Knob::schedule_length;
  plan.gap = {GapSpec::Kind::uniform, 0.5, 0.3, 0.7};
  auto sampler = [&sim](Rng& r) { return sample_marginal_event_time(sim, r); };
  const auto cal = calibrate_censoring(sampler, plan.target, plan, seed);

  std::printf("NPMLE kernel (tol 1e-10): optimized vs dense reference\n");
  std::printf("%8s %14s %14s %12s\n", "n", "optimized(ms)", "reference(ms)", "max |dm|");
  for (int n : sizes) {
    Rng rng = make_rng(seed ^ static_cast<std::uint64_t>(n));
    const SimDataset ds = gen_dataset(sim, &cal.mechanism, n, rng);
    NpmleOptions opt;
    opt.allow_product_limit = false;

    const auto t0 = std::chrono::steady_clock::now();
    const SurvivalCurve fast = fit_npmle(ds.observations, opt);
    const double fast_s = seconds_since(t0);

    const auto t1 = std::chrono::steady_clock::now();
    const SurvivalCurve ref = fit_npmle_reference(ds.observations, opt);
    const double ref_s = seconds_since(t1);

    double dm = 0.0;
    for (std::size_t j = 0; j < fast.masses().size(); ++j)
      dm = std::max(dm, std::fabs(fast.masses()[j] - ref.masses()[j]));
    std::printf("%8d %14.2f %14.2f %12.2e\n", n, fast_s * 1e3, ref_s * 1e3, dm);
  }

  std::printf("\ntree fits (N = %d)\n", sizes.back());
  {
    Rng rng = make_rng(seed ^ 0xABCDULL);
    const SimDataset ds = gen_dataset(sim, &cal.mechanism, sizes.back(), rng);
    TreeConfig tc;
    auto t0 = std::chrono::steady_clock::now();
    const Tree ic = grow_tree(ds.observations, ds.covariates, tc);
    std::printf("  IC tree:      %8.2f ms (%d terminals)\n", seconds_since(t0) * 1e3,
                ic.terminal_count());
    t0 = std::chrono::steady_clock::now();
    const Tree mid = fit_imputed_tree(ds.observations, ds.covariates, ImputationMode::mid, tc);
    std::printf("  imputed tree: %8.2f ms (%d terminals)\n", seconds_since(t0) * 1e3,
                mid.terminal_count());
  }

  std::printf("\nexperiment trials (recovery, 20 trials): serial vs parallel\n");
  {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::recovery;
    cfg.sim = sim;
    cfg.censoring = plan;
    cfg.n = sizes.back();
    cfg.trials = 20;
    cfg.seed = seed;
    cfg.methods = {Method::ic};
    cfg.jobs = 1;
    auto t0 = std::chrono::steady_clock::now();
    run_experiment(cfg);
    const double serial = seconds_since(t0);
    cfg.jobs = 0;  // library default: all cores
    t0 = std::chrono::steady_clock::now();
    run_experiment(cfg);
    const double parallel = seconds_since(t0);
    std::printf("  jobs=1: %.2f s   jobs=auto: %.2f s   speedup %.2fx\n", serial, parallel,
                parallel > 0 ? serial / parallel : 0.0);
  }
  return 0;
}

}  // namespace

}  // namespace ictree::cli
