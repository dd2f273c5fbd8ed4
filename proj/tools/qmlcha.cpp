// qmlcha command-line driver.
#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>

#include "qmlcha/cha.hpp"
#include "qmlcha/ensemble.hpp"
#include "qmlcha/io.hpp"
#include "qmlcha/kext.hpp"
#include "qmlcha/parallel.hpp"
#include "qmlcha/protocols.hpp"
#include "qmlcha/sampling.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qmlcha;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

struct Common {
  int threads = 0;
  std::uint64_t seed = 1;
};

void log_seed(const char* cmd, std::uint64_t seed) {
  std::cerr << "[qmlcha " << cmd << "] seed=" << seed << " threads=" << max_threads() << "\n";
}

fs::path config_path_for(const fs::path& out) { return fs::path(out.string() + ".config.json"); }

json base_config(const char* cmd, const Common& c) {
  return {{"command", cmd}, {"seed", c.seed}, {"threads", max_threads()}};
}

TreeParams tree_params(int depth, int min_leaf) {
  TreeParams p;
  p.max_depth = depth;
  p.min_leaf = min_leaf;
  p.validate();
  return p;
}

RMatrix coords_matrix(const LabeledDataset& ds) {
  RMatrix x(ds.dims.feature_dim(), static_cast<Eigen::Index>(ds.size()));
  for (std::size_t i = 0; i < ds.size(); ++i) x.col(static_cast<Eigen::Index>(i)) = ds.records[i].coords;
  return x;
}

// ---- gen-data ----
struct GenData {
  int da = 2, db = 2;
  std::size_t count = 50000;
  double lambda = 0.5;
  std::string label = "ppt";
  bool ppt_only = false;
  std::string out;
};

int run_gen_data(const GenData& g, const Common& c) {
  log_seed("gen-data", c.seed);
  SamplerConfig cfg;
  cfg.dims = Dims(g.da, g.db);
  cfg.dirichlet_exponent = g.lambda;
  cfg.seed = c.seed;
  std::unique_ptr<ConvexHull> hull;
  Labeler labeler = Labeler::ppt();
  std::string hull_hash;
  if (g.label.rfind("hull:", 0) == 0) {
    const fs::path hp = g.label.substr(5);
    hull = std::make_unique<ConvexHull>(io::read_qhul(hp));
    hull_hash = io::sha256_file(hp);
    if (!(hull->dims() == cfg.dims)) throw InvalidDimension("hull dims differ from --da/--db");
    labeler = Labeler::hull_oracle(*hull);
  } else if (g.label != "ppt") {
    throw InvalidArgument("--label must be 'ppt' or 'hull:PATH'");
  }
  DatasetStats stats;
  const LabeledDataset ds = build_dataset(cfg, g.count, labeler,
                                          g.ppt_only ? StateFilter::kPptOnly : StateFilter::kAll, &stats);
  io::write_qsds(g.out, ds);
  const double ppt = stats.draws ? static_cast<double>(stats.accepted) / static_cast<double>(stats.draws) : 0.0;
  std::cout << "records=" << ds.size() << " ppt_fraction=" << io::fmt(ppt)
            << " separable_fraction=" << io::fmt(ds.empty() ? 0.0 : ds.separable_fraction()) << "\n";
  json cfgj = base_config("gen-data", c);
  cfgj.update({{"da", g.da}, {"db", g.db}, {"count", g.count}, {"lambda", g.lambda}, {"label", g.label},
               {"ppt_only", g.ppt_only}, {"out", g.out}, {"hull_sha256", hull_hash},
               {"draws", stats.draws}, {"ppt_accepted", stats.accepted}});
  io::write_json(config_path_for(g.out), cfgj);
  return 0;
}

// ---- build-hull ----
struct BuildHull {
  int da = 2, db = 2;
  long m = 10000;
  std::string out;
};

int run_build_hull(const BuildHull& b, const Common& c) {
  log_seed("build-hull", c.seed);
  Rng rng(c.seed, protocols::kHullStream);
  const ConvexHull hull = build_hull(Dims(b.da, b.db), b.m, rng);
  io::write_qhul(b.out, hull);
  const std::string hash = io::sha256_file(b.out);
  std::cout << "m=" << hull.size() << " feature_dim=" << hull.dims().feature_dim() << " sha256=" << hash << "\n";
  json cfgj = base_config("build-hull", c);
  cfgj.update({{"da", b.da}, {"db", b.db}, {"m", b.m}, {"include_origin", true}, {"out", b.out}, {"sha256", hash}});
  io::write_json(config_path_for(b.out), cfgj);
  return 0;
}

// ---- classify ----
struct Classify {
  std::string hull, model, in, out;
};

int run_classify(const Classify& a, const Common& c) {
  log_seed("classify", c.seed);
  const auto hull = std::make_shared<const ConvexHull>(io::read_qhul(a.hull));
  const std::string hash = io::sha256_file(a.hull);
  const LabeledDataset ds = io::read_qsds(a.in);
  if (!ds.empty() && !(ds.dims == hull->dims())) throw InvalidDimension("dataset and hull dims differ");
  std::optional<BchaModel> model;
  if (!a.model.empty()) model = io::bind_model(io::read_model(a.model), hull, hash);
  const std::vector<double> alphas = alpha_batch(*hull, coords_matrix(ds));
  io::CsvWriter csv(a.out, {"index", "alpha", "label", "true_label"});
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const int label = model ? predict_bcha(*model, ds.records[i].coords, alphas[i])
                            : (alphas[i] >= 1.0 ? kSeparable : kEntangled);
    wrong += (label != ds.records[i].label);
    csv << static_cast<long long>(i) << alphas[i] << label << ds.records[i].label;
    csv.end_row();
  }
  if (!ds.empty())
    std::cout << (model ? "bcha" : "cha") << " error=" << io::fmt(static_cast<double>(wrong) / ds.size()) << "\n";
  json cfgj = base_config("classify", c);
  cfgj.update({{"hull", a.hull}, {"hull_sha256", hash}, {"model", a.model}, {"in", a.in}, {"out", a.out},
               {"method", model ? "bcha" : "cha"}});
  io::write_json(config_path_for(a.out), cfgj);
  return 0;
}

// ---- train ----
struct Train {
  std::string hull, data, out;
  int trees = 100;
  double split = 0.5;
  int max_depth = 24, min_leaf = 5;
};

int run_train(const Train& t, const Common& c) {
  log_seed("train", c.seed);
  if (!(t.split > 0.0 && t.split < 1.0)) throw InvalidArgument("--split must lie in (0,1)");
  const auto hull = std::make_shared<const ConvexHull>(io::read_qhul(t.hull));
  const std::string hash = io::sha256_file(t.hull);
  const LabeledDataset ds = io::read_qsds(t.data);
  if (ds.size() < 2) throw InvalidArgument("need at least two records to split");
  if (!(ds.dims == hull->dims())) throw InvalidDimension("dataset and hull dims differ");
  const LabeledDataset ext = extend_dataset(*hull, ds);
  const auto n_train = static_cast<std::size_t>(t.split * static_cast<double>(ext.size()));
  if (n_train == 0 || n_train == ext.size()) throw InvalidArgument("--split leaves an empty side");
  LabeledDataset train{ext.dims, ext.label_source, {ext.records.begin(), ext.records.begin() + static_cast<std::ptrdiff_t>(n_train)}};
  LabeledDataset test{ext.dims, ext.label_source, {ext.records.begin() + static_cast<std::ptrdiff_t>(n_train), ext.records.end()}};
  const TreeParams params = tree_params(t.max_depth, t.min_leaf);
  Rng rng(c.seed, protocols::kModelStream);
  BchaModel model = train_bcha(hull, train, t.trees, params, rng);
  model.hull_hash = hash;
  const double cha_err = evaluate(cha_classifier(), test);
  const double bcha_err = evaluate(committee_classifier(model.committee, FeatureMode::kWithAlpha), test);
  io::write_model(t.out, io::SavedModel{hull->dims(), FeatureMode::kWithAlpha, params, model.committee, hash});
  std::cout << "train=" << train.size() << " test=" << test.size() << " cha_error=" << io::fmt(cha_err)
            << " bcha_error=" << io::fmt(bcha_err) << "\n";
  json cfgj = base_config("train", c);
  cfgj.update({{"hull", t.hull}, {"hull_sha256", hash}, {"data", t.data}, {"L", t.trees}, {"split", t.split},
               {"params", io::params_to_json(params)}, {"tie_label", kEntangled}, {"out", t.out},
               {"report", {{"train", train.size()}, {"test", test.size()}, {"cha_error", cha_err}, {"bcha_error", bcha_err}}}});
  io::write_json(config_path_for(t.out), cfgj);
  return 0;
}

// ---- critical-point ----
struct Critical {
  std::string state = "tiles";
  std::string config;
  std::string out;
};

CriticalPointConfig load_cp_config(const std::string& path) {
  CriticalPointConfig cfg;
  if (path.empty()) return cfg;
  const json j = io::read_json(path);
  cfg.initial_points = j.value("initial_points", cfg.initial_points);
  cfg.epsilon0 = j.value("epsilon0", cfg.epsilon0);
  cfg.gamma = j.value("gamma", cfg.gamma);
  cfg.neighbors_per_point = j.value("neighbors_per_point", cfg.neighbors_per_point);
  cfg.max_iters = j.value("max_iters", cfg.max_iters);
  cfg.convergence_tol = j.value("convergence_tol", cfg.convergence_tol);
  cfg.convergence_window = j.value("convergence_window", cfg.convergence_window);
  cfg.validate();
  return cfg;
}

DensityMatrix load_state(const std::string& spec) {
  if (spec == "tiles") return tiles_state();
  if (spec == "singlet") return singlet_state();
  if (spec.rfind("file:", 0) == 0) {
    const LabeledDataset ds = io::read_qsds(fs::path(spec.substr(5)));
    if (ds.empty()) throw InvalidArgument("state file holds no records");
    const DensityMatrix rho = defeaturize(FeatureVector{ds.dims, ds.records.front().coords});
    return DensityMatrix(ds.dims, rho.matrix());
  }
  throw InvalidArgument("--state must be tiles, singlet or file:PATH");
}

int run_critical(const Critical& a, const Common& c) {
  log_seed("critical-point", c.seed);
  const CriticalPointConfig cfg = load_cp_config(a.config);
  const DensityMatrix rho = load_state(a.state);
  Rng rng(c.seed);
  const CriticalPointResult r = critical_point(rho, cfg, rng);
  io::CsvWriter csv(a.out, {"iteration", "alpha"});
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    csv << static_cast<long long>(i) << r.trace[i];
    csv.end_row();
  }
  std::cout << "alpha=" << io::fmt(r.alpha_est) << " iterations=" << r.iterations
            << " hull_size=" << r.final_hull.size() << " separable=" << (r.reached_separable ? "yes" : "no") << "\n";
  json cfgj = base_config("critical-point", c);
  cfgj.update({{"state", a.state}, {"out", a.out},
               {"config", {{"initial_points", cfg.initial_points}, {"epsilon0", cfg.epsilon0}, {"gamma", cfg.gamma},
                           {"neighbors_per_point", cfg.neighbors_per_point}, {"max_iters", cfg.max_iters},
                           {"convergence_tol", cfg.convergence_tol}, {"convergence_window", cfg.convergence_window}}},
               {"result", {{"alpha", r.alpha_est}, {"iterations", r.iterations}, {"reached_separable", r.reached_separable}}}});
  io::write_json(config_path_for(a.out), cfgj);
  return 0;
}

// ---- bench ----
struct Bench {
  std::string suite;
  std::string out = "bench_out";
  bool long_running = false;
  std::size_t train = 0, test = 0;
  int trees = 100;
  int max_depth = 24, min_leaf = 5;
};

void write_cha_bcha(const fs::path& path, const std::vector<protocols::ChaBchaRow>& rows) {
  io::CsvWriter csv(path, {"m", "cha_error_pct", "bcha_error_pct"});
  for (const auto& r : rows) {
    csv << static_cast<long long>(r.m) << 100.0 * r.cha_error << 100.0 * r.bcha_error;
    csv.end_row();
    std::cout << "m=" << r.m << " CHA=" << io::fmt(100.0 * r.cha_error) << "% BCHA=" << io::fmt(100.0 * r.bcha_error) << "%\n";
  }
}

int run_bench(const Bench& b, const Common& c) {
  log_seed("bench", c.seed);
  const fs::path dir(b.out);
  fs::create_directories(dir);
  json cfgj = base_config("bench", c);
  cfgj.update({{"suite", b.suite}, {"out", b.out}, {"long_running", b.long_running}});
  const TreeParams params = tree_params(b.max_depth, b.min_leaf);

  if (b.suite == "table1") {
    std::vector<long> ms{2000, 5000, 10000, 20000};
    if (b.long_running) {
      ms.insert(ms.end(), {50000, 100000});
      std::cerr << "long-running: m up to 1e5 two-qutrit hull, estimated 1-5 minutes\n";
    }
    const auto rows = protocols::table1(c.seed, ms);
    io::CsvWriter csv(dir / "table1.csv", {"m", "alpha", "residual"});
    for (const auto& r : rows) {
      csv << static_cast<long long>(r.m) << r.alpha << r.residual;
      csv.end_row();
      std::cout << "m=" << r.m << " alpha=" << io::fmt(r.alpha) << "\n";
    }
    cfgj["ms"] = ms;
  } else if (b.suite == "tableS1" || b.suite == "tableS2-partial") {
    protocols::TwoQubitConfig cfg;
    cfg.seed = c.seed;
    if (b.train) cfg.train = b.train;
    if (b.test) cfg.test = b.test;
    cfg.trees = b.trees;
    cfg.params = params;
    cfgj.update({{"train", cfg.train}, {"test", cfg.test}, {"L", cfg.trees}, {"params", io::params_to_json(params)}});
    if (b.suite == "tableS1") {
      cfgj["ms"] = cfg.ms;
      write_cha_bcha(dir / "tableS1.csv", protocols::table_s1(cfg));
    } else {
      const auto row = protocols::table_s2_partial(cfg);
      io::CsvWriter csv(dir / "tableS2_partial.csv", {"learner", "error_pct"});
      csv << std::string("Bagging") << 100.0 * row.bagging_error;
      csv.end_row();
      csv << std::string("Decision Tree") << 100.0 * row.tree_error;
      csv.end_row();
      std::cout << "Bagging=" << io::fmt(100.0 * row.bagging_error) << "% DecisionTree="
                << io::fmt(100.0 * row.tree_error) << "%\n";
    }
  } else if (b.suite == "tableS3-scaled") {
    protocols::QutritConfig cfg;
    cfg.seed = c.seed;
    if (b.long_running) {
      cfg.oracle_m = 100000;
      cfg.ms = {10000, 20000, 30000, 40000, 50000, 60000, 70000, 80000, 90000};
      cfg.train = 10000;
      cfg.test = 10000;
      std::cerr << "long-running: 1e5-point oracle over 2e4 PPT states, estimated 20-40 hours single-threaded\n";
    }
    if (b.train) cfg.train = b.train;
    if (b.test) cfg.test = b.test;
    cfg.trees = b.trees;
    cfg.params = params;
    const auto res = protocols::table_s3_scaled(cfg);
    std::cout << "oracle separable fraction=" << io::fmt(res.oracle_separable_fraction) << "\n";
    write_cha_bcha(dir / "tableS3_scaled.csv", res.rows);
    cfgj.update({{"oracle_m", cfg.oracle_m}, {"ms", cfg.ms}, {"train", cfg.train}, {"test", cfg.test},
                 {"L", cfg.trees}, {"params", io::params_to_json(params)},
                 {"oracle_separable_fraction", res.oracle_separable_fraction}});
  } else if (b.suite == "figS1") {
    protocols::FigS1Config cfg;
    cfg.seed = c.seed;
    const auto res = protocols::fig_s1(cfg);
    io::CsvWriter curves(dir / "figS1_boundaries.csv", {"theta", "x1", "x2", "k"});
    for (std::size_t k = 0; k < res.curves.size(); ++k)
      for (const auto& p : res.curves[k]) {
        curves << p.theta << p.x1 << p.x2 << static_cast<long long>(k + 1);
        curves.end_row();
      }
    io::CsvWriter sep(dir / "figS1_separable.csv", {"x1", "x2"});
    for (std::size_t i = 0; i < res.products.x1.size(); ++i) {
      sep << res.products.x1[i] << res.products.x2[i];
      sep.end_row();
    }
    std::cout << "max nesting violation=" << io::fmt(protocols::max_nesting_violation(res))
              << " min gap to separable=" << io::fmt(protocols::min_separable_gap(res)) << "\n";
    cfgj.update({{"k_max", cfg.k_max}, {"num_angles", cfg.num_angles}, {"product_states", cfg.product_states}});
  } else {
    throw InvalidArgument("unknown suite '" + b.suite + "'");
  }
  io::write_json(dir / (b.suite + ".config.json"), cfgj);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Separability classification with convex-hull approximation and bagged trees"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--threads", common.threads, "worker threads (default: all cores)")
      ->envname("QMLCHA_THREADS")
      ->check(CLI::NonNegativeNumber);

  GenData gd;
  auto* gen = app.add_subcommand("gen-data", "sample labelled random states into a QSDS file");
  gen->add_option("--da", gd.da)->capture_default_str();
  gen->add_option("--db", gd.db)->capture_default_str();
  gen->add_option("--count", gd.count)->capture_default_str();
  gen->add_option("--lambda", gd.lambda, "Dirichlet exponent")->capture_default_str();
  gen->add_option("--seed", common.seed)->capture_default_str();
  gen->add_option("--label", gd.label, "ppt | hull:PATH")->capture_default_str();
  gen->add_flag("--ppt-only", gd.ppt_only, "keep only PPT states");
  gen->add_option("--out", gd.out)->required();

  BuildHull bh;
  auto* hull = app.add_subcommand("build-hull", "sample product-state extreme points into a QHUL file");
  hull->add_option("--da", bh.da)->capture_default_str();
  hull->add_option("--db", bh.db)->capture_default_str();
  hull->add_option("--m", bh.m)->capture_default_str();
  hull->add_option("--seed", common.seed)->capture_default_str();
  hull->add_option("--out", bh.out)->required();

  Classify cl;
  auto* cls = app.add_subcommand("classify", "alpha and label for every state of a QSDS file");
  cls->add_option("--hull", cl.hull)->required();
  cls->add_option("--model", cl.model, "BCHA model JSON; CHA only when absent");
  cls->add_option("--in", cl.in)->required();
  cls->add_option("--out", cl.out)->required();

  Train tr;
  auto* trn = app.add_subcommand("train", "train a BCHA committee");
  trn->add_option("--hull", tr.hull)->required();
  trn->add_option("--data", tr.data)->required();
  trn->add_option("--L", tr.trees)->capture_default_str();
  trn->add_option("--split", tr.split, "training fraction")->capture_default_str();
  trn->add_option("--max-depth", tr.max_depth)->capture_default_str();
  trn->add_option("--min-leaf", tr.min_leaf)->capture_default_str();
  trn->add_option("--seed", common.seed)->capture_default_str();
  trn->add_option("--out", tr.out)->required();

  Critical cp;
  auto* crit = app.add_subcommand("critical-point", "iterative critical-point estimate");
  crit->add_option("--state", cp.state, "tiles | singlet | file:PATH")->capture_default_str();
  crit->add_option("--config", cp.config, "JSON with critical-point settings");
  crit->add_option("--seed", common.seed)->capture_default_str();
  crit->add_option("--out", cp.out)->required();

  Bench bn;
  auto* bench = app.add_subcommand("bench", "reproduce a results table");
  bench->add_option("--suite", bn.suite)
      ->required()
      ->check(CLI::IsMember({"table1", "tableS1", "tableS2-partial", "tableS3-scaled", "figS1"}));
  bench->add_option("--seed", common.seed)->capture_default_str();
  bench->add_option("--out", bn.out)->capture_default_str();
  bench->add_flag("--long-running", bn.long_running, "full-size runs (hours)");
  bench->add_option("--train", bn.train, "override training-set size");
  bench->add_option("--test", bn.test, "override test-set size");
  bench->add_option("--L", bn.trees)->capture_default_str();
  bench->add_option("--max-depth", bn.max_depth)->capture_default_str();
  bench->add_option("--min-leaf", bn.min_leaf)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    set_threads(common.threads);
    if (*gen) return run_gen_data(gd, common);
    if (*hull) return run_build_hull(bh, common);
    if (*cls) return run_classify(cl, common);
    if (*trn) return run_train(tr, common);
    if (*crit) return run_critical(cp, common);
    if (*bench) return run_bench(bn, common);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == Error::Kind::kNumerical ? kExitNumerical : kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
