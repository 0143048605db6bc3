#include "framescope/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "framescope/dataio.hpp"
#include "framescope/geometry.hpp"
#include "framescope/metrics.hpp"
#include "framescope/png_io.hpp"
#include "framescope/rng.hpp"
#include "framescope/segnet.hpp"
#include "framescope/sweep.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace framescope {

namespace {

// Everything configurable from flags or the JSON config file. Config file
// values become the defaults; explicit flags win.
struct Options {
  std::string config_path;
  std::string data_dir;
  std::string out_path;
  std::string in_path;
  std::string sidecar_path;
  std::string model_path;
  std::string strategy = "";
  std::string mode = "subsets";
  std::string shadow_dir;
  std::string cache_dir;
  double sigma_fraction = 0.25;
  std::string image_id;
  uint64_t seed = 0;
  int jobs = 1;
  // synth
  int count = 100;
  int side = 64;
  double contrast = 1.0;
  double noise_sigma = 0.01;
  double shadow_probability = 0.5;
  double illumination = 0.25;
  // model / training
  int base_channels = 8;
  int depth = 3;
  int steps = 200;
  int batch = 4;
  double lr = 0.05;
  double momentum = 0.9;
  int train_count = 0;
  int val_count = 0;
  int test_count = 0;
};

void merge_config_file(Options& o) {
  if (o.config_path.empty()) return;
  std::ifstream in(o.config_path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open config " + o.config_path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, "bad config JSON: " + std::string(e.what()));
  }
  const auto get = [&](const char* key, auto& field) {
    if (doc.contains(key)) field = doc[key].get<std::decay_t<decltype(field)>>();
  };
  get("data", o.data_dir);
  get("out", o.out_path);
  get("strategy", o.strategy);
  get("mode", o.mode);
  get("shadow_dir", o.shadow_dir);
  get("cache", o.cache_dir);
  get("sigma_fraction", o.sigma_fraction);
  get("seed", o.seed);
  get("jobs", o.jobs);
  get("count", o.count);
  get("side", o.side);
  get("contrast", o.contrast);
  get("noise_sigma", o.noise_sigma);
  get("shadow_probability", o.shadow_probability);
  get("illumination", o.illumination);
  get("base", o.base_channels);
  get("depth", o.depth);
  get("steps", o.steps);
  get("batch", o.batch);
  get("lr", o.lr);
  get("momentum", o.momentum);
  get("train", o.train_count);
  get("val", o.val_count);
  get("test", o.test_count);
}

StageParams stage_params_from(const Options& o) {
  StageParams p;
  if (!o.shadow_dir.empty())
    p.shadow = ShadowBackend::external(o.shadow_dir);
  else
    p.shadow = ShadowBackend::classic(o.sigma_fraction);
  return p;
}

std::string cache_dir_from(const Options& o) {
  if (const char* env = std::getenv("FRAMESCOPE_CACHE")) return env;
  return o.cache_dir;
}

Dataset load_dataset_dir(const std::string& dir) {
  return load_coco((fs::path(dir) / "annotations.json").string(),
                   (fs::path(dir) / "images").string());
}

std::vector<Sample> to_samples(const Dataset& ds, const Strategy& strategy,
                               const std::string& cache_dir) {
  std::vector<Sample> out;
  for (const DatasetEntry& e : ds.entries) {
    Sample s;
    s.image = apply_strategy_cached(strategy, e.image, e.id, cache_dir);
    s.masks = e.masks;
    out.push_back(std::move(s));
  }
  return out;
}

int cmd_rectify(const Options& o) {
  std::ifstream in(o.sidecar_path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open sidecar " + o.sidecar_path);
  json doc = json::parse(in);
  std::array<Point2, 4> quad;
  const auto& src = doc.at("src");
  if (src.size() != 4)
    throw Error(ErrorKind::ParseError, "sidecar src must list 4 points");
  for (int i = 0; i < 4; ++i)
    quad[i] = {src[i].at(0).get<double>(), src[i].at(1).get<double>()};
  const int out_w = doc.value("dst_width", 500);
  const int out_h = doc.value("dst_height", 500);
  const ImageBuffer image = read_png_rgb(o.in_path);
  write_png_rgb(o.out_path, rectify_quad(image, quad, out_w, out_h));
  return 0;
}

int cmd_preprocess(const Options& o) {
  const Strategy strategy = parse_strategy(o.strategy, stage_params_from(o));
  const ImageBuffer image = read_png_rgb(o.in_path);
  const std::string id =
      o.image_id.empty() ? fs::path(o.in_path).stem().string() : o.image_id;
  write_png_rgb(o.out_path, apply_strategy(strategy, image, id));
  return 0;
}

int cmd_synth(const Options& o) {
  SynthSpec spec;
  spec.count = o.count;
  spec.side = o.side;
  spec.contrast = o.contrast;
  spec.noise_sigma = o.noise_sigma;
  spec.shadow_probability = o.shadow_probability;
  spec.illumination_amplitude = o.illumination;
  spec.seed = Rng::derive(o.seed, 1);
  write_dataset(generate_synthetic(spec), o.out_path);
  return 0;
}

SegConfig seg_config_from(const Options& o) {
  SegConfig cfg;
  cfg.input_side = o.side;
  cfg.base_channels = o.base_channels;
  cfg.depth = o.depth;
  cfg.seed = Rng::derive(o.seed, 3);
  return cfg;
}

TrainConfig train_config_from(const Options& o) {
  TrainConfig tc;
  tc.learning_rate = o.lr;
  tc.momentum = o.momentum;
  tc.steps = o.steps;
  tc.batch_size = o.batch;
  tc.seed = Rng::derive(o.seed, 4);
  return tc;
}

int cmd_train(const Options& o) {
  const Dataset dataset = load_dataset_dir(o.data_dir);
  const int n = static_cast<int>(dataset.entries.size());
  int tr = o.train_count, va = o.val_count, te = o.test_count;
  if (tr + va + te == 0) {
    tr = n * 6 / 10;
    va = n * 2 / 10;
    te = n - tr - va;
  }
  const SplitResult splits = split(dataset, tr, va, te, Rng::derive(o.seed, 2));
  const Strategy strategy = parse_strategy(o.strategy, stage_params_from(o));
  const std::string cache = cache_dir_from(o);
  const std::vector<Sample> train_s = to_samples(splits.train, strategy, cache);
  const std::vector<Sample> val_s = to_samples(splits.val, strategy, cache);

  const SegModel model = build_model(seg_config_from(o));
  TrainHistory history;
  const SegModel best = train(model, train_s, val_s, train_config_from(o), &history);
  save_model(best, o.out_path);
  std::cout << "best_val_miou " << history.best_val_miou << "\n";
  return 0;
}

int cmd_eval(const Options& o) {
  const Dataset dataset = load_dataset_dir(o.data_dir);
  const SegModel model = load_model(o.model_path);
  const Strategy strategy = parse_strategy(o.strategy, stage_params_from(o));
  const std::string cache = cache_dir_from(o);

  std::vector<MaskSet> preds, truths;
  for (const DatasetEntry& e : dataset.entries) {
    preds.push_back(
        predict(model, apply_strategy_cached(strategy, e.image, e.id, cache)));
    truths.push_back(e.masks);
  }
  const std::vector<ClassId> classes(kAllClasses.begin(), kAllClasses.end());
  const MeanIoUResult result = mean_iou(preds, truths, classes);

  json per_class = json::object();
  for (const ClassIoU& c : result.per_class)
    per_class[class_name(c.class_id)] =
        c.support > 0 ? json(c.iou) : json();
  json doc = {{"per_class", per_class}, {"mean_iou", result.overall}};
  if (o.out_path.empty()) {
    std::cout << doc.dump(2) << "\n";
  } else {
    std::ofstream out(o.out_path);
    out << doc.dump(2) << "\n";
  }
  return 0;
}

void write_report_files(const SweepReport& report, const std::string& dir) {
  fs::create_directories(dir);
  {
    std::ofstream out(fs::path(dir) / "report.json", std::ios::binary);
    out << report_to_json(report);
  }
  {
    std::ofstream out(fs::path(dir) / "report.csv", std::ios::binary);
    out << report_to_csv(report);
  }
  if (report.mode == SweepConfig::Mode::Subsets)
    write_impact_charts(report, dir);
}

int cmd_sweep(const Options& o) {
  if (o.data_dir.empty() || o.out_path.empty()) {
    std::cerr << "sweep needs --data and --out (flags or config file)\n";
    return 2;
  }
  const Dataset dataset = load_dataset_dir(o.data_dir);
  SweepConfig cfg;
  cfg.mode = o.mode == "permutations" ? SweepConfig::Mode::Permutations
                                      : SweepConfig::Mode::Subsets;
  if (cfg.mode == SweepConfig::Mode::Permutations)
    cfg.permutation_base = parse_strategy(
        o.strategy.empty() ? "SR+CN+IN+CE" : o.strategy, stage_params_from(o));
  cfg.stage_params = stage_params_from(o);
  cfg.seg = seg_config_from(o);
  cfg.train = train_config_from(o);
  cfg.train_count = o.train_count;
  cfg.val_count = o.val_count;
  cfg.test_count = o.test_count;
  cfg.split_seed = Rng::derive(o.seed, 2);
  cfg.cache_dir = cache_dir_from(o);
  cfg.jobs = o.jobs;

  const SweepReport report = run_sweep(cfg, dataset);
  write_report_files(report, o.out_path);
  return 0;
}

int cmd_report(const Options& o) {
  std::ifstream in(o.in_path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open report " + o.in_path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  const SweepReport report = report_from_json(text);
  fs::create_directories(o.out_path);
  {
    std::ofstream out(fs::path(o.out_path) / "report.csv", std::ios::binary);
    out << report_to_csv(report);
  }
  if (report.mode == SweepConfig::Mode::Subsets)
    write_impact_charts(report, o.out_path);
  return 0;
}

}  // namespace

int dispatch(const std::vector<std::string>& args) {
  Options o;
  // The config file provides defaults; flags parsed afterwards override.
  for (size_t i = 0; i + 1 < args.size(); ++i)
    if (args[i] == "--config") o.config_path = args[i + 1];
  try {
    merge_config_file(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  CLI::App app{"window-frame defect inspection preprocessing and ablation toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--config", o.config_path, "JSON config file (defaults under flags)");

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--seed", o.seed, "master seed, fanned out per component");
    cmd->add_option("--strategy", o.strategy, "stage codes joined by '+', e.g. SR+CN");
    cmd->add_option("--shadow-dir", o.shadow_dir,
                    "directory of precomputed shadow-free PNGs");
    cmd->add_option("--sigma-fraction", o.sigma_fraction,
                    "classic shadow removal blur scale, fraction of min(H,W)");
    cmd->add_option("--cache", o.cache_dir,
                    "preprocessing cache directory (FRAMESCOPE_CACHE overrides)");
  };
  const auto add_model = [&](CLI::App* cmd) {
    cmd->add_option("--side", o.side, "model input side in pixels");
    cmd->add_option("--base", o.base_channels, "base channel count");
    cmd->add_option("--depth", o.depth, "encoder levels");
    cmd->add_option("--steps", o.steps, "SGD steps");
    cmd->add_option("--batch", o.batch, "batch size");
    cmd->add_option("--lr", o.lr, "learning rate");
    cmd->add_option("--momentum", o.momentum, "SGD momentum");
    cmd->add_option("--train", o.train_count, "training subset size");
    cmd->add_option("--val", o.val_count, "validation subset size");
    cmd->add_option("--test", o.test_count, "test subset size");
  };

  CLI::App* rectify = app.add_subcommand("rectify", "perspective-rectify one image");
  rectify->add_option("--in", o.in_path, "input PNG")->required();
  rectify->add_option("--sidecar", o.sidecar_path, "rectification JSON")->required();
  rectify->add_option("--out", o.out_path, "output PNG")->required();

  CLI::App* preprocess =
      app.add_subcommand("preprocess", "apply a stage strategy to one image");
  preprocess->add_option("--in", o.in_path, "input PNG")->required();
  preprocess->add_option("--out", o.out_path, "output PNG")->required();
  preprocess->add_option("--image-id", o.image_id, "id for the external shadow backend");
  add_common(preprocess);

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  synth->add_option("--out", o.out_path, "output dataset directory")->required();
  synth->add_option("--count", o.count, "number of images");
  synth->add_option("--side", o.side, "image side in pixels");
  synth->add_option("--contrast", o.contrast, "global contrast factor (0,1]");
  synth->add_option("--noise", o.noise_sigma, "gaussian noise sigma");
  synth->add_option("--shadow-prob", o.shadow_probability, "cast shadow probability");
  synth->add_option("--illumination", o.illumination, "gradient amplitude");
  synth->add_option("--seed", o.seed, "master seed");

  CLI::App* train_cmd = app.add_subcommand("train", "train one model");
  train_cmd->add_option("--data", o.data_dir, "dataset directory")->required();
  train_cmd->add_option("--out", o.out_path, "model checkpoint path")->required();
  add_common(train_cmd);
  add_model(train_cmd);

  CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint");
  eval_cmd->add_option("--data", o.data_dir, "dataset directory")->required();
  eval_cmd->add_option("--model", o.model_path, "model checkpoint")->required();
  eval_cmd->add_option("--out", o.out_path, "write JSON here instead of stdout");
  add_common(eval_cmd);

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "strategy sweep with report");
  sweep_cmd->add_option("--data", o.data_dir, "dataset directory");
  sweep_cmd->add_option("--out", o.out_path, "report output directory");
  sweep_cmd->add_option("--mode", o.mode, "subsets | permutations");
  sweep_cmd->add_option("--jobs", o.jobs, "parallel strategy workers");
  add_common(sweep_cmd);
  add_model(sweep_cmd);

  CLI::App* report_cmd =
      app.add_subcommand("report", "regenerate CSV and charts from report.json");
  report_cmd->add_option("--in", o.in_path, "report.json path")->required();
  report_cmd->add_option("--out", o.out_path, "output directory")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    if (rectify->parsed()) return cmd_rectify(o);
    if (preprocess->parsed()) return cmd_preprocess(o);
    if (synth->parsed()) return cmd_synth(o);
    if (train_cmd->parsed()) return cmd_train(o);
    if (eval_cmd->parsed()) return cmd_eval(o);
    if (sweep_cmd->parsed()) return cmd_sweep(o);
    if (report_cmd->parsed()) return cmd_report(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace framescope
