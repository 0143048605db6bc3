#include "framescope/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include "framescope/metrics.hpp"

namespace fs = std::filesystem;

namespace framescope {

namespace {

uint64_t fnv1a(const void* bytes, size_t len, uint64_t h = 0xCBF29CE484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(bytes);
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001B3ULL;
  }
  return h;
}

uint64_t hash_str(const std::string& s, uint64_t h) {
  return fnv1a(s.data(), s.size(), h);
}

uint64_t hash_doubles(const std::vector<double>& v, uint64_t h) {
  return fnv1a(v.data(), v.size() * sizeof(double), h);
}

std::string stage_params_encoding(const StageParams& p) {
  char buf[256];
  std::string out;
  std::snprintf(buf, sizeof(buf), "shadow=%d;sf=%.17g;dir=%s;",
                static_cast<int>(p.shadow.kind), p.shadow.sigma_fraction,
                p.shadow.directory.c_str());
  out += buf;
  if (p.source_white) {
    std::snprintf(buf, sizeof(buf), "src=%.17g,%.17g,%.17g;", p.source_white->r,
                  p.source_white->g, p.source_white->b);
    out += buf;
  } else {
    out += "src=auto;";
  }
  std::snprintf(buf, sizeof(buf), "dst=%.17g,%.17g,%.17g;eps=%.17g;ref=%d;",
                p.target_white.r, p.target_white.g, p.target_white.b,
                p.msr.epsilon, p.msr.reference_side);
  out += buf;
  for (size_t i = 0; i < p.msr.scales.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "s%zu=%.17g,w%zu=%.17g;", i, p.msr.scales[i],
                  i, p.msr.weights[i]);
    out += buf;
  }
  return out;
}

}  // namespace

std::vector<Strategy> enumerate_subsets(const std::vector<StageId>& stages) {
  // distinct stages, canonical order
  std::vector<StageId> base = stages;
  std::sort(base.begin(), base.end());
  base.erase(std::unique(base.begin(), base.end()), base.end());

  std::vector<Strategy> out;
  const int n = static_cast<int>(base.size());
  for (int mask = 0; mask < (1 << n); ++mask) {
    std::vector<StageId> subset;
    for (int i = 0; i < n; ++i)
      if (mask & (1 << i)) subset.push_back(base[i]);
    out.push_back(validate_strategy(subset));
  }
  std::sort(out.begin(), out.end(), [](const Strategy& a, const Strategy& b) {
    if (a.stages.size() != b.stages.size())
      return a.stages.size() < b.stages.size();
    return a.stages < b.stages;
  });
  return out;
}

std::vector<Strategy> enumerate_permutations(const Strategy& strategy) {
  if (strategy.empty())
    throw Error(ErrorKind::EmptyStrategy, "cannot permute the empty strategy");
  std::vector<StageId> stages = strategy.stages;
  std::sort(stages.begin(), stages.end());
  std::vector<Strategy> out;
  do {
    out.push_back(validate_strategy(stages, strategy.params));
  } while (std::next_permutation(stages.begin(), stages.end()));
  return out;
}

uint64_t preprocess_cache_key(const ImageBuffer& image, const Strategy& strategy) {
  uint64_t h = 0xCBF29CE484222325ULL;
  const int dims[2] = {image.width, image.height};
  h = fnv1a(dims, sizeof(dims), h);
  h = hash_doubles(image.data, h);
  h = hash_str(strategy.label(), h);
  h = hash_str(stage_params_encoding(strategy.params), h);
  return h;
}

ImageBuffer apply_strategy_cached(const Strategy& strategy, const ImageBuffer& image,
                                  const std::string& image_id,
                                  const std::string& cache_dir) {
  if (cache_dir.empty() || strategy.empty())
    return apply_strategy(strategy, image, image_id);

  const uint64_t key = preprocess_cache_key(image, strategy);
  char name[32];
  std::snprintf(name, sizeof(name), "%016llx.fsimg",
                static_cast<unsigned long long>(key));
  const fs::path path = fs::path(cache_dir) / name;

  if (fs::exists(path)) {
    std::ifstream in(path, std::ios::binary);
    int dims[2];
    in.read(reinterpret_cast<char*>(dims), sizeof(dims));
    ImageBuffer out(dims[0], dims[1]);
    in.read(reinterpret_cast<char*>(out.data.data()),
            static_cast<std::streamsize>(out.data.size() * sizeof(double)));
    if (in) return out;
    // fall through to recompute on a corrupt entry
  }

  ImageBuffer out = apply_strategy(strategy, image, image_id);
  fs::create_directories(cache_dir);
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream of(tmp, std::ios::binary);
    const int dims[2] = {out.width, out.height};
    of.write(reinterpret_cast<const char*>(dims), sizeof(dims));
    of.write(reinterpret_cast<const char*>(out.data.data()),
             static_cast<std::streamsize>(out.data.size() * sizeof(double)));
  }
  fs::rename(tmp, path);
  return out;
}

namespace {

std::vector<Sample> preprocess_split(const Strategy& strategy, const Dataset& ds,
                                     const std::string& cache_dir) {
  std::vector<Sample> out;
  out.reserve(ds.entries.size());
  for (const DatasetEntry& e : ds.entries) {
    Sample s;
    s.image = apply_strategy_cached(strategy, e.image, e.id, cache_dir);
    s.masks = e.masks;
    out.push_back(std::move(s));
  }
  return out;
}

StrategyResult evaluate_strategy(const SweepConfig& cfg, const Strategy& strategy,
                                 const SplitResult& splits) {
  StrategyResult result;
  result.strategy = strategy;
  try {
    const std::vector<Sample> train_s =
        preprocess_split(strategy, splits.train, cfg.cache_dir);
    const std::vector<Sample> val_s =
        preprocess_split(strategy, splits.val, cfg.cache_dir);
    const std::vector<Sample> test_s =
        preprocess_split(strategy, splits.test, cfg.cache_dir);

    const SegModel model = build_model(cfg.seg);
    TrainHistory history;
    const SegModel best = train(model, train_s, val_s, cfg.train, &history);
    result.val_best_miou = history.best_val_miou;
    result.loss_at_best = history.loss_at_best;

    std::vector<MaskSet> preds, truths;
    for (const Sample& s : test_s) {
      preds.push_back(predict(best, s.image));
      truths.push_back(s.masks);
    }
    const std::vector<ClassId> classes(kAllClasses.begin(), kAllClasses.end());
    const MeanIoUResult miou = mean_iou(preds, truths, classes);
    result.test_mean_iou = miou.overall;
    for (const ClassIoU& entry : miou.per_class) {
      const int c = static_cast<int>(entry.class_id);
      result.test_iou[c] = entry.iou;
      result.test_iou_defined[c] = entry.support > 0;
    }
  } catch (const Error& e) {
    result.failed = true;
    result.error = e.what();
  }
  return result;
}

}  // namespace

SweepReport run_sweep(const SweepConfig& cfg, const Dataset& dataset) {
  std::vector<Strategy> strategies;
  if (cfg.mode == SweepConfig::Mode::Subsets) {
    strategies = enumerate_subsets(
        {StageId::SR, StageId::CN, StageId::IN, StageId::CE});
    for (Strategy& s : strategies) s.params = cfg.stage_params;
  } else {
    Strategy base = cfg.permutation_base;
    base.params = cfg.stage_params;
    strategies = enumerate_permutations(base);
  }

  int train_count = cfg.train_count, val_count = cfg.val_count,
      test_count = cfg.test_count;
  const int n = static_cast<int>(dataset.entries.size());
  if (train_count + val_count + test_count == 0) {
    train_count = n * 6 / 10;
    val_count = n * 2 / 10;
    test_count = n - train_count - val_count;
  }
  const SplitResult splits =
      split(dataset, train_count, val_count, test_count, cfg.split_seed);

  SweepReport report;
  report.mode = cfg.mode;

  {  // digest over everything that determines the result
    uint64_t h = 0xCBF29CE484222325ULL;
    h = hash_str(cfg.mode == SweepConfig::Mode::Subsets ? "subsets" : "perms", h);
    h = hash_str(stage_params_encoding(cfg.stage_params), h);
    char buf[256];
    std::snprintf(buf, sizeof(buf), "seg=%d,%d,%d,%d,%llu;tr=%.17g,%.17g,%d,%d,%llu;"
                  "split=%d,%d,%d,%llu",
                  cfg.seg.input_side, cfg.seg.base_channels, cfg.seg.depth,
                  cfg.seg.classes, static_cast<unsigned long long>(cfg.seg.seed),
                  cfg.train.learning_rate, cfg.train.momentum, cfg.train.steps,
                  cfg.train.batch_size,
                  static_cast<unsigned long long>(cfg.train.seed), train_count,
                  val_count, test_count,
                  static_cast<unsigned long long>(cfg.split_seed));
    h = hash_str(buf, h);
    for (const DatasetEntry& e : dataset.entries) {
      h = hash_str(e.id, h);
      h = hash_doubles(e.image.data, h);
    }
    char digest[17];
    std::snprintf(digest, sizeof(digest), "%016llx",
                  static_cast<unsigned long long>(h));
    report.config_digest = digest;
  }

  report.rows.resize(strategies.size());
  std::atomic<size_t> next{0};
  const int jobs = std::max(1, cfg.jobs);
  const auto worker = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= strategies.size()) break;
      report.rows[i] = evaluate_strategy(cfg, strategies[i], splits);
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  if (cfg.mode == SweepConfig::Mode::Subsets) {
    for (size_t i = 0; i < report.rows.size(); ++i)
      if (report.rows[i].strategy.empty()) report.baseline_index = static_cast<int>(i);
    impact_table(report);
    report.notes.push_back("subsets mode: evaluated all " +
                           std::to_string(report.rows.size()) +
                           " stage subsets including the empty baseline");
  } else {
    std::vector<std::array<double, kNumClasses>> per_ordering;
    for (const StrategyResult& r : report.rows)
      if (!r.failed) per_ordering.push_back(r.test_iou);
    report.spreads = order_spread(per_ordering);
    report.notes.push_back("permutations mode: spreads are max-min test IoU "
                           "across stage orderings");
  }
  return report;
}

void impact_table(SweepReport& report) {
  if (report.baseline_index < 0 ||
      report.rows[report.baseline_index].failed)
    throw Error(ErrorKind::MissingBaseline, "no baseline row in the report");
  const StrategyResult& base = report.rows[report.baseline_index];
  for (int c = 0; c < kNumClasses; ++c) {
    auto& list = report.deltas[c];
    list.clear();
    if (!base.test_iou_defined[c]) continue;
    for (const StrategyResult& row : report.rows) {
      if (row.failed || !row.test_iou_defined[c]) continue;
      list.emplace_back(row.strategy.label(), row.test_iou[c] - base.test_iou[c]);
    }
    std::sort(list.begin(), list.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
  }
}

std::array<double, kNumClasses> order_spread(
    const std::vector<std::array<double, kNumClasses>>& per_ordering) {
  if (per_ordering.size() < 2)
    throw Error(ErrorKind::InsufficientOrderings,
                "order spread needs at least 2 orderings");
  std::array<double, kNumClasses> out;
  for (int c = 0; c < kNumClasses; ++c) {
    double lo = per_ordering[0][c], hi = per_ordering[0][c];
    for (const auto& row : per_ordering) {
      lo = std::min(lo, row[c]);
      hi = std::max(hi, row[c]);
    }
    out[c] = hi - lo;
  }
  return out;
}

}  // namespace framescope
