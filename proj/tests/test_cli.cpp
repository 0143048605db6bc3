#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "framescope/cli.hpp"
#include "framescope/dataio.hpp"
#include "framescope/png_io.hpp"
#include "framescope/rng.hpp"
#include "framescope/strategy.hpp"
#include "framescope/sweep.hpp"

using namespace framescope;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("parse_strategy: examples") {
  CHECK(parse_strategy("SR+CN+IN+CE").label() == "SR+CN+IN+CE");
  CHECK(parse_strategy("").empty());
  CHECK(parse_strategy("ce").label() == "CE");
  CHECK(parse_strategy(" SR + CE ").label() == "SR+CE");
  CHECK(parse_strategy("CE+SR").label() == "CE+SR");  // order kept

  try {
    parse_strategy("SR+XX");
    FAIL("expected UnknownStage");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnknownStage);
  }
  CHECK_THROWS_AS(parse_strategy("SR+SR"), Error);
}

TEST_CASE("parse_strategy round-trips every label") {
  const std::vector<Strategy> all = enumerate_subsets(
      {StageId::SR, StageId::CN, StageId::IN, StageId::CE});
  for (const Strategy& s : all) {
    const Strategy back = parse_strategy(s.label());
    CHECK(back.stages == s.stages);
    CHECK(back.label() == s.label());
  }
}

TEST_CASE("dispatch: help and bad invocations") {
  CHECK(dispatch({"--help"}) == 0);
  CHECK(dispatch({"no-such-command"}) == 2);
  CHECK(dispatch({}) == 2);
  CHECK(dispatch({"rectify"}) == 2);  // missing required flags
}

TEST_CASE("dispatch: synth writes a loadable dataset") {
  const fs::path dir = scratch_dir("fs_cli_synth");
  const int rc = dispatch({"synth", "--out", (dir / "data").string(), "--count",
                           "4", "--side", "48", "--seed", "9"});
  CHECK(rc == 0);
  const Dataset ds = load_coco((dir / "data" / "annotations.json").string(),
                               (dir / "data" / "images").string());
  CHECK(ds.entries.size() == 4);
  CHECK(ds.entries[0].image.width == 48);
  fs::remove_all(dir);
}

TEST_CASE("dispatch: preprocess transforms one image") {
  const fs::path dir = scratch_dir("fs_cli_pre");
  Rng rng(15);
  ImageBuffer img(32, 32);
  for (double& v : img.data) v = rng.uniform(0.2, 0.6);
  write_png_rgb((dir / "in.png").string(), img);

  const int rc = dispatch({"preprocess", "--in", (dir / "in.png").string(),
                           "--out", (dir / "out.png").string(), "--strategy",
                           "CE"});
  CHECK(rc == 0);
  const ImageBuffer out = read_png_rgb((dir / "out.png").string());
  CHECK(out.width == 32);
  // equalization must spread the narrow input range
  double lo = 1.0, hi = 0.0;
  for (double v : out.data) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(hi - lo > 0.8);
  fs::remove_all(dir);
}

TEST_CASE("dispatch: rectify via sidecar") {
  const fs::path dir = scratch_dir("fs_cli_rect");
  Rng rng(16);
  ImageBuffer img(40, 40);
  for (double& v : img.data) v = rng.uniform();
  write_png_rgb((dir / "in.png").string(), img);
  write_text(dir / "quad.json", R"({
    "src": [[4, 5], [35, 6], [34, 34], [5, 33]],
    "dst_width": 24, "dst_height": 24
  })");

  const int rc = dispatch({"rectify", "--in", (dir / "in.png").string(),
                           "--sidecar", (dir / "quad.json").string(), "--out",
                           (dir / "out.png").string()});
  CHECK(rc == 0);
  const ImageBuffer out = read_png_rgb((dir / "out.png").string());
  CHECK(out.width == 24);
  CHECK(out.height == 24);
  fs::remove_all(dir);
}

TEST_CASE("dispatch: train then eval") {
  const fs::path dir = scratch_dir("fs_cli_train");
  REQUIRE(dispatch({"synth", "--out", (dir / "data").string(), "--count", "8",
                    "--side", "32", "--seed", "21"}) == 0);
  const int rc = dispatch({"train", "--data", (dir / "data").string(), "--out",
                           (dir / "model.bin").string(), "--side", "32",
                           "--base", "2", "--depth", "1", "--steps", "3",
                           "--batch", "2", "--train", "5", "--val", "2",
                           "--test", "1", "--seed", "21"});
  CHECK(rc == 0);
  CHECK(fs::exists(dir / "model.bin"));

  const int rc2 = dispatch({"eval", "--data", (dir / "data").string(),
                            "--model", (dir / "model.bin").string(), "--out",
                            (dir / "eval.json").string()});
  CHECK(rc2 == 0);
  const std::string eval_text = read_text(dir / "eval.json");
  CHECK(eval_text.find("mean_iou") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("dispatch: sweep from a config file writes the full report") {
  const fs::path dir = scratch_dir("fs_cli_sweep");
  REQUIRE(dispatch({"synth", "--out", (dir / "data").string(), "--count", "8",
                    "--side", "32", "--seed", "31"}) == 0);
  write_text(dir / "sweep.json", R"({
    "data": ")" + (dir / "data").string() + R"(",
    "out": ")" + (dir / "report").string() + R"(",
    "side": 32, "base": 2, "depth": 1,
    "steps": 2, "batch": 2,
    "train": 5, "val": 2, "test": 1,
    "seed": 31, "jobs": 2
  })");

  const int rc = dispatch({"sweep", "--config", (dir / "sweep.json").string()});
  CHECK(rc == 0);
  CHECK(fs::exists(dir / "report" / "report.json"));
  CHECK(fs::exists(dir / "report" / "report.csv"));
  CHECK(fs::exists(dir / "report" / "impact_bend.svg"));

  const std::string json_text = read_text(dir / "report" / "report.json");
  const SweepReport report = report_from_json(json_text);
  CHECK(report.rows.size() == 16);

  // flags override config values
  const int rc2 = dispatch({"sweep", "--config", (dir / "sweep.json").string(),
                            "--out", (dir / "report2").string()});
  CHECK(rc2 == 0);
  CHECK(read_text(dir / "report2" / "report.json") == json_text);
  fs::remove_all(dir);
}

TEST_CASE("dispatch: sweep without data or out is a usage error") {
  CHECK(dispatch({"sweep"}) == 2);
}

TEST_CASE("dispatch: report regenerates CSV and charts from JSON") {
  const fs::path dir = scratch_dir("fs_cli_report");
  SweepReport r;
  r.mode = SweepConfig::Mode::Subsets;
  r.baseline_index = 0;
  StrategyResult base;
  base.strategy = validate_strategy({});
  base.test_iou = {0.8, 0.7, 0.6, 0.5};
  base.test_iou_defined = {true, true, true, true};
  base.test_mean_iou = 0.65;
  StrategyResult ce;
  ce.strategy = validate_strategy({StageId::CE});
  ce.test_iou = {0.82, 0.75, 0.7, 0.55};
  ce.test_iou_defined = {true, true, true, true};
  ce.test_mean_iou = 0.705;
  r.rows = {base, ce};
  impact_table(r);
  write_text(dir / "report.json", report_to_json(r));

  const int rc = dispatch({"report", "--in", (dir / "report.json").string(),
                           "--out", (dir / "out").string()});
  CHECK(rc == 0);
  CHECK(fs::exists(dir / "out" / "report.csv"));
  CHECK(fs::exists(dir / "out" / "impact_scratch.svg"));
  fs::remove_all(dir);
}

TEST_CASE("dispatch: bad config file is reported") {
  const fs::path dir = scratch_dir("fs_cli_badcfg");
  write_text(dir / "bad.json", "{ not json");
  CHECK(dispatch({"sweep", "--config", (dir / "bad.json").string()}) == 1);
  CHECK(dispatch({"sweep", "--config", (dir / "missing.json").string()}) == 1);
  fs::remove_all(dir);
}
