#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "framescope/sweep.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace framescope {

namespace {
// JSON keys follow Table-style short names.
const char* kClassKeys[kNumClasses] = {"wframe", "dent", "bend", "scratch"};
}  // namespace

std::string report_to_json(const SweepReport& report) {
  json rows = json::array();
  for (const StrategyResult& r : report.rows) {
    json iou = json::object();
    for (int c = 0; c < kNumClasses; ++c)
      iou[kClassKeys[c]] = r.test_iou_defined[c] ? json(r.test_iou[c]) : json();
    json row = {{"strategy", r.strategy.label()},
                {"iou", iou},
                {"mean_iou", r.test_mean_iou},
                {"val_best", r.val_best_miou},
                {"loss", r.loss_at_best}};
    if (r.failed) {
      row["failed"] = true;
      row["error"] = r.error;
    }
    rows.push_back(row);
  }

  json doc = {
      {"config_digest", report.config_digest},
      {"mode", report.mode == SweepConfig::Mode::Subsets ? "subsets" : "permutations"},
      {"baseline", ""},
      {"rows", rows},
      {"notes", report.notes},
  };
  if (report.mode == SweepConfig::Mode::Subsets) {
    json deltas = json::object();
    for (int c = 0; c < kNumClasses; ++c) {
      json list = json::array();
      for (const auto& [label, delta] : report.deltas[c])
        list.push_back(json::array({label, delta}));
      deltas[kClassKeys[c]] = list;
    }
    doc["deltas"] = deltas;
  } else {
    json spreads = json::object();
    for (int c = 0; c < kNumClasses; ++c) spreads[kClassKeys[c]] = report.spreads[c];
    doc["spreads"] = spreads;
  }
  return doc.dump(2) + "\n";
}

SweepReport report_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, "invalid report JSON: " + std::string(e.what()));
  }
  SweepReport report;
  report.config_digest = doc.at("config_digest").get<std::string>();
  report.mode = doc.at("mode").get<std::string>() == "subsets"
                    ? SweepConfig::Mode::Subsets
                    : SweepConfig::Mode::Permutations;
  for (const auto& row : doc.at("rows")) {
    StrategyResult r;
    r.strategy = parse_strategy(row.at("strategy").get<std::string>());
    if (row.contains("failed") && row["failed"].get<bool>()) {
      r.failed = true;
      r.error = row.value("error", "");
    } else {
      r.test_mean_iou = row.at("mean_iou").get<double>();
      r.val_best_miou = row.at("val_best").get<double>();
      r.loss_at_best = row.at("loss").get<double>();
      const json& iou = row.at("iou");
      for (int c = 0; c < kNumClasses; ++c) {
        const json& v = iou.at(kClassKeys[c]);
        r.test_iou_defined[c] = !v.is_null();
        if (r.test_iou_defined[c]) r.test_iou[c] = v.get<double>();
      }
    }
    if (r.strategy.empty() && !r.failed)
      report.baseline_index = static_cast<int>(report.rows.size());
    report.rows.push_back(std::move(r));
  }
  if (doc.contains("notes"))
    report.notes = doc["notes"].get<std::vector<std::string>>();
  if (doc.contains("deltas")) {
    for (int c = 0; c < kNumClasses; ++c)
      for (const auto& pair : doc["deltas"].at(kClassKeys[c]))
        report.deltas[c].emplace_back(pair.at(0).get<std::string>(),
                                      pair.at(1).get<double>());
  }
  if (doc.contains("spreads"))
    for (int c = 0; c < kNumClasses; ++c)
      report.spreads[c] = doc["spreads"].at(kClassKeys[c]).get<double>();
  return report;
}

std::string report_to_csv(const SweepReport& report) {
  std::string out =
      "strategy,bend_iou,dent_iou,scratch_iou,wframe_iou,mean_iou,val_best,loss\n";
  char buf[64];
  const auto cell = [&](double v, bool defined) {
    if (!defined) return std::string();
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return std::string(buf);
  };
  for (const StrategyResult& r : report.rows) {
    const std::string label = r.strategy.empty() ? "(none)" : r.strategy.label();
    if (r.failed) {
      out += label + ",,,,,,,\n";
      continue;
    }
    out += label;
    for (ClassId cls : {ClassId::Bend, ClassId::Dent, ClassId::Scratch,
                        ClassId::WindowFrame}) {
      const int c = static_cast<int>(cls);
      out += "," + cell(r.test_iou[c], r.test_iou_defined[c]);
    }
    out += "," + cell(r.test_mean_iou, true);
    out += "," + cell(r.val_best_miou, true);
    out += "," + cell(r.loss_at_best, true);
    out += "\n";
  }
  return out;
}

void write_impact_charts(const SweepReport& report, const std::string& dir) {
  fs::create_directories(dir);
  for (int c = 0; c < kNumClasses; ++c) {
    const auto& deltas = report.deltas[c];
    const int bar_h = 18, gap = 6, left = 160, width = 640, scale_w = 380;
    const int height = 40 + static_cast<int>(deltas.size()) * (bar_h + gap);
    double max_abs = 1e-6;
    for (const auto& [label, d] : deltas) max_abs = std::max(max_abs, std::abs(d));

    std::string svg;
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" "
                  "height=\"%d\" font-family=\"sans-serif\" font-size=\"12\">\n",
                  width, height);
    svg += buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"10\" y=\"20\" font-size=\"14\">IoU delta vs. "
                  "baseline: %s</text>\n",
                  kClassKeys[c]);
    svg += buf;
    const int zero_x = left + scale_w / 2;
    int y = 36;
    for (const auto& [label, d] : deltas) {
      const int w = static_cast<int>(std::abs(d) / max_abs * (scale_w / 2.0));
      const int x = d >= 0 ? zero_x : zero_x - w;
      std::snprintf(buf, sizeof(buf),
                    "<text x=\"%d\" y=\"%d\" text-anchor=\"end\">%s</text>\n",
                    left - 8, y + bar_h - 5, label.empty() ? "(none)" : label.c_str());
      svg += buf;
      std::snprintf(buf, sizeof(buf),
                    "<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" "
                    "fill=\"%s\"/>\n",
                    x, y, std::max(w, 1), bar_h, d >= 0 ? "#3a7d44" : "#b3443a");
      svg += buf;
      std::snprintf(buf, sizeof(buf),
                    "<text x=\"%d\" y=\"%d\">%+.3f</text>\n", zero_x + scale_w / 2 + 8,
                    y + bar_h - 5, d);
      svg += buf;
      y += bar_h + gap;
    }
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%d\" y1=\"30\" x2=\"%d\" y2=\"%d\" "
                  "stroke=\"#444\"/>\n</svg>\n",
                  zero_x, zero_x, height - 10);
    svg += buf;

    const std::string path =
        (fs::path(dir) / ("impact_" + std::string(kClassKeys[c]) + ".svg")).string();
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + path);
    out << svg;
  }
}

}  // namespace framescope
