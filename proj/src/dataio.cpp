#include "framescope/dataio.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

#include <json.hpp>

#include "framescope/png_io.hpp"
#include "framescope/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace framescope {

namespace {

bool point_in_polygon(double px, double py, const Polygon& poly) {
  bool inside = false;
  const size_t n = poly.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2& a = poly[i];
    const Point2& b = poly[j];
    if ((a.y > py) != (b.y > py)) {
      const double x_int = a.x + (py - a.y) / (b.y - a.y) * (b.x - a.x);
      if (px < x_int) inside = !inside;
    }
  }
  return inside;
}

void fill_polygon(BinaryPlane& plane, const Polygon& poly) {
  if (poly.size() < 3)
    throw Error(ErrorKind::DegeneratePolygon,
                "polygon needs at least 3 vertices");
  double min_x = poly[0].x, max_x = poly[0].x;
  double min_y = poly[0].y, max_y = poly[0].y;
  for (const Point2& p : poly) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  const int x0 = std::max(0, static_cast<int>(std::floor(min_x - 0.5)));
  const int x1 = std::min(plane.width - 1, static_cast<int>(std::ceil(max_x)));
  const int y0 = std::max(0, static_cast<int>(std::floor(min_y - 0.5)));
  const int y1 = std::min(plane.height - 1, static_cast<int>(std::ceil(max_y)));
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x)
      if (point_in_polygon(x + 0.5, y + 0.5, poly)) plane.at(x, y) = 1;
}

}  // namespace

BinaryPlane rasterize(const std::vector<Polygon>& polygons, int side) {
  BinaryPlane plane(side, side);
  for (const Polygon& poly : polygons) fill_polygon(plane, poly);
  return plane;
}

void resolve_mask_priority(MaskSet& masks) {
  // Scratch > Dent > Bend > WindowFrame
  static constexpr ClassId kOrder[] = {ClassId::Scratch, ClassId::Dent,
                                       ClassId::Bend, ClassId::WindowFrame};
  for (int hi = 0; hi < 3; ++hi) {
    const BinaryPlane& high = masks.plane(kOrder[hi]);
    for (int lo = hi + 1; lo < 4; ++lo) {
      BinaryPlane& low = masks.plane(kOrder[lo]);
      for (size_t i = 0; i < low.data.size(); ++i)
        if (high.data[i]) low.data[i] = 0;
    }
  }
}

Dataset load_coco(const std::string& annotation_file, const std::string& image_dir) {
  std::ifstream in(annotation_file);
  if (!in)
    throw Error(ErrorKind::IoError, "cannot open " + annotation_file);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError,
                "invalid annotation JSON: " + std::string(e.what()));
  }
  if (!doc.contains("images") || !doc.contains("annotations") ||
      !doc.contains("categories"))
    throw Error(ErrorKind::ParseError,
                "annotation file lacks images/annotations/categories");

  std::map<int64_t, ClassId> categories;
  for (const auto& cat : doc["categories"]) {
    categories[cat.at("id").get<int64_t>()] =
        class_from_name(cat.at("name").get<std::string>());
  }

  Dataset dataset;
  std::map<int64_t, size_t> index_by_image;
  for (const auto& img : doc["images"]) {
    DatasetEntry entry;
    const std::string file_name = img.at("file_name").get<std::string>();
    const fs::path path = fs::path(image_dir) / file_name;
    if (!fs::exists(path))
      throw Error(ErrorKind::MissingImageFile, "missing image file " + path.string());
    entry.image = read_png_rgb(path.string());
    entry.id = fs::path(file_name).stem().string();
    entry.masks = MaskSet(entry.image.width, entry.image.height);
    index_by_image[img.at("id").get<int64_t>()] = dataset.entries.size();
    dataset.entries.push_back(std::move(entry));
  }

  for (const auto& ann : doc["annotations"]) {
    const auto it = index_by_image.find(ann.at("image_id").get<int64_t>());
    if (it == index_by_image.end())
      throw Error(ErrorKind::ParseError, "annotation references unknown image");
    DatasetEntry& entry = dataset.entries[it->second];
    const auto cat = categories.find(ann.at("category_id").get<int64_t>());
    if (cat == categories.end())
      throw Error(ErrorKind::UnknownCategory,
                  "annotation references unknown category id");
    const ClassId cls = cat->second;
    const json& seg = ann.at("segmentation");
    if (!seg.is_array())
      throw Error(ErrorKind::ParseError,
                  "only polygon segmentation is supported (RLE rejected)");
    for (const auto& flat : seg) {
      if (!flat.is_array() || flat.size() < 6 || flat.size() % 2 != 0)
        throw Error(ErrorKind::DegeneratePolygon,
                    "segmentation polygon needs >= 3 (x, y) pairs");
      Polygon poly;
      for (size_t i = 0; i < flat.size(); i += 2)
        poly.push_back({flat[i].get<double>(), flat[i + 1].get<double>()});
      fill_polygon(entry.masks.plane(cls), poly);
      entry.annotations.emplace_back(cls, std::move(poly));
    }
  }
  for (DatasetEntry& entry : dataset.entries) resolve_mask_priority(entry.masks);
  return dataset;
}

SplitResult split(const Dataset& dataset, int train_count, int val_count,
                  int test_count, uint64_t seed) {
  const int total = train_count + val_count + test_count;
  if (total > static_cast<int>(dataset.entries.size()))
    throw Error(ErrorKind::InsufficientData,
                "split wants " + std::to_string(total) + " items, dataset has " +
                    std::to_string(dataset.entries.size()));
  std::vector<size_t> order(dataset.entries.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(Rng::derive(seed, 0x5517));
  for (size_t i = order.size() - 1; i > 0; --i) {
    const size_t j = rng.below(i + 1);
    std::swap(order[i], order[j]);
  }
  SplitResult out;
  int pos = 0;
  for (int i = 0; i < train_count; ++i) out.train.entries.push_back(dataset.entries[order[pos++]]);
  for (int i = 0; i < val_count; ++i) out.val.entries.push_back(dataset.entries[order[pos++]]);
  for (int i = 0; i < test_count; ++i) out.test.entries.push_back(dataset.entries[order[pos++]]);
  return out;
}

void SynthSpec::validate() const {
  if (side < 32) throw Error(ErrorKind::ConfigInvalid, "side must be >= 32");
  if (count < 0) throw Error(ErrorKind::ConfigInvalid, "count must be >= 0");
  const double rates[] = {scratch_rate, dent_rate, bend_rate,
                          illumination_amplitude, shadow_probability};
  for (double r : rates)
    if (r < 0.0 || r > 1.0)
      throw Error(ErrorKind::ConfigInvalid, "rates must lie in [0,1]");
  if (!(shadow_darkening_min >= 0.4 && shadow_darkening_max <= 0.7 &&
        shadow_darkening_min <= shadow_darkening_max))
    throw Error(ErrorKind::ConfigInvalid,
                "shadow darkening range must lie within [0.4, 0.7]");
  if (!(color_cast_min > 0 && color_cast_min <= color_cast_max))
    throw Error(ErrorKind::ConfigInvalid, "bad color cast range");
  if (noise_sigma < 0) throw Error(ErrorKind::ConfigInvalid, "noise_sigma < 0");
  if (!(contrast > 0.0 && contrast <= 1.0))
    throw Error(ErrorKind::ConfigInvalid, "contrast must be in (0,1]");
}

namespace {

Polygon rect_poly(double x0, double y0, double x1, double y1) {
  return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
}

// Strip of the given half-thickness around segment (a, b).
Polygon strip_poly(Point2 a, Point2 b, double half) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len = std::max(1e-9, std::hypot(dx, dy));
  const double nx = -dy / len * half, ny = dx / len * half;
  return {{a.x + nx, a.y + ny},
          {b.x + nx, b.y + ny},
          {b.x - nx, b.y - ny},
          {a.x - nx, a.y - ny}};
}

Polygon ellipse_poly(double cx, double cy, double rx, double ry, int segments = 20) {
  Polygon out;
  for (int i = 0; i < segments; ++i) {
    const double t = 2.0 * 3.14159265358979323846 * i / segments;
    out.push_back({cx + rx * std::cos(t), cy + ry * std::sin(t)});
  }
  return out;
}

}  // namespace

Dataset generate_synthetic(const SynthSpec& spec) {
  spec.validate();
  Dataset dataset;
  const int s = spec.side;

  for (int index = 0; index < spec.count; ++index) {
    Rng rng(Rng::derive(spec.seed, static_cast<uint64_t>(index)));
    DatasetEntry entry;
    char idbuf[32];
    std::snprintf(idbuf, sizeof(idbuf), "synth_%04d", index);
    entry.id = idbuf;

    const double bg = rng.uniform(0.40, 0.50);
    const double fr = rng.uniform(0.62, 0.72);
    ImageBuffer img(s, s, bg);

    // frame band: four strips forming a rectangular ring
    const double margin = 0.14 * s + rng.uniform(-0.02, 0.02) * s;
    const double band = 0.10 * s;
    const double o0 = margin, o1 = s - margin;
    std::vector<Polygon> frame_polys = {
        rect_poly(o0, o0, o1, o0 + band),       // top
        rect_poly(o0, o1 - band, o1, o1),       // bottom
        rect_poly(o0, o0 + band, o0 + band, o1 - band),  // left
        rect_poly(o1 - band, o0 + band, o1, o1 - band),  // right
    };
    BinaryPlane frame_mask = rasterize(frame_polys, s);
    for (int y = 0; y < s; ++y)
      for (int x = 0; x < s; ++x)
        if (frame_mask.at(x, y))
          for (int c = 0; c < 3; ++c) img.at(x, y, c) = fr;
    for (const Polygon& p : frame_polys)
      entry.annotations.emplace_back(ClassId::WindowFrame, p);

    MaskSet masks(s, s);
    masks.plane(ClassId::WindowFrame) = frame_mask;

    // bend: sheared parallelogram band with a brightness ridge
    if (rng.uniform() < spec.bend_rate) {
      const double cx = rng.uniform(0.3, 0.7) * s;
      const double shear = rng.uniform(-0.3, 0.3) * s;
      const double half = rng.uniform(0.03, 0.05) * s;
      const Polygon quad = {{cx - half, 0.0},
                            {cx + half, 0.0},
                            {cx + shear + half, static_cast<double>(s)},
                            {cx + shear - half, static_cast<double>(s)}};
      BinaryPlane bend_mask(s, s);
      fill_polygon(bend_mask, quad);
      const double amp = rng.uniform(0.10, 0.18) * (rng.uniform() < 0.5 ? -1 : 1);
      for (int y = 0; y < s; ++y) {
        const double center = cx + shear * y / s;
        for (int x = 0; x < s; ++x)
          if (bend_mask.at(x, y)) {
            const double t = std::min(1.0, std::abs(x + 0.5 - center) / half);
            const double delta = amp * (0.35 + 0.65 * (1.0 - t));
            for (int c = 0; c < 3; ++c) img.at(x, y, c) += delta;
          }
      }
      for (size_t i = 0; i < bend_mask.data.size(); ++i)
        masks.plane(ClassId::Bend).data[i] |= bend_mask.data[i];
      entry.annotations.emplace_back(ClassId::Bend, quad);
    }

    // dent: elliptical radial-gradient darkening on the frame band
    if (rng.uniform() < spec.dent_rate) {
      const bool on_top = rng.uniform() < 0.5;
      const double cy = on_top ? o0 + band / 2 : o1 - band / 2;
      const double cx = rng.uniform(o0 + band, o1 - band);
      const double rx = rng.uniform(0.05, 0.09) * s;
      const double ry = rng.uniform(0.03, 0.06) * s;
      const Polygon poly = ellipse_poly(cx, cy, rx, ry);
      BinaryPlane dent_mask(s, s);
      fill_polygon(dent_mask, poly);
      const double depth = rng.uniform(0.18, 0.30);
      for (int y = 0; y < s; ++y)
        for (int x = 0; x < s; ++x)
          if (dent_mask.at(x, y)) {
            const double ex = (x + 0.5 - cx) / rx;
            const double ey = (y + 0.5 - cy) / ry;
            const double t = std::min(1.0, ex * ex + ey * ey);
            const double factor = 1.0 - depth * std::max(0.15, 1.0 - t);
            for (int c = 0; c < 3; ++c) img.at(x, y, c) *= factor;
          }
      for (size_t i = 0; i < dent_mask.data.size(); ++i)
        masks.plane(ClassId::Dent).data[i] |= dent_mask.data[i];
      entry.annotations.emplace_back(ClassId::Dent, poly);
    }

    // scratches: thin polyline strips, the faintest defect
    if (rng.uniform() < spec.scratch_rate) {
      BinaryPlane scratch_mask(s, s);
      std::vector<Polygon> strips;
      for (int attempt = 0; attempt < 8 && scratch_mask.empty_plane(); ++attempt) {
        strips.clear();
        std::fill(scratch_mask.data.begin(), scratch_mask.data.end(), 0);
        const int segments = 1 + static_cast<int>(rng.below(2));
        Point2 p{rng.uniform(0.15, 0.85) * s, rng.uniform(0.15, 0.85) * s};
        double angle = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
        const double half = 0.8 + 0.3 * attempt;  // widen if centers were missed
        for (int seg = 0; seg < segments; ++seg) {
          const double len = rng.uniform(0.15, 0.35) * s;
          Point2 q{std::clamp(p.x + len * std::cos(angle), 1.0, s - 1.0),
                   std::clamp(p.y + len * std::sin(angle), 1.0, s - 1.0)};
          const Polygon strip = strip_poly(p, q, half);
          fill_polygon(scratch_mask, strip);
          strips.push_back(strip);
          p = q;
          angle += rng.uniform(-0.5, 0.5);
        }
      }
      const double delta = rng.uniform(0.07, 0.14) * (rng.uniform() < 0.5 ? -1 : 1);
      for (int y = 0; y < s; ++y)
        for (int x = 0; x < s; ++x)
          if (scratch_mask.at(x, y))
            for (int c = 0; c < 3; ++c) img.at(x, y, c) += delta;
      for (size_t i = 0; i < scratch_mask.data.size(); ++i)
        masks.plane(ClassId::Scratch).data[i] |= scratch_mask.data[i];
      for (const Polygon& strip : strips)
        entry.annotations.emplace_back(ClassId::Scratch, strip);
    }

    // nuisance lighting
    const double theta = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
    const double gx = std::cos(theta), gy = std::sin(theta);
    const double amp = spec.illumination_amplitude;
    for (int y = 0; y < s; ++y)
      for (int x = 0; x < s; ++x) {
        const double u = (2.0 * x / (s - 1) - 1.0) * gx + (2.0 * y / (s - 1) - 1.0) * gy;
        const double gain = 1.0 + amp * u / 2.0;
        for (int c = 0; c < 3; ++c) img.at(x, y, c) *= gain;
      }

    if (rng.uniform() < spec.shadow_probability) {
      const double factor =
          rng.uniform(spec.shadow_darkening_min, spec.shadow_darkening_max);
      Polygon shadow;
      const double scx = rng.uniform(0.2, 0.8) * s;
      const double scy = rng.uniform(0.2, 0.8) * s;
      const int verts = 5;
      for (int i = 0; i < verts; ++i) {
        const double a = 2.0 * 3.14159265358979323846 * i / verts + rng.uniform(-0.3, 0.3);
        const double r = rng.uniform(0.25, 0.55) * s;
        shadow.push_back({scx + r * std::cos(a), scy + r * std::sin(a)});
      }
      BinaryPlane shadow_mask(s, s);
      fill_polygon(shadow_mask, shadow);
      for (int y = 0; y < s; ++y)
        for (int x = 0; x < s; ++x)
          if (shadow_mask.at(x, y))
            for (int c = 0; c < 3; ++c) img.at(x, y, c) *= factor;
    }

    double cast[3];
    for (double& g : cast) g = rng.uniform(spec.color_cast_min, spec.color_cast_max);
    for (int y = 0; y < s; ++y)
      for (int x = 0; x < s; ++x)
        for (int c = 0; c < 3; ++c) img.at(x, y, c) *= cast[c];

    if (spec.contrast < 1.0)
      for (double& v : img.data) v = 0.5 + spec.contrast * (v - 0.5);

    if (spec.noise_sigma > 0)
      for (double& v : img.data) v += spec.noise_sigma * rng.gaussian();

    img.clamp();
    resolve_mask_priority(masks);
    entry.image = std::move(img);
    entry.masks = std::move(masks);
    dataset.entries.push_back(std::move(entry));
  }
  return dataset;
}

void write_dataset(const Dataset& dataset, const std::string& dir) {
  const fs::path root(dir);
  fs::create_directories(root / "images");
  for (ClassId cls : kAllClasses)
    fs::create_directories(root / "masks" / class_name(cls));

  json images = json::array();
  json annotations = json::array();
  json categories = json::array();
  for (ClassId cls : kAllClasses)
    categories.push_back({{"id", static_cast<int>(cls) + 1},
                          {"name", class_name(cls)}});

  int64_t ann_id = 1;
  for (size_t i = 0; i < dataset.entries.size(); ++i) {
    const DatasetEntry& entry = dataset.entries[i];
    const std::string file_name = entry.id + ".png";
    write_png_rgb((root / "images" / file_name).string(), entry.image);
    for (ClassId cls : kAllClasses)
      write_png_mask((root / "masks" / class_name(cls) / file_name).string(),
                     entry.masks.plane(cls));
    images.push_back({{"id", static_cast<int64_t>(i) + 1},
                      {"file_name", file_name},
                      {"width", entry.image.width},
                      {"height", entry.image.height}});
    for (const auto& [cls, poly] : entry.annotations) {
      json flat = json::array();
      for (const Point2& p : poly) {
        flat.push_back(p.x);
        flat.push_back(p.y);
      }
      annotations.push_back({{"id", ann_id++},
                             {"image_id", static_cast<int64_t>(i) + 1},
                             {"category_id", static_cast<int>(cls) + 1},
                             {"segmentation", json::array({flat})}});
    }
  }
  json doc = {{"images", images},
              {"annotations", annotations},
              {"categories", categories}};
  std::ofstream out(root / "annotations.json");
  if (!out) throw Error(ErrorKind::IoError, "cannot write annotations.json");
  out << doc.dump(2) << "\n";
}

}  // namespace framescope
