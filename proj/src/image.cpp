#include "framescope/image.hpp"

#include <algorithm>
#include <cctype>

namespace framescope {

bool ImageBuffer::valid() const {
  if (width < 0 || height < 0) return false;
  if (data.size() != static_cast<size_t>(width) * height * 3) return false;
  for (double v : data) {
    if (!(v >= 0.0 && v <= 1.0)) return false;
  }
  return true;
}

void ImageBuffer::clamp() {
  for (double& v : data) v = std::clamp(v, 0.0, 1.0);
}

namespace {
const std::string kClassNames[kNumClasses] = {"window_frame", "dent", "bend",
                                              "scratch"};

std::string lower(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}
}  // namespace

const std::string& class_name(ClassId id) {
  return kClassNames[static_cast<int>(id)];
}

ClassId class_from_name(const std::string& name) {
  const std::string n = lower(name);
  for (ClassId id : kAllClasses) {
    if (n == kClassNames[static_cast<int>(id)]) return id;
  }
  // accept a few aliases seen in annotation exports
  if (n == "windowframe" || n == "wframe" || n == "window frame")
    return ClassId::WindowFrame;
  throw Error(ErrorKind::UnknownCategory, "unknown category: " + name);
}

size_t BinaryPlane::count_set() const {
  size_t n = 0;
  for (uint8_t v : data) n += (v != 0);
  return n;
}

}  // namespace framescope
