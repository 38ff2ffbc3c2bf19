#include "czd/io_formats.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string_view>
#include <tuple>

#include "json.hpp"

namespace czd {

namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError(IoError::Kind::kFile,
                  "cannot open " + path.string() + " for reading");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) {
    throw IoError(IoError::Kind::kFile, "read failed on " + path.string());
  }
  return std::move(buf).str();
}

// Shortest decimal form that parses back to the same double.
std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, end);
}

template <typename T>
T parse_number(std::string_view field, const char* what, long line) {
  T value{};
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw IoError(IoError::Kind::kParse,
                  std::string("bad ") + what + " value '" +
                      std::string(field) + "'",
                  line);
  }
  return value;
}

void store_u32_le(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

std::uint32_t load_u32_le(const char* p) {
  auto b = [p](int i) {
    return static_cast<std::uint32_t>(static_cast<unsigned char>(p[i]));
  };
  return b(0) | (b(1) << 8) | (b(2) << 16) | (b(3) << 24);
}

double require_number(const json& obj, const char* field) {
  if (!obj.contains(field)) {
    throw IoError(IoError::Kind::kSchema,
                  std::string("missing field '") + field + "'");
  }
  if (!obj[field].is_number()) {
    throw IoError(IoError::Kind::kSchema,
                  std::string("field '") + field + "' is not a number");
  }
  return obj[field].get<double>();
}

int require_integer(const json& obj, const char* field) {
  if (!obj.contains(field)) {
    throw IoError(IoError::Kind::kSchema,
                  std::string("missing field '") + field + "'");
  }
  if (!obj[field].is_number_integer()) {
    throw IoError(IoError::Kind::kSchema,
                  std::string("field '") + field + "' is not an integer");
  }
  return obj[field].get<int>();
}

json parse_json(const std::filesystem::path& path) {
  std::string text = read_file(path);
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) {
    throw IoError(IoError::Kind::kParse,
                  "invalid JSON in " + path.string());
  }
  return doc;
}

const json& require_array(const json& doc, const std::filesystem::path& path) {
  if (!doc.is_array()) {
    throw IoError(IoError::Kind::kSchema,
                  "expected a top-level array in " + path.string());
  }
  return doc;
}

}  // namespace

std::vector<AnnotationRecord> read_annotations(
    const std::filesystem::path& path) {
  std::string text = read_file(path);
  std::vector<AnnotationRecord> records;
  std::istringstream lines(text);
  std::string raw;
  long line_no = 0;
  while (std::getline(lines, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (raw.empty()) continue;
    std::string_view line(raw);
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      std::size_t comma = line.find(',', start);
      if (comma == std::string_view::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    if (fields.size() == 9 && fields.back().empty()) {
      fields.pop_back();  // tolerate one trailing comma
    }
    if (fields.size() != 8) {
      throw IoError(IoError::Kind::kParse,
                    "expected 8 comma-separated fields, got " +
                        std::to_string(fields.size()),
                    line_no);
    }
    AnnotationRecord rec;
    rec.left = parse_number<long>(fields[0], "left", line_no);
    rec.top = parse_number<long>(fields[1], "top", line_no);
    rec.width = parse_number<long>(fields[2], "width", line_no);
    rec.height = parse_number<long>(fields[3], "height", line_no);
    rec.score = parse_number<double>(fields[4], "score", line_no);
    rec.category = parse_number<int>(fields[5], "category", line_no);
    rec.truncation = parse_number<int>(fields[6], "truncation", line_no);
    rec.occlusion = parse_number<int>(fields[7], "occlusion", line_no);
    if (rec.width < 0 || rec.height < 0) {
      throw IoError(IoError::Kind::kBadValue,
                    "negative box size in annotation", line_no);
    }
    records.push_back(rec);
  }
  return records;
}

void write_annotations(const std::vector<AnnotationRecord>& records,
                       const std::filesystem::path& path) {
  std::string out;
  for (const AnnotationRecord& rec : records) {
    out += std::to_string(rec.left);
    out += ',';
    out += std::to_string(rec.top);
    out += ',';
    out += std::to_string(rec.width);
    out += ',';
    out += std::to_string(rec.height);
    out += ',';
    out += format_double(rec.score);
    out += ',';
    out += std::to_string(rec.category);
    out += ',';
    out += std::to_string(rec.truncation);
    out += ',';
    out += std::to_string(rec.occlusion);
    out += '\n';
  }
  atomic_write(path, out);
}

Box annotation_box(const AnnotationRecord& rec) {
  return Box{rec.left + rec.width / 2.0, rec.top + rec.height / 2.0,
             static_cast<double>(rec.width),
             static_cast<double>(rec.height)};
}

GroundTruth to_ground_truth(const AnnotationRecord& rec) {
  return GroundTruth{annotation_box(rec), rec.category,
                     rec.category == kIgnoreCategory};
}

AnnotationRecord from_ground_truth(const GroundTruth& gt) {
  AnnotationRecord rec;
  rec.left = std::lround(gt.box.left());
  rec.top = std::lround(gt.box.top());
  rec.width = std::lround(gt.box.w);
  rec.height = std::lround(gt.box.h);
  rec.score = 1.0;
  rec.category = gt.ignore ? kIgnoreCategory : gt.category;
  return rec;
}

AnnotationRecord from_detection(const Detection& det) {
  AnnotationRecord rec;
  rec.left = std::lround(det.box.left());
  rec.top = std::lround(det.box.top());
  rec.width = std::lround(det.box.w);
  rec.height = std::lround(det.box.h);
  rec.score = det.score;
  rec.category = det.category;
  return rec;
}

Heatmap read_heatmap(const std::filesystem::path& path) {
  std::string data = read_file(path);
  if (data.size() < 4) {
    throw IoError(IoError::Kind::kTruncated,
                  "file too short for magic in " + path.string());
  }
  if (std::memcmp(data.data(), "YHM1", 4) != 0) {
    throw IoError(IoError::Kind::kBadMagic,
                  "bad magic in " + path.string());
  }
  if (data.size() < 16) {
    throw IoError(IoError::Kind::kTruncated,
                  "file too short for header in " + path.string());
  }
  std::uint32_t channels = load_u32_le(data.data() + 4);
  std::uint32_t height = load_u32_le(data.data() + 8);
  std::uint32_t width = load_u32_le(data.data() + 12);
  if (channels == 0 || height == 0 || width == 0) {
    throw IoError(IoError::Kind::kBadDimensions,
                  "zero dimension in " + path.string());
  }
  constexpr std::uint64_t kMaxValues = 1ull << 28;  // 1 GiB of payload
  std::uint64_t values = static_cast<std::uint64_t>(channels) * height * width;
  if (values > kMaxValues) {
    throw IoError(IoError::Kind::kBadDimensions,
                  "dimensions overflow sanity bound in " + path.string());
  }
  std::uint64_t expected = 16 + values * 4;
  if (data.size() < expected) {
    throw IoError(IoError::Kind::kTruncated,
                  "payload shorter than header promises in " + path.string());
  }
  if (data.size() > expected) {
    throw IoError(IoError::Kind::kBadValue,
                  "trailing bytes after payload in " + path.string());
  }
  Heatmap hm(static_cast<int>(channels), static_cast<int>(height),
             static_cast<int>(width));
  std::span<float> dst = hm.values();
  const char* src = data.data() + 16;
  for (std::uint64_t i = 0; i < values; ++i) {
    dst[i] = std::bit_cast<float>(load_u32_le(src + i * 4));
  }
  return hm;
}

void write_heatmap(const Heatmap& hm, const std::filesystem::path& path) {
  if (hm.channels() <= 0 || hm.height() <= 0 || hm.width() <= 0) {
    throw IoError(IoError::Kind::kBadValue,
                  "refusing to write an empty heatmap");
  }
  std::string out;
  out.reserve(16 + hm.values().size() * 4);
  out += "YHM1";
  store_u32_le(out, static_cast<std::uint32_t>(hm.channels()));
  store_u32_le(out, static_cast<std::uint32_t>(hm.height()));
  store_u32_le(out, static_cast<std::uint32_t>(hm.width()));
  for (float v : hm.values()) {
    store_u32_le(out, std::bit_cast<std::uint32_t>(v));
  }
  atomic_write(path, out);
}

std::vector<DetectionEntry> read_detections_json(
    const std::filesystem::path& path) {
  const json doc = parse_json(path);
  require_array(doc, path);
  std::vector<DetectionEntry> entries;
  for (const json& item : doc) {
    if (!item.is_object()) {
      throw IoError(IoError::Kind::kSchema,
                    "detection entries must be objects");
    }
    DetectionEntry e;
    e.image_id = require_integer(item, "image_id");
    e.detection.category = require_integer(item, "category");
    e.detection.box.cx = require_number(item, "cx");
    e.detection.box.cy = require_number(item, "cy");
    e.detection.box.w = require_number(item, "w");
    e.detection.box.h = require_number(item, "h");
    e.detection.score = require_number(item, "score");
    if (e.detection.box.w < 0.0 || e.detection.box.h < 0.0) {
      throw IoError(IoError::Kind::kBadValue,
                    "field 'w'/'h' must be non-negative");
    }
    if (e.detection.score < 0.0 || e.detection.score > 1.0) {
      throw IoError(IoError::Kind::kBadValue,
                    "field 'score' must lie in [0, 1]");
    }
    entries.push_back(e);
  }
  return entries;
}

void write_detections_json(const std::vector<DetectionEntry>& entries,
                           const std::filesystem::path& path) {
  std::vector<DetectionEntry> sorted = entries;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const DetectionEntry& a, const DetectionEntry& b) {
                     if (a.image_id != b.image_id) {
                       return a.image_id < b.image_id;
                     }
                     if (a.detection.score != b.detection.score) {
                       return a.detection.score > b.detection.score;
                     }
                     const Box& x = a.detection.box;
                     const Box& y = b.detection.box;
                     return std::tie(a.detection.category, x.cx, x.cy, x.w,
                                     x.h) <
                            std::tie(b.detection.category, y.cx, y.cy, y.w,
                                     y.h);
                   });
  json doc = json::array();
  for (const DetectionEntry& e : sorted) {
    doc.push_back(json{{"image_id", e.image_id},
                       {"category", e.detection.category},
                       {"cx", e.detection.box.cx},
                       {"cy", e.detection.box.cy},
                       {"w", e.detection.box.w},
                       {"h", e.detection.box.h},
                       {"score", e.detection.score}});
  }
  atomic_write(path, doc.dump(2));
}

std::vector<ClusterRegion> read_regions_json(
    const std::filesystem::path& path) {
  const json doc = parse_json(path);
  require_array(doc, path);
  std::vector<ClusterRegion> regions;
  for (const json& item : doc) {
    if (!item.is_object()) {
      throw IoError(IoError::Kind::kSchema, "region entries must be objects");
    }
    ClusterRegion r;
    r.rect.left = require_number(item, "left");
    r.rect.top = require_number(item, "top");
    r.rect.width = require_number(item, "width");
    r.rect.height = require_number(item, "height");
    r.density = require_number(item, "density");
    if (r.rect.width < 0.0 || r.rect.height < 0.0) {
      throw IoError(IoError::Kind::kBadValue,
                    "field 'width'/'height' must be non-negative");
    }
    if (r.density < 0.0) {
      throw IoError(IoError::Kind::kBadValue,
                    "field 'density' must be non-negative");
    }
    regions.push_back(r);
  }
  return regions;
}

void write_regions_json(const std::vector<ClusterRegion>& regions,
                        const std::filesystem::path& path) {
  std::vector<ClusterRegion> sorted = regions;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const ClusterRegion& a, const ClusterRegion& b) {
                     double aa = a.rect.area(), ba = b.rect.area();
                     if (aa != ba) return aa > ba;
                     if (a.density != b.density) return a.density > b.density;
                     return std::tie(a.rect.left, a.rect.top) <
                            std::tie(b.rect.left, b.rect.top);
                   });
  json doc = json::array();
  for (const ClusterRegion& r : sorted) {
    doc.push_back(json{{"left", r.rect.left},
                       {"top", r.rect.top},
                       {"width", r.rect.width},
                       {"height", r.rect.height},
                       {"density", r.density}});
  }
  atomic_write(path, doc.dump(2));
}

void atomic_write(const std::filesystem::path& path,
                  const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IoError(IoError::Kind::kFile,
                    "cannot open " + tmp.string() + " for writing");
    }
    out.write(content.data(),
              static_cast<std::streamsize>(content.size()));
    if (!out) {
      throw IoError(IoError::Kind::kFile, "write failed on " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw IoError(IoError::Kind::kFile,
                  "cannot move " + tmp.string() + " into place: " +
                      ec.message());
  }
}

}  // namespace czd
