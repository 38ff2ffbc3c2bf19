#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "czd/detection.hpp"
#include "czd/heatmap.hpp"
#include "czd/lsm.hpp"

namespace czd {

/// Every reader/writer failure is one of these, never a crash.
class IoError : public std::runtime_error {
 public:
  enum class Kind {
    kFile,           // missing/unopenable/unwritable path
    kParse,          // malformed text (carries a line number when known)
    kSchema,         // JSON missing or mistyping a required field
    kBadMagic,       // binary container does not start with the magic
    kTruncated,      // binary container shorter than its header promises
    kBadDimensions,  // zero or overflow-sized binary dimensions
    kBadValue,       // structurally fine but semantically invalid value
  };

  IoError(Kind kind, const std::string& message, long line = -1)
      : std::runtime_error(line >= 0 ? message + " (line " +
                                           std::to_string(line) + ")"
                                     : message),
        kind_(kind),
        line_(line) {}

  Kind kind() const { return kind_; }
  long line() const { return line_; }  // -1 when not line-addressed

 private:
  Kind kind_;
  long line_;
};

/// One comma-separated annotation row: top-left box in integer pixels plus
/// the dataset's score/category/truncation/occlusion columns.
struct AnnotationRecord {
  long left = 0;
  long top = 0;
  long width = 0;
  long height = 0;
  double score = 0.0;
  int category = 0;
  int truncation = 0;
  int occlusion = 0;

  friend bool operator==(const AnnotationRecord&,
                         const AnnotationRecord&) = default;
};

/// Category label marking an ignore region rather than an object.
inline constexpr int kIgnoreCategory = 0;

/// A detection tagged with the image it belongs to, for multi-image files.
struct DetectionEntry {
  int image_id = 0;
  Detection detection;

  friend bool operator==(const DetectionEntry&,
                         const DetectionEntry&) = default;
};

// --- annotation text files (one record per line, no header) ---
std::vector<AnnotationRecord> read_annotations(
    const std::filesystem::path& path);
void write_annotations(const std::vector<AnnotationRecord>& records,
                       const std::filesystem::path& path);

// Top-left integer storage <-> center-form boxes. The ignore-region
// category maps to an ignored ground truth.
Box annotation_box(const AnnotationRecord& rec);
GroundTruth to_ground_truth(const AnnotationRecord& rec);
AnnotationRecord from_ground_truth(const GroundTruth& gt);
AnnotationRecord from_detection(const Detection& det);

// --- binary heatmap container ---
// Layout: 4-byte magic "YHM1"; channels, height, width as little-endian
// uint32; then channels·height·width little-endian float32 values,
// row-major within each channel.
Heatmap read_heatmap(const std::filesystem::path& path);
void write_heatmap(const Heatmap& hm, const std::filesystem::path& path);

// --- JSON files ---
std::vector<DetectionEntry> read_detections_json(
    const std::filesystem::path& path);
void write_detections_json(const std::vector<DetectionEntry>& entries,
                           const std::filesystem::path& path);
std::vector<ClusterRegion> read_regions_json(
    const std::filesystem::path& path);
void write_regions_json(const std::vector<ClusterRegion>& regions,
                        const std::filesystem::path& path);

/// Write `content` to `path` via a temp file + rename so readers never see
/// a half-written file.
void atomic_write(const std::filesystem::path& path,
                  const std::string& content);

}  // namespace czd
