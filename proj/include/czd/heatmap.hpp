#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "czd/detection.hpp"
#include "czd/geometry.hpp"

namespace czd {

/// Per-category score raster at input-image resolution (stride 1).
/// Values live in [0, 1], stored row-major within each channel.
class Heatmap {
 public:
  Heatmap() = default;
  Heatmap(int channels, int height, int width);

  int channels() const { return channels_; }
  int height() const { return height_; }
  int width() const { return width_; }

  std::size_t index(int c, int y, int x) const {
    return (static_cast<std::size_t>(c) * height_ + y) * width_ + x;
  }

  float at(int c, int y, int x) const { return values_[index(c, y, x)]; }
  float& at(int c, int y, int x) { return values_[index(c, y, x)]; }

  std::span<const float> values() const { return values_; }
  std::span<float> values() { return values_; }

  bool same_shape(const Heatmap& other) const {
    return channels_ == other.channels_ && height_ == other.height_ &&
           width_ == other.width_;
  }

 private:
  int channels_ = 0;
  int height_ = 0;
  int width_ = 0;
  std::vector<float> values_;
};

/// A local maximum of one heatmap channel.
struct Peak {
  int channel = 0;
  int x = 0;
  int y = 0;
  float score = 0.0f;

  friend bool operator==(const Peak&, const Peak&) = default;
};

/// Boolean occupancy grid matching a heatmap's spatial size.
struct BinaryMask {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> bits;

  BinaryMask() = default;
  BinaryMask(int h, int w)
      : height(h), width(w), bits(static_cast<std::size_t>(h) * w, 0) {}

  bool at(int y, int x) const {
    return bits[static_cast<std::size_t>(y) * width + x] != 0;
  }
  void set(int y, int x, bool v) {
    bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0;
  }
  int count() const;
};

struct Annotation {
  Box box;
  int category = 0;
};

/// Blob width used when splatting an object: max(1, min(w, h) / 6) keeps
/// even tiny objects at least one pixel wide at stride-1 resolution.
double blob_sigma(const Box& box);

/// Scores below this floor never become peaks.
inline constexpr float kPeakFloor = 1e-6f;

/// Splat one Gaussian blob per annotation into its category channel,
/// peaking at exactly 1.0 at the integer center pixel. Overlapping blobs
/// combine by elementwise max. Centers are clamped into the grid.
Heatmap encode(std::span<const Annotation> annotations, int channels,
               int height, int width);

/// Per-channel 2-D Gaussian smoothing with a truncated normalized kernel
/// and replicated edges. sigma = 0 is the identity.
Heatmap gaussian_filter(const Heatmap& hm, double sigma);

/// Local-maximum decoding: after optional smoothing, a pixel is a peak iff
/// its value is >= all in-bounds 8-neighbors. Equal-valued plateaus keep
/// only their lexicographically first (channel, y, x) pixel. Returns at most
/// top_n peaks, score-descending with (channel, y, x) tie-break.
std::vector<Peak> decode(const Heatmap& hm, int top_n,
                         double smooth_sigma = 1.0);

/// Supplies (w, h) for a peak; nullopt means the peak has no known size.
using SizeLookup =
    std::function<std::optional<std::array<double, 2>>(const Peak&)>;

/// Turn peaks into detections using externally supplied sizes.
/// Throws std::runtime_error when the lookup has no size for a peak.
std::vector<Detection> peaks_to_detections(std::span<const Peak> peaks,
                                           const SizeLookup& size_lookup);

/// A mask bit is set iff the max over channels at that pixel is >= threshold.
BinaryMask binarize(const Heatmap& hm, double threshold);

/// Penalty-reduced pixelwise focal loss (alpha = 2, beta = 4), normalized by
/// the number of ground-truth peak pixels (at least 1). Predictions are
/// clamped away from {0, 1} by 1e-6.
double focal_loss(const Heatmap& pred, const Heatmap& gt);

}  // namespace czd
