#include "czd/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace czd {

namespace {

int clamp_int(long v, int lo, int hi) {
  return static_cast<int>(std::clamp(v, static_cast<long>(lo),
                                     static_cast<long>(hi)));
}

// Truncated, normalized 1-D Gaussian taps for separable smoothing.
std::vector<double> gaussian_taps(double sigma) {
  int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> taps(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    double v = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
    taps[i + radius] = v;
    sum += v;
  }
  for (double& t : taps) t /= sum;
  return taps;
}

}  // namespace

Heatmap::Heatmap(int channels, int height, int width)
    : channels_(channels), height_(height), width_(width) {
  if (channels < 0 || height < 0 || width < 0) {
    throw std::invalid_argument("heatmap dimensions must be non-negative");
  }
  values_.assign(static_cast<std::size_t>(channels) * height * width, 0.0f);
}

int BinaryMask::count() const {
  int n = 0;
  for (std::uint8_t b : bits) n += b != 0;
  return n;
}

double blob_sigma(const Box& box) {
  return std::max(1.0, std::min(box.w, box.h) / 6.0);
}

Heatmap encode(std::span<const Annotation> annotations, int channels,
               int height, int width) {
  Heatmap hm(channels, height, width);
  if (height == 0 || width == 0) return hm;
  for (const Annotation& ann : annotations) {
    if (ann.category < 0 || ann.category >= channels) {
      throw std::out_of_range("annotation category outside heatmap channels");
    }
    // Blobs sit on the integer pixel grid so the center pixel is exactly 1.
    int px = clamp_int(std::lround(ann.box.cx), 0, width - 1);
    int py = clamp_int(std::lround(ann.box.cy), 0, height - 1);
    double sigma = blob_sigma(ann.box);
    int radius = static_cast<int>(std::ceil(3.0 * sigma));
    double inv = 1.0 / (2.0 * sigma * sigma);
    int y0 = std::max(0, py - radius), y1 = std::min(height - 1, py + radius);
    int x0 = std::max(0, px - radius), x1 = std::min(width - 1, px + radius);
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        double dx = x - px, dy = y - py;
        float g = static_cast<float>(std::exp(-(dx * dx + dy * dy) * inv));
        float& cell = hm.at(ann.category, y, x);
        cell = std::max(cell, g);
      }
    }
  }
  return hm;
}

Heatmap gaussian_filter(const Heatmap& hm, double sigma) {
  if (sigma < 0.0) throw std::invalid_argument("sigma must be non-negative");
  if (sigma == 0.0 || hm.height() == 0 || hm.width() == 0) return hm;
  std::vector<double> taps = gaussian_taps(sigma);
  int radius = (static_cast<int>(taps.size()) - 1) / 2;
  int h = hm.height(), w = hm.width();
  Heatmap out = hm;
  std::vector<double> row(std::max(h, w));
  for (int c = 0; c < hm.channels(); ++c) {
    // Horizontal pass, then vertical, replicating edge samples.
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) row[x] = out.at(c, y, x);
      for (int x = 0; x < w; ++x) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i) {
          acc += taps[i + radius] * row[std::clamp(x + i, 0, w - 1)];
        }
        out.at(c, y, x) = static_cast<float>(acc);
      }
    }
    for (int x = 0; x < w; ++x) {
      for (int y = 0; y < h; ++y) row[y] = out.at(c, y, x);
      for (int y = 0; y < h; ++y) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i) {
          acc += taps[i + radius] * row[std::clamp(y + i, 0, h - 1)];
        }
        out.at(c, y, x) = static_cast<float>(std::clamp(acc, 0.0, 1.0));
      }
    }
  }
  return out;
}

std::vector<Peak> decode(const Heatmap& hm, int top_n, double smooth_sigma) {
  if (top_n < 0) throw std::invalid_argument("top_n must be non-negative");
  if (smooth_sigma < 0.0) {
    throw std::invalid_argument("smoothing sigma must be non-negative");
  }
  const Heatmap smoothed =
      smooth_sigma > 0.0 ? gaussian_filter(hm, smooth_sigma) : hm;
  const Heatmap& m = smooth_sigma > 0.0 ? smoothed : hm;
  int h = m.height(), w = m.width();
  std::vector<Peak> peaks;
  // A candidate dominates (>=) its in-bounds 8-neighborhood. Equal-valued
  // candidate plateaus are collapsed to their first (c, y, x) pixel.
  std::vector<std::uint8_t> candidate(static_cast<std::size_t>(h) * w);
  std::vector<std::uint8_t> visited(static_cast<std::size_t>(h) * w);
  for (int c = 0; c < m.channels(); ++c) {
    std::fill(candidate.begin(), candidate.end(), 0);
    std::fill(visited.begin(), visited.end(), 0);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        float v = m.at(c, y, x);
        if (v < kPeakFloor) continue;
        bool dominant = true;
        for (int dy = -1; dy <= 1 && dominant; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            int ny = y + dy, nx = x + dx;
            if (ny < 0 || ny >= h || nx < 0 || nx >= w) continue;
            if (m.at(c, ny, nx) > v) {
              dominant = false;
              break;
            }
          }
        }
        if (dominant) candidate[static_cast<std::size_t>(y) * w + x] = 1;
      }
    }
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        std::size_t at = static_cast<std::size_t>(y) * w + x;
        if (!candidate[at] || visited[at]) continue;
        // Flood the equal-valued candidate plateau; (y, x) is its first
        // pixel in scan order, so it represents the plateau.
        float v = m.at(c, y, x);
        std::deque<std::pair<int, int>> frontier{{y, x}};
        visited[at] = 1;
        while (!frontier.empty()) {
          auto [cy, cx] = frontier.front();
          frontier.pop_front();
          for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
              int ny = cy + dy, nx = cx + dx;
              if (ny < 0 || ny >= h || nx < 0 || nx >= w) continue;
              std::size_t nat = static_cast<std::size_t>(ny) * w + nx;
              if (visited[nat] || !candidate[nat]) continue;
              if (m.at(c, ny, nx) != v) continue;
              visited[nat] = 1;
              frontier.emplace_back(ny, nx);
            }
          }
        }
        peaks.push_back(Peak{c, x, y, v});
      }
    }
  }
  std::stable_sort(peaks.begin(), peaks.end(), [](const Peak& a,
                                                  const Peak& b) {
    if (a.score != b.score) return a.score > b.score;
    return std::tie(a.channel, a.y, a.x) < std::tie(b.channel, b.y, b.x);
  });
  if (static_cast<int>(peaks.size()) > top_n) peaks.resize(top_n);
  return peaks;
}

std::vector<Detection> peaks_to_detections(std::span<const Peak> peaks,
                                           const SizeLookup& size_lookup) {
  std::vector<Detection> dets;
  dets.reserve(peaks.size());
  for (const Peak& p : peaks) {
    std::optional<std::array<double, 2>> wh = size_lookup(p);
    if (!wh) throw std::runtime_error("no size available for decoded peak");
    dets.push_back(Detection{
        Box{static_cast<double>(p.x), static_cast<double>(p.y), (*wh)[0],
            (*wh)[1]},
        p.channel, static_cast<double>(p.score)});
  }
  return dets;
}

BinaryMask binarize(const Heatmap& hm, double threshold) {
  BinaryMask mask(hm.height(), hm.width());
  for (int y = 0; y < hm.height(); ++y) {
    for (int x = 0; x < hm.width(); ++x) {
      float best = 0.0f;
      for (int c = 0; c < hm.channels(); ++c) {
        best = std::max(best, hm.at(c, y, x));
      }
      mask.set(y, x, best >= threshold);
    }
  }
  return mask;
}

double focal_loss(const Heatmap& pred, const Heatmap& gt) {
  if (!pred.same_shape(gt)) {
    throw std::invalid_argument("focal_loss requires matching shapes");
  }
  constexpr double kEps = 1e-6;
  double sum = 0.0;
  long peaks = 0;
  std::span<const float> p = pred.values();
  std::span<const float> g = gt.values();
  for (std::size_t i = 0; i < p.size(); ++i) {
    double pi = std::clamp(static_cast<double>(p[i]), kEps, 1.0 - kEps);
    double gi = g[i];
    if (gi == 1.0f) {
      ++peaks;
      sum += (1.0 - pi) * (1.0 - pi) * std::log(pi);
    } else {
      double down = std::pow(1.0 - gi, 4.0);
      sum += down * pi * pi * std::log(1.0 - pi);
    }
  }
  return -sum / static_cast<double>(std::max(peaks, 1L));
}

}  // namespace czd
