#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "czd/heatmap.hpp"
#include "czd/random.hpp"
#include "doctest.h"
#include "oracles.hpp"

using czd::Annotation;
using czd::BinaryMask;
using czd::Box;
using czd::Heatmap;
using czd::Peak;

namespace {

Heatmap random_heatmap(czd::Rng& rng, int c, int h, int w) {
  Heatmap hm(c, h, w);
  for (float& v : hm.values()) {
    v = static_cast<float>(rng.uniform());
  }
  return hm;
}

}  // namespace

TEST_CASE("blob width follows the shorter box side with a floor") {
  CHECK(czd::blob_sigma(Box{0, 0, 12, 18}) == doctest::Approx(2.0));
  CHECK(czd::blob_sigma(Box{0, 0, 18, 12}) == doctest::Approx(2.0));
  CHECK(czd::blob_sigma(Box{0, 0, 2, 2}) == doctest::Approx(1.0));
}

TEST_CASE("encoding no annotations yields all zeros") {
  Heatmap hm = czd::encode({}, 2, 8, 8);
  for (float v : hm.values()) CHECK(v == 0.0f);
}

TEST_CASE("an encoded object peaks at exactly 1 and decays radially") {
  std::vector<Annotation> anns{{Box{10, 10, 6, 6}, 0}};
  Heatmap hm = czd::encode(anns, 1, 32, 32);
  CHECK(hm.at(0, 10, 10) == 1.0f);
  for (float v : hm.values()) CHECK(v <= 1.0f);
  // Nonincreasing along the four axis rays from the center.
  for (int d = 0; d < 10; ++d) {
    CHECK(hm.at(0, 10, 11 + d) <= hm.at(0, 10, 10 + d));
    CHECK(hm.at(0, 10, 9 - d) <= hm.at(0, 10, 10 - d));
    CHECK(hm.at(0, 11 + d, 10) <= hm.at(0, 10 + d, 10));
    CHECK(hm.at(0, 9 - d, 10) <= hm.at(0, 10 - d, 10));
  }
}

TEST_CASE("max-combine makes duplicate objects idempotent") {
  std::vector<Annotation> one{{Box{12, 9, 8, 8}, 0}};
  std::vector<Annotation> two{{Box{12, 9, 8, 8}, 0}, {Box{12, 9, 8, 8}, 0}};
  Heatmap a = czd::encode(one, 1, 24, 24);
  Heatmap b = czd::encode(two, 1, 24, 24);
  for (std::size_t i = 0; i < a.values().size(); ++i) {
    CHECK(a.values()[i] == b.values()[i]);
  }
}

TEST_CASE("out-of-bounds centers are clamped onto the grid") {
  std::vector<Annotation> anns{{Box{-5, 3, 4, 4}, 0}};
  Heatmap hm = czd::encode(anns, 1, 16, 16);
  CHECK(hm.at(0, 3, 0) == 1.0f);
}

TEST_CASE("encoding rejects categories outside the channel range") {
  std::vector<Annotation> anns{{Box{4, 4, 2, 2}, 3}};
  CHECK_THROWS_AS(czd::encode(anns, 2, 8, 8), std::out_of_range);
}

TEST_CASE("smoothing with sigma 0 is the identity") {
  czd::Rng rng(41);
  Heatmap hm = random_heatmap(rng, 2, 9, 7);
  Heatmap out = czd::gaussian_filter(hm, 0.0);
  for (std::size_t i = 0; i < hm.values().size(); ++i) {
    CHECK(out.values()[i] == hm.values()[i]);
  }
}

TEST_CASE("smoothing leaves a constant map unchanged") {
  Heatmap hm(1, 12, 15);
  for (float& v : hm.values()) v = 0.5f;
  Heatmap out = czd::gaussian_filter(hm, 1.7);
  for (float v : out.values()) {
    CHECK(v == doctest::Approx(0.5).epsilon(1e-6));
  }
}

TEST_CASE("smoothing an interior impulse reproduces the kernel mass") {
  Heatmap hm(1, 21, 21);
  hm.at(0, 10, 10) = 1.0f;
  Heatmap out = czd::gaussian_filter(hm, 2.0);
  double mass = 0.0;
  for (float v : out.values()) mass += v;
  CHECK(mass == doctest::Approx(1.0).epsilon(0.01));
  // Kernel peak sits at the impulse.
  float best = 0.0f;
  for (float v : out.values()) best = std::max(best, v);
  CHECK(out.at(0, 10, 10) == best);
}

TEST_CASE("smoothing matches the brute-force separable reference") {
  czd::Rng rng(99);
  for (double sigma : {0.5, 1.0, 2.7}) {
    Heatmap hm = random_heatmap(rng, 2, 17, 13);
    Heatmap lib = czd::gaussian_filter(hm, sigma);
    Heatmap ref = oracle::gaussian_filter(hm, sigma);
    for (std::size_t i = 0; i < lib.values().size(); ++i) {
      CHECK(lib.values()[i] ==
            doctest::Approx(ref.values()[i]).epsilon(1e-5));
    }
  }
}

TEST_CASE("decoding an all-zero heatmap finds nothing") {
  Heatmap hm(3, 16, 16);
  CHECK(czd::decode(hm, 10).empty());
  CHECK(czd::decode(hm, 10, 0.0).empty());
}

TEST_CASE("decode recovers well-separated encoded centers") {
  std::vector<Annotation> anns{{Box{8, 8, 6, 6}, 0},
                               {Box{40, 12, 8, 8}, 0},
                               {Box{24, 40, 10, 10}, 1}};
  Heatmap hm = czd::encode(anns, 2, 56, 56);
  std::vector<Peak> peaks = czd::decode(hm, 10);
  REQUIRE(peaks.size() == 3);
  std::set<std::size_t> claimed;
  for (const Annotation& ann : anns) {
    bool found = false;
    for (std::size_t i = 0; i < peaks.size(); ++i) {
      if (claimed.count(i)) continue;
      if (std::abs(peaks[i].x - ann.box.cx) <= 1.0 &&
          std::abs(peaks[i].y - ann.box.cy) <= 1.0 &&
          peaks[i].channel == ann.category) {
        claimed.insert(i);
        found = true;
        break;
      }
    }
    CHECK(found);
  }
}

TEST_CASE("equal-valued plateaus collapse to their first pixel") {
  Heatmap hm(1, 8, 8);
  hm.at(0, 3, 4) = 0.8f;
  hm.at(0, 3, 5) = 0.8f;
  hm.at(0, 4, 4) = 0.8f;
  hm.at(0, 4, 5) = 0.8f;
  std::vector<Peak> peaks = czd::decode(hm, 10, 0.0);
  REQUIRE(peaks.size() == 1);
  CHECK(peaks[0].y == 3);
  CHECK(peaks[0].x == 4);
  CHECK(peaks[0].score == 0.8f);
}

TEST_CASE("separate equal peaks are kept and ordered deterministically") {
  Heatmap hm(2, 8, 8);
  hm.at(1, 2, 2) = 0.6f;
  hm.at(0, 5, 6) = 0.6f;
  std::vector<Peak> peaks = czd::decode(hm, 10, 0.0);
  REQUIRE(peaks.size() == 2);
  // Same score: (channel, y, x) order decides.
  CHECK(peaks[0].channel == 0);
  CHECK(peaks[1].channel == 1);
}

TEST_CASE("decode keeps only the top peaks when capped") {
  Heatmap hm(1, 8, 8);
  hm.at(0, 1, 1) = 0.9f;
  hm.at(0, 6, 6) = 0.4f;
  std::vector<Peak> peaks = czd::decode(hm, 1, 0.0);
  REQUIRE(peaks.size() == 1);
  CHECK(peaks[0].score == 0.9f);
  CHECK(czd::decode(hm, 0, 0.0).empty());
}

TEST_CASE("smoothing does not multiply peaks for adjacent objects") {
  std::vector<Annotation> anns{{Box{10, 10, 6, 6}, 0}, {Box{11, 10, 6, 6}, 0}};
  Heatmap hm = czd::encode(anns, 1, 24, 24);
  std::size_t raw = czd::decode(hm, 50, 0.0).size();
  std::size_t smoothed = czd::decode(hm, 50, 1.0).size();
  CHECK(smoothed <= raw);
  CHECK(smoothed >= 1);
}

TEST_CASE("peaks become detections through a size lookup") {
  std::vector<Peak> peaks{{0, 5, 7, 0.9f}, {1, 2, 3, 0.8f}};
  auto constant = [](const Peak&) {
    return std::optional<std::array<double, 2>>{{4.0, 6.0}};
  };
  std::vector<czd::Detection> dets = czd::peaks_to_detections(peaks, constant);
  REQUIRE(dets.size() == 2);
  CHECK(dets[0].box.cx == 5.0);
  CHECK(dets[0].box.cy == 7.0);
  CHECK(dets[0].box.w == 4.0);
  CHECK(dets[0].box.h == 6.0);
  CHECK(dets[0].category == 0);
  CHECK(dets[0].score == doctest::Approx(0.9));
  CHECK(czd::peaks_to_detections({}, constant).empty());

  auto missing = [](const Peak&) {
    return std::optional<std::array<double, 2>>{};
  };
  CHECK_THROWS_AS(czd::peaks_to_detections(peaks, missing),
                  std::runtime_error);
}

TEST_CASE("binarize thresholds the channel-max field") {
  czd::Rng rng(7);
  Heatmap hm = random_heatmap(rng, 3, 11, 9);

  BinaryMask all = czd::binarize(hm, 0.0);
  CHECK(all.count() == 11 * 9);

  Heatmap zero(2, 5, 5);
  CHECK(czd::binarize(zero, 0.1).count() == 0);

  BinaryMask lo = czd::binarize(hm, 0.3);
  BinaryMask hi = czd::binarize(hm, 0.6);
  for (int y = 0; y < 11; ++y) {
    for (int x = 0; x < 9; ++x) {
      float best = 0.0f;
      for (int c = 0; c < 3; ++c) best = std::max(best, hm.at(c, y, x));
      CHECK(lo.at(y, x) == (best >= 0.3f));
      CHECK(hi.at(y, x) == (best >= 0.6f));
      if (hi.at(y, x)) CHECK(lo.at(y, x));  // monotone in the threshold
    }
  }
}

TEST_CASE("focal loss requires matching shapes") {
  Heatmap a(1, 4, 4), b(1, 4, 5);
  CHECK_THROWS_AS(czd::focal_loss(a, b), std::invalid_argument);
}

TEST_CASE("focal loss is near zero when predictions nail crisp peaks") {
  Heatmap gt(2, 32, 32);
  gt.at(0, 10, 10) = 1.0f;
  gt.at(1, 20, 7) = 1.0f;
  double loss = czd::focal_loss(gt, gt);
  CHECK(loss < 1e-2);
  CHECK(loss >= 0.0);
}

TEST_CASE("focal loss matches the brute-force sum on a uniform prediction") {
  Heatmap gt(1, 16, 16);
  gt.at(0, 8, 8) = 1.0f;
  Heatmap pred(1, 16, 16);
  for (float& v : pred.values()) v = 0.5f;
  CHECK(czd::focal_loss(pred, gt) ==
        doctest::Approx(oracle::focal_loss(pred, gt)).epsilon(1e-12));
}

TEST_CASE("focal loss matches the brute-force sum on random maps") {
  czd::Rng rng(1234);
  for (int trial = 0; trial < 10; ++trial) {
    Heatmap pred = random_heatmap(rng, 2, 9, 8);
    Heatmap gt = random_heatmap(rng, 2, 9, 8);
    // Plant a few exact peaks so the peak-count normalization is exercised.
    for (int i = 0; i < trial % 3; ++i) {
      gt.at(rng.uniform_int(0, 1), rng.uniform_int(0, 8),
            rng.uniform_int(0, 7)) = 1.0f;
    }
    CHECK(czd::focal_loss(pred, gt) ==
          doctest::Approx(oracle::focal_loss(pred, gt)).epsilon(1e-10));
  }
}

TEST_CASE("round trip: separated random scenes decode to exact centers") {
  czd::Rng rng(2024);
  for (int scene = 0; scene < 25; ++scene) {
    // Objects on a jittered coarse grid stay > 4 sigma apart.
    std::vector<Annotation> anns;
    int categories = 2;
    for (int gy = 0; gy < 3; ++gy) {
      for (int gx = 0; gx < 4; ++gx) {
        if (rng.uniform() < 0.3) continue;
        double cx = 16 + gx * 28 + rng.uniform(-4.0, 4.0);
        double cy = 16 + gy * 28 + rng.uniform(-4.0, 4.0);
        double w = rng.uniform(4.0, 12.0);
        double h = rng.uniform(4.0, 12.0);
        anns.push_back(
            Annotation{Box{cx, cy, w, h}, rng.uniform_int(0, categories - 1)});
      }
    }
    Heatmap hm = czd::encode(anns, categories, 100, 128);
    std::vector<Peak> peaks =
        czd::decode(hm, static_cast<int>(anns.size()) + 16, 0.0);
    REQUIRE(peaks.size() == anns.size());
    std::set<std::size_t> claimed;
    for (const Annotation& ann : anns) {
      bool found = false;
      for (std::size_t i = 0; i < peaks.size(); ++i) {
        if (claimed.count(i)) continue;
        if (peaks[i].channel == ann.category &&
            std::abs(peaks[i].x - ann.box.cx) <= 1.0 &&
            std::abs(peaks[i].y - ann.box.cy) <= 1.0) {
          claimed.insert(i);
          found = true;
          break;
        }
      }
      CHECK(found);
    }
  }
}
