#include <cmath>
#include <stdexcept>

#include "czd/geometry.hpp"
#include "czd/random.hpp"
#include "doctest.h"

using namespace czd;

namespace {

Box random_box(Rng& rng) {
  return {rng.uniform(0.0, 1024.0), rng.uniform(0.0, 1024.0),
          rng.uniform(0.0, 512.0), rng.uniform(0.0, 512.0)};
}

// Central finite difference of f at x.
template <typename F>
double central_diff(F f, double x, double step) {
  return (f(x + step) - f(x - step)) / (2.0 * step);
}

}  // namespace

TEST_CASE("box_to_gaussian maps center and quarter-squared sizes") {
  auto g0 = box_to_gaussian({0, 0, 0, 0});
  CHECK(g0.mu[0] == 0.0);
  CHECK(g0.mu[1] == 0.0);
  CHECK(g0.sigma.xx == 0.0);
  CHECK(g0.sigma.yy == 0.0);
  CHECK(g0.sigma.xy == 0.0);

  auto g1 = box_to_gaussian({2, 3, 4, 6});
  CHECK(g1.mu[0] == 2.0);
  CHECK(g1.mu[1] == 3.0);
  CHECK(g1.sigma.xx == doctest::Approx(4.0));
  CHECK(g1.sigma.yy == doctest::Approx(9.0));

  auto g2 = box_to_gaussian({1, 1, 2, 2});
  CHECK(g2.sigma.xx == doctest::Approx(1.0));
  CHECK(g2.sigma.yy == doctest::Approx(1.0));
}

TEST_CASE("wasserstein_general on frozen cases") {
  GaussianBox a = box_to_gaussian({5, 6, 4, 8});
  CHECK(wasserstein_general(a, a) == doctest::Approx(0.0).epsilon(1e-12));

  GaussianBox g1{{0, 0}, {4, 0, 4}};
  GaussianBox g2{{3, 4}, {4, 0, 4}};
  CHECK(wasserstein_general(g1, g2) == doctest::Approx(25.0));

  GaussianBox g3{{1, 2}, {4, 0, 0}};
  GaussianBox g4{{1, 2}, {16, 0, 0}};
  CHECK(wasserstein_general(g3, g4) == doctest::Approx(4.0));
}

TEST_CASE("wasserstein_general rejects non-PSD covariance") {
  GaussianBox ok = box_to_gaussian({0, 0, 2, 2});
  GaussianBox indefinite{{0, 0}, {1, 2, 1}};   // det = -3
  GaussianBox negative{{0, 0}, {-1, 0, 1}};
  CHECK_THROWS_AS(wasserstein_general(ok, indefinite), std::domain_error);
  CHECK_THROWS_AS(wasserstein_general(negative, ok), std::domain_error);
}

TEST_CASE("wasserstein_closed on frozen cases") {
  Box b{10, 20, 30, 40};
  CHECK(wasserstein_closed(b, b) == 0.0);
  CHECK(wasserstein_closed({0, 0, 4, 4}, {3, 4, 4, 4}) == doctest::Approx(25.0));
  CHECK(wasserstein_closed({0, 0, 2, 2}, {0, 0, 6, 2}) == doctest::Approx(4.0));
}

TEST_CASE("closed form is symmetric and zero only at identity") {
  Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    Box a = random_box(rng);
    Box b = random_box(rng);
    CHECK(wasserstein_closed(a, b) == wasserstein_closed(b, a));
    if (!(a == b)) {
      CHECK(wasserstein_closed(a, b) > 0.0);
    }
  }
}

TEST_CASE("closed form agrees with the general matrix form") {
  Rng rng(7);
  for (int i = 0; i < 2000; ++i) {
    Box a = random_box(rng);
    Box b = random_box(rng);
    const double closed = wasserstein_closed(a, b);
    const double general =
        wasserstein_general(box_to_gaussian(a), box_to_gaussian(b));
    CHECK(std::abs(closed - general) <= 1e-9 * (1.0 + closed));
  }
}

TEST_CASE("distance is 1-homogeneous under uniform scaling") {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    Box a = random_box(rng);
    Box b = random_box(rng);
    const double s = rng.uniform(0.1, 8.0);
    Box as{a.cx * s, a.cy * s, a.w * s, a.h * s};
    Box bs{b.cx * s, b.cy * s, b.w * s, b.h * s};
    const double w = std::sqrt(wasserstein_closed(a, b));
    const double ws = std::sqrt(wasserstein_closed(as, bs));
    CHECK(ws == doctest::Approx(s * w).epsilon(1e-9));
  }
}

TEST_CASE("gwd_loss frozen values and range") {
  LossConfig cfg;
  Box b{1, 2, 3, 4};
  CHECK(gwd_loss(b, b, cfg) == 0.0);

  // A center offset of sqrt(e - 1) gives W^2 = e - 1, so the loss is 1/2.
  const double d1 = std::sqrt(std::exp(1.0) - 1.0);
  CHECK(gwd_loss({d1, 0, 2, 2}, {0, 0, 2, 2}, cfg) == doctest::Approx(0.5));

  const double d3 = std::sqrt(std::exp(3.0) - 1.0);
  CHECK(gwd_loss({d3, 0, 2, 2}, {0, 0, 2, 2}, cfg) == doctest::Approx(0.75));

  Rng rng(19);
  for (int i = 0; i < 500; ++i) {
    const double l = gwd_loss(random_box(rng), random_box(rng), cfg);
    CHECK(l >= 0.0);
    CHECK(l < 1.0);
  }
}

TEST_CASE("gwd_loss is strictly increasing along a translation ray") {
  LossConfig cfg;
  Box gt{100, 100, 16, 16};
  double prev_loss = -1.0;
  double prev_iou = 2.0;
  for (int i = 0; i <= 40; ++i) {
    const double dx = 0.5 * i;
    Box pred{gt.cx + dx, gt.cy, gt.w, gt.h};
    const double l = gwd_loss(pred, gt, cfg);
    const double v = iou(pred, gt);
    if (i > 0) {
      CHECK(l > prev_loss);
      CHECK(v <= prev_iou);
    }
    prev_loss = l;
    prev_iou = v;
  }
}

TEST_CASE("gradient w.r.t. W matches its frozen values") {
  CHECK(gwd_gradient_wrt_w(0.0) == 0.0);
  const double ln2 = std::log(2.0);
  CHECK(gwd_gradient_wrt_w(1.0) ==
        doctest::Approx(2.0 / (2.0 * (1.0 + ln2) * (1.0 + ln2))));
  CHECK(gwd_gradient_wrt_w(100.0) < 1e-3);  // vanishing gradient at large W
}

TEST_CASE("gradient w.r.t. W matches finite differences on a log grid") {
  const auto loss_of_w = [](double w) {
    return 1.0 - 1.0 / (1.0 + std::log1p(w * w));
  };
  for (double e = -3.0; e <= 3.0; e += 0.125) {
    const double w = std::pow(10.0, e);
    const double analytic = gwd_gradient_wrt_w(w);
    const double numeric = central_diff(loss_of_w, w, 1e-6 * std::max(1.0, w));
    CHECK(std::abs(analytic - numeric) <= 1e-5 * std::abs(numeric));
  }
}

TEST_CASE("box gradient vanishes at the ground truth") {
  auto g = gwd_gradient_wrt_box({4, 5, 6, 7}, {4, 5, 6, 7});
  for (double v : g) {
    CHECK(v == 0.0);
  }
}

TEST_CASE("box gradient matches finite differences") {
  LossConfig cfg;
  Rng rng(23);

  const auto check_pair = [&](const Box& pred, const Box& gt) {
    const auto grad = gwd_gradient_wrt_box(pred, gt, cfg);
    const double step = 1e-4;
    for (int c = 0; c < 4; ++c) {
      const auto loss_at = [&](double v) {
        Box p = pred;
        (c == 0 ? p.cx : c == 1 ? p.cy : c == 2 ? p.w : p.h) = v;
        return gwd_loss(p, gt, cfg);
      };
      const double x0 = c == 0 ? pred.cx : c == 1 ? pred.cy : c == 2 ? pred.w : pred.h;
      const double numeric = central_diff(loss_at, x0, step);
      if (std::abs(grad[c]) > 1e-8) {
        CHECK(std::abs(grad[c] - numeric) <= 1e-4 * std::abs(grad[c]));
      }
    }
  };

  check_pair({1, 0, 4, 4}, {0, 0, 4, 4});
  // Scaling both boxes doubles W and moves the gradient along the same curve.
  check_pair({2, 0, 8, 8}, {0, 0, 8, 8});
  for (int i = 0; i < 300; ++i) {
    check_pair(random_box(rng), random_box(rng));
  }
}

TEST_CASE("combined detection losses") {
  LossConfig cfg;
  CHECK(detection_loss_size_offset(0, 0, 0, cfg) == 0.0);
  CHECK(detection_loss_size_offset(1, 2, 0.5, cfg) == doctest::Approx(1.7));
  CHECK(detection_loss_size_offset(1, 0, 0, cfg) == 1.0);

  CHECK(detection_loss_gwd_l1(0, 0, 0, cfg) == 0.0);
  CHECK(detection_loss_gwd_l1(1, 0.5, 2, cfg) == doctest::Approx(3.0));

  LossConfig no_l1 = cfg;
  no_l1.lambda_l1 = 0.0;
  CHECK(detection_loss_gwd_l1(1, 0.5, 99, no_l1) ==
        doctest::Approx(1.0 + cfg.lambda_gwd * 0.5));
}

TEST_CASE("l1 size loss and its blind spot") {
  CHECK(l1_size_loss({0, 0, 5, 5}, {0, 0, 5, 5}) == 0.0);
  CHECK(l1_size_loss({0, 0, 8, 6}, {0, 0, 5, 5}) == doctest::Approx(4.0));

  // Equal L1 penalty, different overlap quality.
  Box gt{0, 0, 10, 10};
  Box wide{0, 0, 14, 10};
  Box square{0, 0, 12, 12};
  CHECK(l1_size_loss(wide, gt) == l1_size_loss(square, gt));
  CHECK(iou(wide, gt) != doctest::Approx(iou(square, gt)));
}

TEST_CASE("iou basics") {
  Box a{0.5, 0.5, 1, 1};
  CHECK(iou(a, a) == doctest::Approx(1.0));
  CHECK(iou(a, {10, 10, 1, 1}) == 0.0);
  CHECK(iou(a, {1.0, 0.5, 1, 1}) == doctest::Approx(1.0 / 3.0));
  CHECK(iou({0, 0, 0, 0}, {0, 0, 0, 0}) == 0.0);
}
