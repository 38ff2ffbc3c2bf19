#pragma once

#include <array>
#include <cmath>

namespace czd {

/// Axis-aligned bounding box in center form. All coordinates are pixels.
struct Box {
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;

  double left() const { return cx - w / 2.0; }
  double right() const { return cx + w / 2.0; }
  double top() const { return cy - h / 2.0; }
  double bottom() const { return cy + h / 2.0; }
  double area() const { return w * h; }

  bool valid() const {
    return std::isfinite(cx) && std::isfinite(cy) && std::isfinite(w) &&
           std::isfinite(h) && w >= 0.0 && h >= 0.0;
  }

  friend bool operator==(const Box&, const Box&) = default;
};

/// Symmetric 2x2 matrix [[xx, xy], [xy, yy]].
struct Mat2Sym {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;

  double trace() const { return xx + yy; }
  double det() const { return xx * yy - xy * xy; }
};

/// A box modeled as a 2-D Gaussian: mean at the box center and a diagonal
/// covariance diag(w^2/4, h^2/4) when converted from an axis-aligned box.
struct GaussianBox {
  std::array<double, 2> mu{0.0, 0.0};
  Mat2Sym sigma{};
};

/// Weights for the combined detection losses. tau modulates the nonlinear
/// distance-to-affinity conversion and must stay >= 1.
struct LossConfig {
  double lambda_size = 0.1;
  double lambda_off = 1.0;
  double lambda_gwd = 2.0;
  double lambda_l1 = 0.5;
  double tau = 1.0;
};

GaussianBox box_to_gaussian(const Box& b);

/// Squared 2-Wasserstein distance between two Gaussians, evaluated through
/// the matrix form with explicit 2x2 PSD square roots:
///   |mu1 - mu2|^2 + Tr(S1 + S2 - 2 (S1^{1/2} S2 S1^{1/2})^{1/2}).
/// Throws std::domain_error when a covariance is not PSD.
double wasserstein_general(const GaussianBox& g1, const GaussianBox& g2);

/// Squared 2-Wasserstein distance between two axis-aligned boxes in closed
/// form: (x1-x2)^2 + (y1-y2)^2 + ((w1-w2)^2 + (h1-h2)^2) / 4.
double wasserstein_closed(const Box& b1, const Box& b2);

/// Distance-based regression loss 1 - 1/(tau + ln(1 + W^2)).
/// Lies in [0, 1) for tau = 1 and grows monotonically with W^2.
double gwd_loss(const Box& b_pred, const Box& b_gt, const LossConfig& cfg = {});

/// Derivative of the tau=1 loss with respect to the distance W:
///   2W / ((1 + W^2) (1 + ln(1 + W^2))^2).
/// Flattens toward zero for large W, which is what makes the plain
/// distance loss weak on large boxes.
double gwd_gradient_wrt_w(double w);

/// Gradient of gwd_loss with respect to the predicted (cx, cy, w, h).
std::array<double, 4> gwd_gradient_wrt_box(const Box& b_pred, const Box& b_gt,
                                           const LossConfig& cfg = {});

/// Keypoint + size + offset combination:
///   l_k + lambda_size * l_size + lambda_off * l_off.
double detection_loss_size_offset(double l_k, double l_size, double l_off,
                                  const LossConfig& cfg = {});

/// Keypoint + distance + absolute-error combination:
///   l_k + lambda_gwd * l_gwd + lambda_l1 * l_1.
/// With lambda_l1 = 0 this degenerates to the distance-only form.
double detection_loss_gwd_l1(double l_k, double l_gwd, double l_1,
                             const LossConfig& cfg = {});

/// L1 size regression term: |w1 - w2| + |h1 - h2|.
double l1_size_loss(const Box& b_pred, const Box& b_gt);

/// L1 center offset term: |cx1 - cx2| + |cy1 - cy2|.
double l1_offset_loss(const Box& b_pred, const Box& b_gt);

/// Intersection over union in [0, 1]; 0 when the union has zero area.
double iou(const Box& b1, const Box& b2);

}  // namespace czd
