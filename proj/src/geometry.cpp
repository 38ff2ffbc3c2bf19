#include "czd/geometry.hpp"

#include <algorithm>
#include <stdexcept>

namespace czd {

namespace {

void require_psd(const Mat2Sym& m, const char* label) {
  const double scale = 1.0 + std::abs(m.xx) + std::abs(m.yy);
  const bool finite =
      std::isfinite(m.xx) && std::isfinite(m.xy) && std::isfinite(m.yy);
  if (!finite || m.xx < -1e-12 * scale || m.yy < -1e-12 * scale ||
      m.det() < -1e-9 * scale * scale) {
    throw std::domain_error(std::string(label) +
                            " covariance is not positive semidefinite");
  }
}

// Principal square root of a symmetric PSD 2x2 matrix:
//   sqrt(M) = (M + sqrt(det M) I) / sqrt(tr M + 2 sqrt(det M))
// with the zero matrix mapping to itself.
Mat2Sym sqrt_psd(const Mat2Sym& m) {
  const double s = std::sqrt(std::max(m.det(), 0.0));
  const double t2 = m.trace() + 2.0 * s;
  if (t2 <= 0.0) {
    return {};
  }
  const double t = std::sqrt(t2);
  return {(m.xx + s) / t, m.xy / t, (m.yy + s) / t};
}

// A = B * S2 * B for symmetric B and S2; the result is symmetric up to
// rounding, so it is symmetrized explicitly.
Mat2Sym sandwich(const Mat2Sym& b, const Mat2Sym& s2) {
  const double p00 = b.xx * s2.xx + b.xy * s2.xy;
  const double p01 = b.xx * s2.xy + b.xy * s2.yy;
  const double p10 = b.xy * s2.xx + b.yy * s2.xy;
  const double p11 = b.xy * s2.xy + b.yy * s2.yy;

  const double a00 = p00 * b.xx + p01 * b.xy;
  const double a01 = p00 * b.xy + p01 * b.yy;
  const double a10 = p10 * b.xx + p11 * b.xy;
  const double a11 = p10 * b.xy + p11 * b.yy;
  return {a00, 0.5 * (a01 + a10), a11};
}

}  // namespace

GaussianBox box_to_gaussian(const Box& b) {
  GaussianBox g;
  g.mu = {b.cx, b.cy};
  g.sigma = {b.w * b.w / 4.0, 0.0, b.h * b.h / 4.0};
  return g;
}

double wasserstein_general(const GaussianBox& g1, const GaussianBox& g2) {
  require_psd(g1.sigma, "first");
  require_psd(g2.sigma, "second");

  const double dx = g1.mu[0] - g2.mu[0];
  const double dy = g1.mu[1] - g2.mu[1];

  const Mat2Sym root1 = sqrt_psd(g1.sigma);
  const Mat2Sym inner = sqrt_psd(sandwich(root1, g2.sigma));

  const double w2 = dx * dx + dy * dy + g1.sigma.trace() + g2.sigma.trace() -
                    2.0 * inner.trace();
  return std::max(w2, 0.0);
}

double wasserstein_closed(const Box& b1, const Box& b2) {
  const double dx = b1.cx - b2.cx;
  const double dy = b1.cy - b2.cy;
  const double dw = b1.w - b2.w;
  const double dh = b1.h - b2.h;
  return dx * dx + dy * dy + (dw * dw + dh * dh) / 4.0;
}

double gwd_loss(const Box& b_pred, const Box& b_gt, const LossConfig& cfg) {
  const double w2 = wasserstein_closed(b_pred, b_gt);
  return 1.0 - 1.0 / (cfg.tau + std::log1p(w2));
}

double gwd_gradient_wrt_w(double w) {
  const double w2 = w * w;
  const double d = 1.0 + std::log1p(w2);
  return 2.0 * w / ((1.0 + w2) * d * d);
}

std::array<double, 4> gwd_gradient_wrt_box(const Box& b_pred, const Box& b_gt,
                                           const LossConfig& cfg) {
  const double w2 = wasserstein_closed(b_pred, b_gt);
  const double d = cfg.tau + std::log1p(w2);
  // dL/dW^2, then the chain rule through the closed form.
  const double outer = 1.0 / (d * d * (1.0 + w2));
  return {
      outer * 2.0 * (b_pred.cx - b_gt.cx),
      outer * 2.0 * (b_pred.cy - b_gt.cy),
      outer * 0.5 * (b_pred.w - b_gt.w),
      outer * 0.5 * (b_pred.h - b_gt.h),
  };
}

double detection_loss_size_offset(double l_k, double l_size, double l_off,
                                  const LossConfig& cfg) {
  return l_k + cfg.lambda_size * l_size + cfg.lambda_off * l_off;
}

double detection_loss_gwd_l1(double l_k, double l_gwd, double l_1,
                             const LossConfig& cfg) {
  return l_k + cfg.lambda_gwd * l_gwd + cfg.lambda_l1 * l_1;
}

double l1_size_loss(const Box& b_pred, const Box& b_gt) {
  return std::abs(b_pred.w - b_gt.w) + std::abs(b_pred.h - b_gt.h);
}

double l1_offset_loss(const Box& b_pred, const Box& b_gt) {
  return std::abs(b_pred.cx - b_gt.cx) + std::abs(b_pred.cy - b_gt.cy);
}

double iou(const Box& b1, const Box& b2) {
  const double ix =
      std::min(b1.right(), b2.right()) - std::max(b1.left(), b2.left());
  const double iy =
      std::min(b1.bottom(), b2.bottom()) - std::max(b1.top(), b2.top());
  if (ix <= 0.0 || iy <= 0.0) {
    return 0.0;
  }
  const double inter = ix * iy;
  const double uni = b1.area() + b2.area() - inter;
  if (uni <= 0.0) {
    return 0.0;
  }
  return inter / uni;
}

}  // namespace czd
