#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "czd/detection.hpp"
#include "czd/evaluation.hpp"
#include "czd/lsm.hpp"

namespace czd {

/// Scene recipe: a few tight object clusters plus sporadic singletons on an
/// otherwise empty canvas. Generation is a pure function of the config.
struct SceneConfig {
  int width = 1536;
  int height = 960;
  int n_clusters = 2;
  double cluster_spread = 64.0;   // Gaussian scatter of members (pixels)
  int min_cluster_objects = 20;
  int max_cluster_objects = 30;
  int n_sparse = 10;              // singletons scattered uniformly
  double small_min_size = 6.0;    // side-length range of small objects
  double small_max_size = 14.0;
  double big_min_size = 32.0;     // side-length range of the rest
  double big_max_size = 64.0;
  double small_share = 1.0;       // probability an object is small
  int categories = 3;             // category labels are 1..categories
  std::uint64_t seed = 0;
};

/// Resolution-sensitive stand-in for a trained detector: an object whose
/// shorter on-canvas side is s_eff is found with probability
/// clamp(s_eff / size_floor, 0, 1), localized with Gaussian center noise of
/// sigma = noise_coeff / s_eff canvas pixels, and scored p·(1 − jitter)
/// with jitter uniform in [0, score_jitter).
struct PseudoDetectorConfig {
  double size_floor = 16.0;
  double noise_coeff = 2.0;
  double score_jitter = 0.1;
  std::uint64_t seed = 0;
};

enum class PipelineMode { kGlobalOnly, kUniformCrops, kClusterCrops };

struct PipelineConfig {
  PipelineMode mode = PipelineMode::kGlobalOnly;
  int uniform_cols = 3;  // uniform tiling shape (mode kUniformCrops)
  int uniform_rows = 2;
  LsmConfig lsm;         // region selection (mode kClusterCrops)
  int detector_width = 1024;   // canvas every pass is rescaled onto
  int detector_height = 640;
  PseudoDetectorConfig detector;
};

/// What one pipeline run did: the score report, the views it paid for, and
/// the regions the region-selection stage produced (empty in other modes).
struct RunResult {
  EvalReport report;
  int detector_passes = 0;
  std::vector<ClusterRegion> regions;
  std::vector<Detection> detections;
};

std::vector<GroundTruth> generate_scene(const SceneConfig& cfg);

/// Simulate one detector pass over `view`. Only objects whose centers land
/// on the view's canvas are visible; outputs are in canvas coordinates.
/// Detection chance depends on object index and seed alone (never the
/// view), so enlarging an object on the canvas never loses it.
std::vector<Detection> pseudo_detect(std::span<const GroundTruth> gts,
                                     const CropTransform& view,
                                     int canvas_w, int canvas_h,
                                     const PseudoDetectorConfig& cfg);

/// Run one scene end to end in the chosen mode and score it against its
/// own ground truth.
RunResult run_pipeline(std::span<const GroundTruth> scene,
                       const SceneConfig& scene_cfg,
                       const PipelineConfig& cfg);

}  // namespace czd
