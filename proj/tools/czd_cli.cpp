// Command-line front end: composes the library into batch pipelines.
//
// Exit codes: 0 success, 2 flag/usage error, 3 missing input file,
// 4 input format error, 1 anything else.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "czd/evaluation.hpp"
#include "czd/fusion.hpp"
#include "czd/geometry.hpp"
#include "czd/heatmap.hpp"
#include "czd/io_formats.hpp"
#include "czd/lsm.hpp"
#include "czd/synthetic.hpp"
#include "json.hpp"

namespace {

using czd::IoError;
using nlohmann::json;

bool verbose() {
  const char* v = std::getenv("CZD_VERBOSE");
  return v != nullptr && v[0] != '\0' && std::string(v) != "0";
}

void note(const std::string& msg) {
  if (verbose()) std::cerr << "czd: " << msg << "\n";
}

// "1024x640" -> (1024, 640)
std::pair<int, int> parse_size(const std::string& s) {
  std::size_t x = s.find('x');
  if (x == std::string::npos) {
    throw CLI::ValidationError("size", "expected WxH, got '" + s + "'");
  }
  try {
    int w = std::stoi(s.substr(0, x));
    int h = std::stoi(s.substr(x + 1));
    if (w < 1 || h < 1) throw std::invalid_argument("non-positive");
    return {w, h};
  } catch (const std::exception&) {
    throw CLI::ValidationError("size", "expected WxH, got '" + s + "'");
  }
}

std::pair<int, int> parse_grid(const std::string& s) {
  return parse_size(s);  // same CxR syntax
}

json report_to_json(const czd::EvalReport& r) {
  json per_class = json::object();
  for (const auto& [cat, ap] : r.per_class) {
    per_class[std::to_string(cat)] = ap;
  }
  return json{{"ap", r.ap},           {"ap50", r.ap50},
              {"ap75", r.ap75},       {"ap_small", r.ap_small},
              {"ap_medium", r.ap_medium}, {"ap_large", r.ap_large},
              {"per_class", per_class}};
}

void print_report_table(const czd::EvalReport& r) {
  auto cell = [](double v) {
    char buf[32];
    if (v == czd::kUndefinedAp) {
      std::snprintf(buf, sizeof buf, "%8s", "n/a");
    } else {
      std::snprintf(buf, sizeof buf, "%8.4f", v);
    }
    return std::string(buf);
  };
  std::printf("%-10s%8s\n", "metric", "value");
  std::printf("%-10s%s\n", "ap", cell(r.ap).c_str());
  std::printf("%-10s%s\n", "ap50", cell(r.ap50).c_str());
  std::printf("%-10s%s\n", "ap75", cell(r.ap75).c_str());
  std::printf("%-10s%s\n", "ap_small", cell(r.ap_small).c_str());
  std::printf("%-10s%s\n", "ap_medium", cell(r.ap_medium).c_str());
  std::printf("%-10s%s\n", "ap_large", cell(r.ap_large).c_str());
  for (const auto& [cat, ap] : r.per_class) {
    std::printf("class_%-4d%s\n", cat, cell(ap).c_str());
  }
}

// --- encode ---

struct EncodeArgs {
  std::string ann_path;
  std::string size = "1024x640";
  int channels = 0;  // 0 = max category + 1
  std::string out;
};

int cmd_encode(const EncodeArgs& a) {
  auto [w, h] = parse_size(a.size);
  std::vector<czd::AnnotationRecord> records = czd::read_annotations(a.ann_path);
  std::vector<czd::Annotation> anns;
  int max_category = 0;
  for (const czd::AnnotationRecord& rec : records) {
    if (rec.category == czd::kIgnoreCategory) continue;  // region markers
    anns.push_back(czd::Annotation{czd::annotation_box(rec), rec.category});
    max_category = std::max(max_category, rec.category);
  }
  int channels = a.channels > 0 ? a.channels : max_category + 1;
  czd::Heatmap hm = czd::encode(anns, channels, h, w);
  czd::write_heatmap(hm, a.out);
  note("encoded " + std::to_string(anns.size()) + " annotations into " +
       a.out);
  return 0;
}

// --- decode ---

struct DecodeArgs {
  std::string heatmap_path;
  int top_n = 100;
  double smooth_sigma = 1.0;
  std::string out;
};

int cmd_decode(const DecodeArgs& a) {
  czd::Heatmap hm = czd::read_heatmap(a.heatmap_path);
  std::vector<czd::Peak> peaks = czd::decode(hm, a.top_n, a.smooth_sigma);
  // Peak sizes are unknown without a size head; boxes degenerate to points.
  std::vector<czd::DetectionEntry> entries;
  for (const czd::Peak& p : peaks) {
    czd::Detection d;
    d.box = czd::Box{static_cast<double>(p.x), static_cast<double>(p.y), 0.0,
                     0.0};
    d.category = p.channel;
    d.score = p.score;
    entries.push_back(czd::DetectionEntry{0, d});
  }
  if (a.out.empty()) {
    for (const czd::Peak& p : peaks) {
      std::printf("%d %d %d %.6f\n", p.channel, p.x, p.y, p.score);
    }
  } else {
    czd::write_detections_json(entries, a.out);
  }
  note("decoded " + std::to_string(peaks.size()) + " peaks");
  return 0;
}

// --- lsm ---

struct LsmArgs {
  std::string heatmap_path;
  std::string grid = "16x10";
  int top_k = 15;
  int k = 2;
  double threshold = 0.1;
  double enlarge = 1.2;
  std::string out;
};

int cmd_lsm(const LsmArgs& a) {
  auto [cols, rows] = parse_grid(a.grid);
  czd::LsmConfig cfg;
  cfg.grid_cols = cols;
  cfg.grid_rows = rows;
  cfg.top_k = std::min(a.top_k, cols * rows);
  cfg.max_crops = a.k;
  cfg.threshold = a.threshold;
  cfg.enlarge = a.enlarge;
  czd::Heatmap hm = czd::read_heatmap(a.heatmap_path);
  std::vector<czd::ClusterRegion> regions = czd::lsm_pipeline(hm, cfg);
  czd::write_regions_json(regions, a.out);
  note("selected " + std::to_string(regions.size()) + " regions");
  return 0;
}

// --- fuse ---

struct FuseArgs {
  std::string global_path;
  std::string regions_path;
  std::vector<std::string> crop_det_paths;
  std::string size = "1024x640";
  std::string out;
};

int cmd_fuse(const FuseArgs& a) {
  auto [w, h] = parse_size(a.size);
  std::vector<czd::DetectionEntry> global_entries =
      czd::read_detections_json(a.global_path);
  std::vector<czd::ClusterRegion> regions =
      czd::read_regions_json(a.regions_path);
  if (regions.size() != a.crop_det_paths.size()) {
    std::cerr << "czd: fuse needs one --crop-dets file per region ("
              << regions.size() << " regions, " << a.crop_det_paths.size()
              << " files)\n";
    return 2;
  }
  std::vector<czd::Detection> global_dets;
  for (const czd::DetectionEntry& e : global_entries) {
    global_dets.push_back(e.detection);
  }
  std::vector<czd::CropResult> crops;
  for (std::size_t i = 0; i < regions.size(); ++i) {
    czd::CropResult cr;
    cr.view = czd::crop_and_rescale(regions[i], w, h);
    for (const czd::DetectionEntry& e :
         czd::read_detections_json(a.crop_det_paths[i])) {
      cr.detections.push_back(e.detection);
    }
    crops.push_back(std::move(cr));
  }
  std::vector<czd::Detection> fused = czd::fuse(global_dets, crops);
  std::vector<czd::DetectionEntry> out_entries;
  for (const czd::Detection& d : fused) {
    out_entries.push_back(czd::DetectionEntry{0, d});
  }
  czd::write_detections_json(out_entries, a.out);
  note("fused to " + std::to_string(fused.size()) + " detections");
  return 0;
}

// --- eval ---

struct EvalArgs {
  std::vector<std::string> gt_paths;
  std::vector<std::string> det_paths;
  int max_dets = 500;
  std::string out;
};

int cmd_eval(const EvalArgs& a) {
  if (a.gt_paths.size() != a.det_paths.size()) {
    std::cerr << "czd: eval needs --gt and --dets in matching pairs\n";
    return 2;
  }
  std::vector<czd::ImageEval> images;
  for (std::size_t i = 0; i < a.gt_paths.size(); ++i) {
    czd::ImageEval img;
    for (const czd::AnnotationRecord& rec :
         czd::read_annotations(a.gt_paths[i])) {
      img.ground_truths.push_back(czd::to_ground_truth(rec));
    }
    for (const czd::DetectionEntry& e :
         czd::read_detections_json(a.det_paths[i])) {
      img.detections.push_back(e.detection);
    }
    images.push_back(std::move(img));
  }
  czd::EvalConfig cfg;
  cfg.max_detections_per_image = a.max_dets;
  czd::EvalReport report = czd::evaluate(images, cfg);
  print_report_table(report);
  if (!a.out.empty()) {
    czd::atomic_write(a.out, report_to_json(report).dump(2));
  }
  return 0;
}

// --- scene flags shared by synth and bench ---

void add_scene_flags(CLI::App* cmd, czd::SceneConfig& scene,
                     std::string& scene_size) {
  cmd->add_option("--image-size", scene_size, "scene canvas as WxH")
      ->capture_default_str();
  cmd->add_option("--clusters", scene.n_clusters, "number of object clusters")
      ->capture_default_str();
  cmd->add_option("--cluster-spread", scene.cluster_spread,
                  "Gaussian scatter of cluster members, pixels")
      ->capture_default_str();
  cmd->add_option("--cluster-min", scene.min_cluster_objects,
                  "minimum objects per cluster")
      ->capture_default_str();
  cmd->add_option("--cluster-max", scene.max_cluster_objects,
                  "maximum objects per cluster")
      ->capture_default_str();
  cmd->add_option("--sparse", scene.n_sparse, "sporadic singleton objects")
      ->capture_default_str();
  cmd->add_option("--small-min", scene.small_min_size,
                  "smallest small-object side, pixels")
      ->capture_default_str();
  cmd->add_option("--small-max", scene.small_max_size,
                  "largest small-object side, pixels")
      ->capture_default_str();
  cmd->add_option("--big-min", scene.big_min_size,
                  "smallest large-object side, pixels")
      ->capture_default_str();
  cmd->add_option("--big-max", scene.big_max_size,
                  "largest large-object side, pixels")
      ->capture_default_str();
  cmd->add_option("--small-share", scene.small_share,
                  "probability an object is small")
      ->capture_default_str();
  cmd->add_option("--categories", scene.categories, "category count (1-based)")
      ->capture_default_str();
}

// --- synth ---

struct SynthArgs {
  std::uint64_t seed = 0;
  int scenes = 1;
  std::string out_dir;
};

int cmd_synth(const SynthArgs& a, czd::SceneConfig scene,
              const std::string& scene_size) {
  auto [w, h] = parse_size(scene_size);
  scene.width = w;
  scene.height = h;
  std::filesystem::create_directories(a.out_dir);
  for (int i = 0; i < a.scenes; ++i) {
    scene.seed = a.seed + static_cast<std::uint64_t>(i);
    std::vector<czd::GroundTruth> gts = czd::generate_scene(scene);
    std::vector<czd::AnnotationRecord> records;
    for (const czd::GroundTruth& gt : gts) {
      records.push_back(czd::from_ground_truth(gt));
    }
    char name[32];
    std::snprintf(name, sizeof name, "scene_%04d.txt", i);
    czd::write_annotations(records,
                           std::filesystem::path(a.out_dir) / name);
  }
  note("wrote " + std::to_string(a.scenes) + " scenes to " + a.out_dir);
  return 0;
}

// --- bench ---

struct BenchArgs {
  std::string mode = "lsm";
  int k = 2;
  std::uint64_t seed = 0;
  int scenes = 20;
  int uniform_cols = 3;
  int uniform_rows = 2;
  int top_k = 15;
  double threshold = 0.1;
  double enlarge = 1.2;
  std::string grid = "16x10";
  std::string detector_size = "1024x640";
  double size_floor = 16.0;
  double noise_coeff = 2.0;
  std::string report_path;
};

int cmd_bench(const BenchArgs& a, czd::SceneConfig scene,
              const std::string& scene_size) {
  auto [sw, sh] = parse_size(scene_size);
  scene.width = sw;
  scene.height = sh;
  czd::PipelineConfig pipe;
  if (a.mode == "global") {
    pipe.mode = czd::PipelineMode::kGlobalOnly;
  } else if (a.mode == "uniform") {
    pipe.mode = czd::PipelineMode::kUniformCrops;
  } else if (a.mode == "lsm") {
    pipe.mode = czd::PipelineMode::kClusterCrops;
  } else {
    std::cerr << "czd: unknown --mode '" << a.mode
              << "' (want global, uniform, or lsm)\n";
    return 2;
  }
  pipe.uniform_cols = a.uniform_cols;
  pipe.uniform_rows = a.uniform_rows;
  auto [gc, gr] = parse_grid(a.grid);
  pipe.lsm.grid_cols = gc;
  pipe.lsm.grid_rows = gr;
  pipe.lsm.top_k = std::min(a.top_k, gc * gr);
  pipe.lsm.max_crops = a.k;
  pipe.lsm.threshold = a.threshold;
  pipe.lsm.enlarge = a.enlarge;
  auto [dw, dh] = parse_size(a.detector_size);
  pipe.detector_width = dw;
  pipe.detector_height = dh;
  pipe.detector.size_floor = a.size_floor;
  pipe.detector.noise_coeff = a.noise_coeff;
  pipe.detector.seed = a.seed;

  // Mean over scenes, skipping scenes where a bucket is undefined.
  auto add = [](double& sum, int& n, double v) {
    if (v != czd::kUndefinedAp) {
      sum += v;
      ++n;
    }
  };
  double s_ap = 0, s_ap50 = 0, s_ap75 = 0, s_small = 0, s_medium = 0,
         s_large = 0;
  int n_ap = 0, n_ap50 = 0, n_ap75 = 0, n_small = 0, n_medium = 0,
      n_large = 0;
  long total_passes = 0, total_regions = 0;
  for (int i = 0; i < a.scenes; ++i) {
    scene.seed = a.seed + static_cast<std::uint64_t>(i);
    std::vector<czd::GroundTruth> gts = czd::generate_scene(scene);
    czd::RunResult run = czd::run_pipeline(gts, scene, pipe);
    add(s_ap, n_ap, run.report.ap);
    add(s_ap50, n_ap50, run.report.ap50);
    add(s_ap75, n_ap75, run.report.ap75);
    add(s_small, n_small, run.report.ap_small);
    add(s_medium, n_medium, run.report.ap_medium);
    add(s_large, n_large, run.report.ap_large);
    total_passes += run.detector_passes;
    total_regions += static_cast<long>(run.regions.size());
  }
  auto mean = [](double sum, int n) {
    return n > 0 ? sum / n : czd::kUndefinedAp;
  };
  json report{{"mode", a.mode},
              {"scenes", a.scenes},
              {"seed", a.seed},
              {"k", a.k},
              {"mean_ap", mean(s_ap, n_ap)},
              {"mean_ap50", mean(s_ap50, n_ap50)},
              {"mean_ap75", mean(s_ap75, n_ap75)},
              {"mean_ap_small", mean(s_small, n_small)},
              {"mean_ap_medium", mean(s_medium, n_medium)},
              {"mean_ap_large", mean(s_large, n_large)},
              {"total_detector_passes", total_passes},
              {"mean_detector_passes",
               a.scenes > 0 ? static_cast<double>(total_passes) / a.scenes
                            : 0.0},
              {"total_regions", total_regions}};
  std::string text = report.dump(2);
  if (a.report_path.empty()) {
    std::printf("%s\n", text.c_str());
  } else {
    czd::atomic_write(a.report_path, text);
  }
  return 0;
}

// --- plot ---

struct PlotArgs {
  std::string image_size = "1536x960";
  std::string regions_path;
  std::string dets_path;
  std::string out;
};

std::string svg_escape_free_color(int category) {
  static const char* kPalette[] = {"#888888", "#d62728", "#1f77b4",
                                   "#2ca02c", "#9467bd", "#ff7f0e",
                                   "#8c564b", "#e377c2", "#17becf"};
  int n = static_cast<int>(std::size(kPalette));
  int idx = category % n;
  if (idx < 0) idx += n;
  return kPalette[idx];
}

int cmd_plot(const PlotArgs& a) {
  auto [w, h] = parse_size(a.image_size);
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
      << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << " " << h
      << "\">\n";
  svg << "  <rect x=\"0\" y=\"0\" width=\"" << w << "\" height=\"" << h
      << "\" fill=\"#ffffff\" stroke=\"#000000\"/>\n";
  if (!a.regions_path.empty()) {
    for (const czd::ClusterRegion& r : czd::read_regions_json(a.regions_path)) {
      svg << "  <rect x=\"" << r.rect.left << "\" y=\"" << r.rect.top
          << "\" width=\"" << r.rect.width << "\" height=\"" << r.rect.height
          << "\" fill=\"#ffcc00\" fill-opacity=\"0.15\" stroke=\"#cc8800\""
          << " stroke-width=\"3\"/>\n";
    }
  }
  if (!a.dets_path.empty()) {
    for (const czd::DetectionEntry& e :
         czd::read_detections_json(a.dets_path)) {
      const czd::Box& b = e.detection.box;
      svg << "  <rect x=\"" << b.left() << "\" y=\"" << b.top()
          << "\" width=\"" << b.w << "\" height=\"" << b.h
          << "\" fill=\"none\" stroke=\""
          << svg_escape_free_color(e.detection.category)
          << "\" stroke-width=\"1.5\" stroke-opacity=\""
          << std::max(0.25, e.detection.score) << "\"/>\n";
    }
  }
  svg << "</svg>\n";
  czd::atomic_write(a.out, svg.str());
  note("wrote plot " + a.out);
  return 0;
}

int io_error_code(const IoError& e) {
  return e.kind() == IoError::Kind::kFile ? 3 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cluster-guided tiny-object detection toolkit"};
  app.require_subcommand(1);

  EncodeArgs enc;
  CLI::App* enc_cmd =
      app.add_subcommand("encode", "annotations -> Gaussian-blob heatmap");
  enc_cmd->add_option("--ann", enc.ann_path, "annotation csv path")
      ->required();
  enc_cmd->add_option("--size", enc.size, "heatmap canvas as WxH")
      ->capture_default_str();
  enc_cmd->add_option("--channels", enc.channels,
                      "channel count; 0 derives max category + 1")
      ->capture_default_str();
  enc_cmd->add_option("--out", enc.out, "output heatmap path")->required();

  DecodeArgs dec;
  CLI::App* dec_cmd =
      app.add_subcommand("decode", "heatmap -> peak detections");
  dec_cmd->add_option("--heatmap", dec.heatmap_path, "input heatmap path")
      ->required();
  dec_cmd->add_option("--top-n", dec.top_n, "peaks kept")
      ->capture_default_str();
  dec_cmd->add_option("--smooth-sigma", dec.smooth_sigma,
                      "Gaussian pre-filter sigma; 0 disables")
      ->capture_default_str();
  dec_cmd->add_option("--out", dec.out,
                      "detections json path (stdout lines when omitted)");

  LsmArgs lsm;
  CLI::App* lsm_cmd =
      app.add_subcommand("lsm", "heatmap -> cluster crop regions");
  lsm_cmd->add_option("--heatmap", lsm.heatmap_path, "input heatmap path")
      ->required();
  lsm_cmd->add_option("--grid", lsm.grid, "density grid as CxR")
      ->capture_default_str();
  lsm_cmd->add_option("--top-k", lsm.top_k, "dense cells considered")
      ->capture_default_str();
  lsm_cmd->add_option("--k", lsm.k, "crop regions kept")
      ->capture_default_str();
  lsm_cmd->add_option("--threshold", lsm.threshold, "binarization cut")
      ->capture_default_str();
  lsm_cmd->add_option("--enlarge", lsm.enlarge, "region enlargement factor")
      ->capture_default_str();
  lsm_cmd->add_option("--out", lsm.out, "output regions json path")
      ->required();

  FuseArgs fuse;
  CLI::App* fuse_cmd = app.add_subcommand(
      "fuse", "merge global and per-crop detections without NMS");
  fuse_cmd->add_option("--global", fuse.global_path,
                       "global detections json path")
      ->required();
  fuse_cmd->add_option("--regions", fuse.regions_path,
                       "crop regions json path")
      ->required();
  fuse_cmd
      ->add_option("--crop-dets", fuse.crop_det_paths,
                   "per-crop detections json, one per region in order")
      ->expected(-1);
  fuse_cmd->add_option("--size", fuse.size, "detector canvas as WxH")
      ->capture_default_str();
  fuse_cmd->add_option("--out", fuse.out, "output detections json path")
      ->required();

  EvalArgs eval;
  CLI::App* eval_cmd =
      app.add_subcommand("eval", "COCO-style AP report");
  eval_cmd
      ->add_option("--gt", eval.gt_paths,
                   "ground-truth annotation csv (repeat per image)")
      ->required();
  eval_cmd
      ->add_option("--dets", eval.det_paths,
                   "detections json (repeat per image)")
      ->required();
  eval_cmd->add_option("--max-dets", eval.max_dets,
                       "detections kept per image")
      ->capture_default_str();
  eval_cmd->add_option("--out", eval.out, "report json path (optional)");

  SynthArgs synth;
  czd::SceneConfig synth_scene;
  std::string synth_size = "1536x960";
  CLI::App* synth_cmd = app.add_subcommand(
      "synth", "generate clustered synthetic scenes as annotation files");
  synth_cmd->add_option("--seed", synth.seed, "base scene seed")
      ->capture_default_str();
  synth_cmd->add_option("--scenes", synth.scenes, "number of scenes")
      ->capture_default_str();
  synth_cmd->add_option("--out-dir", synth.out_dir, "output directory")
      ->required();
  add_scene_flags(synth_cmd, synth_scene, synth_size);

  BenchArgs bench;
  czd::SceneConfig bench_scene;
  std::string bench_size = "1536x960";
  CLI::App* bench_cmd = app.add_subcommand(
      "bench", "run the synthetic pipeline and report mean AP");
  bench_cmd->add_option("--mode", bench.mode, "global, uniform, or lsm")
      ->capture_default_str();
  bench_cmd->add_option("--k", bench.k, "crop regions kept (lsm mode)")
      ->capture_default_str();
  bench_cmd->add_option("--seed", bench.seed, "base scene/detector seed")
      ->capture_default_str();
  bench_cmd->add_option("--scenes", bench.scenes, "number of scenes")
      ->capture_default_str();
  bench_cmd->add_option("--uniform-cols", bench.uniform_cols,
                        "uniform tiling columns")
      ->capture_default_str();
  bench_cmd->add_option("--uniform-rows", bench.uniform_rows,
                        "uniform tiling rows")
      ->capture_default_str();
  bench_cmd->add_option("--grid", bench.grid, "density grid as CxR")
      ->capture_default_str();
  bench_cmd->add_option("--top-k", bench.top_k, "dense cells considered")
      ->capture_default_str();
  bench_cmd->add_option("--threshold", bench.threshold, "binarization cut")
      ->capture_default_str();
  bench_cmd->add_option("--enlarge", bench.enlarge,
                        "region enlargement factor")
      ->capture_default_str();
  bench_cmd->add_option("--detector-size", bench.detector_size,
                        "detector canvas as WxH")
      ->capture_default_str();
  bench_cmd->add_option("--size-floor", bench.size_floor,
                        "detector size floor s0, pixels")
      ->capture_default_str();
  bench_cmd->add_option("--noise-coeff", bench.noise_coeff,
                        "detector localization noise coefficient")
      ->capture_default_str();
  bench_cmd->add_option("--report", bench.report_path,
                        "report json path (stdout when omitted)");
  add_scene_flags(bench_cmd, bench_scene, bench_size);

  PlotArgs plot;
  CLI::App* plot_cmd = app.add_subcommand(
      "plot", "render regions and detections to a standalone svg");
  plot_cmd->add_option("--image-size", plot.image_size, "canvas as WxH")
      ->capture_default_str();
  plot_cmd->add_option("--regions", plot.regions_path,
                       "regions json path (optional)");
  plot_cmd->add_option("--dets", plot.dets_path,
                       "detections json path (optional)");
  plot_cmd->add_option("--out", plot.out, "output svg path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (enc_cmd->parsed()) return cmd_encode(enc);
    if (dec_cmd->parsed()) return cmd_decode(dec);
    if (lsm_cmd->parsed()) return cmd_lsm(lsm);
    if (fuse_cmd->parsed()) return cmd_fuse(fuse);
    if (eval_cmd->parsed()) return cmd_eval(eval);
    if (synth_cmd->parsed()) return cmd_synth(synth, synth_scene, synth_size);
    if (bench_cmd->parsed()) {
      return cmd_bench(bench, bench_scene, bench_size);
    }
    if (plot_cmd->parsed()) return cmd_plot(plot);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "czd: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "czd: " << e.what() << "\n";
    return io_error_code(e);
  } catch (const std::exception& e) {
    std::cerr << "czd: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
