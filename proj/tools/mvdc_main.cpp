#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mvdc/consistency.hpp"
#include "mvdc/enhance.hpp"
#include "mvdc/error.hpp"
#include "mvdc/evalkit.hpp"
#include "mvdc/io_formats.hpp"
#include "mvdc/parallel.hpp"
#include "mvdc/synth.hpp"
#include "mvdc/warp.hpp"

namespace fs = std::filesystem;
using namespace mvdc;

namespace {

constexpr const char* kVersion = "mvdc 0.1.0";

std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

// Plain-text key-value record of the resolved run, written next to the
// outputs. Thread count is deliberately absent: outputs must not depend on it.
class Manifest {
 public:
  explicit Manifest(std::string subcommand) {
    add("subcommand", std::move(subcommand));
    add("version", kVersion);
  }
  void add(const std::string& key, std::string value) {
    lines_.push_back(key + " " + std::move(value));
  }
  void add(const std::string& key, double v) { add(key, fmt_g(v)); }
  void add(const std::string& key, int64_t v) { add(key, std::to_string(v)); }
  void add_paths(const std::string& key,
                 const std::vector<std::string>& paths) {
    for (size_t i = 0; i < paths.size(); ++i) {
      add(key + "_" + std::to_string(i), paths[i]);
    }
  }
  void write(const fs::path& path) const {
    std::string out;
    for (const std::string& l : lines_) out += l + "\n";
    write_file_bytes(path.string(), out);
  }

 private:
  std::vector<std::string> lines_;
};

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

const CameraParams& camera_by_id(const std::vector<CameraParams>& cams,
                                 const std::string& id) {
  for (const CameraParams& c : cams) {
    if (c.id == id) return c;
  }
  throw ConfigError("camera id '" + id + "' not found in camera file");
}

// Depth positionals pair up with cameras by file order unless --views names
// the camera id for each input explicitly.
std::vector<DepthMap> load_depths(const std::vector<std::string>& paths,
                                  const std::vector<CameraParams>& cams,
                                  const std::string& views_csv) {
  std::vector<DepthMap> maps;
  if (!views_csv.empty()) {
    std::vector<std::string> ids = split_csv(views_csv);
    if (ids.size() != paths.size()) {
      throw ConfigError("--views must name one camera id per depth input");
    }
    for (size_t i = 0; i < paths.size(); ++i) {
      maps.push_back({read_pgm(paths[i]), camera_by_id(cams, ids[i])});
    }
  } else {
    if (cams.size() < paths.size()) {
      throw ConfigError("camera file has fewer cameras than depth inputs");
    }
    for (size_t i = 0; i < paths.size(); ++i) {
      maps.push_back({read_pgm(paths[i]), cams[i]});
    }
  }
  return maps;
}

CameraParams pose_camera(const std::vector<CameraParams>& cams,
                         const std::string& id, double pose_x) {
  // A 1D-parallel pose borrows intrinsics and depth range from the first
  // listed camera.
  const CameraParams& ref = cams.front();
  CameraParams cam = ref;
  cam.id = id;
  cam.R = {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  cam.t = {-pose_x, 0.0, 0.0};
  return cam;
}

std::string weighting_name(Weighting w) {
  return w == Weighting::Uniform ? "uniform" : "inverse-baseline";
}

Weighting parse_weighting(const std::string& s) {
  if (s == "uniform") return Weighting::Uniform;
  if (s == "inverse-baseline") return Weighting::InverseBaseline;
  throw ConfigError("unknown weighting '" + s + "'");
}

void write_consistency_outputs(const ConsistencyMap& map, const fs::path& dir) {
  write_pgm((dir / "energy.pgm").string(), energy_image(map));
  write_pgm((dir / "status.pgm").string(), status_image(map));
  std::string sidecar(reinterpret_cast<const char*>(map.subset.data.data()),
                      map.subset.size());
  write_file_bytes((dir / "subsets.bin").string(), sidecar);
}

std::string consistency_summary(const ConsistencyMap& map) {
  const CovarianceModel& m = map.model;
  std::ostringstream ss;
  ss << "k " << m.k << "\n";
  ss << "samples " << m.samples << "\n";
  ss << "sigma2 " << fmt_g(m.sigma2) << "\n";
  ss << "rho " << fmt_g(m.rho) << "\n";
  ss << "degenerate " << (m.degenerate ? 1 : 0) << "\n";
  for (int i = 0; i < m.k; ++i) {
    ss << "lambda_model_" << i << " " << fmt_g(m.lambda_model[i]) << "\n";
  }
  for (int i = 0; i < m.k; ++i) {
    ss << "lambda_numeric_" << i << " " << fmt_g(m.lambda_numeric[i]) << "\n";
  }
  std::array<int64_t, 9> by_size{};
  int64_t extreme = 0, insufficient = 0, total = 0;
  for (size_t p = 0; p < map.status.size(); ++p) {
    ++total;
    switch (static_cast<PixelStatus>(map.status.data[p])) {
      case PixelStatus::Accepted: {
        int m_acc = __builtin_popcount(map.subset.data[p]);
        ++by_size[m_acc];
        break;
      }
      case PixelStatus::ExtremeError:
        ++extreme;
        break;
      case PixelStatus::InsufficientData:
        ++insufficient;
        break;
    }
  }
  for (int s = 2; s <= m.k; ++s) {
    ss << "accepted_m" << s << " "
       << fmt_g(static_cast<double>(by_size[s]) / total) << "\n";
  }
  ss << "extreme_error " << fmt_g(static_cast<double>(extreme) / total)
     << "\n";
  ss << "insufficient_data "
     << fmt_g(static_cast<double>(insufficient) / total) << "\n";
  return ss.str();
}

struct GenSceneArgs {
  std::string config;
  std::string out;
  std::string poses;
};

int run_gen_scene(const GenSceneArgs& a) {
  SceneConfig cfg = load_scene_config(a.config);
  fs::create_directories(a.out);
  std::vector<int> poses;
  if (a.poses.empty()) {
    for (int i = 0; i < cfg.camera_count; ++i) poses.push_back(i);
  } else {
    for (const std::string& s : split_csv(a.poses)) poses.push_back(std::stoi(s));
  }
  std::vector<CameraParams> cams;
  std::vector<std::string> written;
  for (int idx : poses) {
    CameraParams cam = scene_camera(cfg, idx);
    RenderedView view = gen_scene(cfg, scene_pose_x(cfg, idx));
    std::string tex = (fs::path(a.out) / ("tex_" + cam.id + ".ppm")).string();
    std::string dep = (fs::path(a.out) / ("dep_" + cam.id + ".pgm")).string();
    write_ppm(tex, view.texture);
    write_pgm(dep, view.depth);
    written.push_back(tex);
    written.push_back(dep);
    cams.push_back(std::move(cam));
  }
  std::string cam_path = (fs::path(a.out) / "cameras.txt").string();
  write_cameras(cam_path, cams);

  Manifest man("gen-scene");
  man.add("config", a.config);
  man.add("out", a.out);
  std::string pose_list;
  for (size_t i = 0; i < poses.size(); ++i) {
    pose_list += (i ? "," : "") + std::to_string(poses[i]);
  }
  man.add("poses", pose_list);
  man.add("cameras_file", cam_path);
  man.add_paths("output", written);
  man.write(fs::path(a.out) / "manifest.txt");
  return 0;
}

struct TestArgs {
  std::vector<std::string> depths;
  std::string cameras;
  std::string views;
  std::string principal;
  std::optional<double> pose_x;
  double alpha = 0.5;
  std::string out;
};

int run_test(const TestArgs& a) {
  std::vector<CameraParams> cams = read_cameras(a.cameras);
  std::vector<DepthMap> maps = load_depths(a.depths, cams, a.views);
  CameraParams principal =
      a.pose_x ? pose_camera(cams, "virtual", *a.pose_x)
               : camera_by_id(cams, a.principal);
  HypothesisStack stack = build_hypothesis_stack(maps, principal);
  ConsistencyMap map = test_image(stack, a.alpha);

  fs::create_directories(a.out);
  fs::path dir(a.out);
  write_consistency_outputs(map, dir);
  write_file_bytes((dir / "summary.txt").string(), consistency_summary(map));

  Manifest man("test");
  man.add_paths("depth", a.depths);
  man.add("cameras", a.cameras);
  if (!a.views.empty()) man.add("views", a.views);
  if (a.pose_x) {
    man.add("pose_x", *a.pose_x);
  } else {
    man.add("principal", a.principal);
  }
  man.add("alpha", a.alpha);
  man.add("out", a.out);
  man.write(dir / "manifest.txt");
  return 0;
}

struct EnhanceArgs {
  std::vector<std::string> depths;
  std::string cameras;
  std::string views;
  double alpha = 0.5;
  double stop_rel = 0.01;
  int max_sweeps = 10;
  std::string weighting = "uniform";
  std::string out;
};

int run_enhance(const EnhanceArgs& a) {
  std::vector<CameraParams> cams = read_cameras(a.cameras);
  std::vector<DepthMap> maps = load_depths(a.depths, cams, a.views);
  EnhanceConfig cfg;
  cfg.alpha_weight = a.alpha;
  cfg.stop_rel = a.stop_rel;
  cfg.max_sweeps = a.max_sweeps;
  cfg.weighting = parse_weighting(a.weighting);
  EnhanceResult res = enhance_depth_maps(maps, cfg);

  fs::create_directories(a.out);
  fs::path dir(a.out);
  std::vector<std::string> written;
  for (size_t i = 0; i < res.maps.size(); ++i) {
    const std::string& id = res.maps[i].cam.id;
    std::string dep = (dir / ("enhanced_" + id + ".pgm")).string();
    std::string un = (dir / ("unresolved_" + id + ".pgm")).string();
    write_pgm(dep, res.maps[i].grid);
    write_pgm(un, res.unresolved[i]);
    written.push_back(dep);
    written.push_back(un);
  }
  std::string log;
  for (const SweepLogEntry& e : res.log) {
    std::string line = "sweep " + std::to_string(e.sweep) + " energy " +
                       fmt_fixed(e.mean_energy) + " accepted " +
                       fmt_fixed(e.accepted_fraction) + " unresolved " +
                       std::to_string(e.unresolved) + "\n";
    std::cout << line;
    log += line;
  }
  write_file_bytes((dir / "sweep_log.txt").string(), log);

  Manifest man("enhance");
  man.add_paths("depth", a.depths);
  man.add("cameras", a.cameras);
  if (!a.views.empty()) man.add("views", a.views);
  man.add("alpha", a.alpha);
  man.add("stop_rel", a.stop_rel);
  man.add("max_sweeps", static_cast<int64_t>(a.max_sweeps));
  man.add("weighting", a.weighting);
  man.add("out", a.out);
  man.add_paths("output", written);
  man.write(dir / "manifest.txt");
  return 0;
}

struct SynthArgs {
  std::vector<std::string> views;  // alternating texture, depth
  std::string cameras;
  std::string view_ids;
  std::string virtual_id;
  std::optional<double> virtual_x;
  double alpha = 0.5;
  double tau_color = 20.0;
  std::string weighting = "uniform";
  int inpaint_iters = 2000;
  bool baseline = false;
  std::string gt;
  std::string out;
};

int run_synthesize(const SynthArgs& a) {
  if (a.views.size() < 4 || a.views.size() % 2 != 0) {
    throw ConfigError(
        "synthesize expects texture/depth path pairs (at least 2 views)");
  }
  std::vector<CameraParams> cams = read_cameras(a.cameras);
  std::vector<std::string> tex_paths, dep_paths;
  for (size_t i = 0; i < a.views.size(); i += 2) {
    tex_paths.push_back(a.views[i]);
    dep_paths.push_back(a.views[i + 1]);
  }
  std::vector<DepthMap> depths = load_depths(dep_paths, cams, a.view_ids);
  std::vector<TextureImage> textures;
  for (const std::string& p : tex_paths) textures.push_back(read_ppm(p));

  CameraParams virt = a.virtual_x
                          ? pose_camera(cams, "virtual", *a.virtual_x)
                          : camera_by_id(cams, a.virtual_id);

  SynthConfig cfg;
  cfg.alpha_weight = a.alpha;
  cfg.tau_color = a.tau_color;
  cfg.weighting = parse_weighting(a.weighting);
  cfg.inpaint_iters = a.inpaint_iters;

  SynthesisResult res;
  if (a.baseline) {
    if (depths.size() != 2) {
      throw ConfigError("--baseline-two-view needs exactly 2 views");
    }
    res = baseline_two_view(depths[0], textures[0], depths[1], textures[1],
                            virt, cfg);
  } else {
    res = synthesize_view(depths, textures, virt, cfg);
  }

  fs::create_directories(a.out);
  fs::path dir(a.out);
  write_ppm((dir / "synth.ppm").string(), res.image);
  write_pgm((dir / "holes.pgm").string(), res.holes);

  if (!a.gt.empty()) {
    TextureImage gt = read_ppm(a.gt);
    std::cout << "METRIC psnr " << fmt_fixed(psnr(res.image, gt)) << "\n";
    std::cout << "METRIC masked_psnr "
              << fmt_fixed(mask_aware_psnr(res.image, gt, res.holes)) << "\n";
  }

  Manifest man("synthesize");
  man.add_paths("texture", tex_paths);
  man.add_paths("depth", dep_paths);
  man.add("cameras", a.cameras);
  if (!a.view_ids.empty()) man.add("views", a.view_ids);
  if (a.virtual_x) {
    man.add("virtual_x", *a.virtual_x);
  } else {
    man.add("virtual_id", a.virtual_id);
  }
  man.add("alpha", a.alpha);
  man.add("tau_color", a.tau_color);
  man.add("weighting", a.weighting);
  man.add("inpaint_iters", static_cast<int64_t>(a.inpaint_iters));
  man.add("baseline_two_view", static_cast<int64_t>(a.baseline ? 1 : 0));
  if (!a.gt.empty()) man.add("gt", a.gt);
  man.add("out", a.out);
  man.write(dir / "manifest.txt");
  return 0;
}

struct EvalArgs {
  std::string a;
  std::string b;
  std::string mask;
};

int run_eval(const EvalArgs& args) {
  std::string ba = read_file_bytes(args.a);
  std::string bb = read_file_bytes(args.b);
  if (ba.size() < 2 || bb.size() < 2) throw ParseError("empty image", 0);
  if (ba[0] != 'P' || bb[0] != 'P' || ba[1] != bb[1]) {
    throw ConfigError("eval inputs must share the same PNM type");
  }
  double value;
  if (ba[1] == '6') {
    TextureImage ia = parse_ppm(ba);
    TextureImage ib = parse_ppm(bb);
    if (args.mask.empty()) {
      value = psnr(ia, ib);
    } else {
      value = mask_aware_psnr(ia, ib, read_pgm(args.mask));
    }
  } else if (ba[1] == '5') {
    Grid8 ia = parse_pgm(ba);
    Grid8 ib = parse_pgm(bb);
    if (args.mask.empty()) {
      value = psnr(ia, ib);
    } else {
      Grid8 mask = read_pgm(args.mask);
      if (!ia.same_size(ib) || !ia.same_size(mask)) {
        throw ConfigError("psnr: dimension mismatch");
      }
      uint64_t sse = 0;
      size_t n = 0;
      for (size_t p = 0; p < ia.size(); ++p) {
        if (mask.data[p] != 0) continue;
        int d = static_cast<int>(ia.data[p]) - ib.data[p];
        sse += static_cast<uint64_t>(d * d);
        ++n;
      }
      if (n == 0) throw DomainError("psnr: empty evaluation set");
      if (sse == 0) {
        value = 99.0;
      } else {
        double mse = static_cast<double>(sse) / n;
        value = 10.0 * std::log10(255.0 * 255.0 / mse);
        if (value > 99.0) value = 99.0;
      }
    }
  } else {
    throw ConfigError("eval supports P5/P6 inputs only");
  }
  std::cout << "METRIC psnr " << fmt_fixed(value) << "\n";
  return 0;
}

struct AddNoiseArgs {
  std::string depth;
  double sigma2 = 0.0;
  uint64_t seed = 1;
  std::string out;
};

int run_add_noise(const AddNoiseArgs& a) {
  Grid8 depth = read_pgm(a.depth);
  Grid8 noisy = add_awgn(depth, a.sigma2, a.seed);
  write_pgm(a.out, noisy);

  Manifest man("add-noise");
  man.add("depth", a.depth);
  man.add("sigma2", a.sigma2);
  man.add("seed", static_cast<int64_t>(a.seed));
  man.add("out", a.out);
  man.write(a.out + ".manifest");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiview depth consistency testing, enhancement and view "
               "synthesis"};
  app.require_subcommand(1);
  int threads = 1;
  app.add_option("--threads", threads, "Worker thread count")
      ->check(CLI::PositiveNumber);

  GenSceneArgs gs;
  CLI::App* c_gs = app.add_subcommand("gen-scene", "Render a synthetic rig");
  c_gs->add_option("--config", gs.config, "Scene config file")->required();
  c_gs->add_option("--out", gs.out, "Output directory")->required();
  c_gs->add_option("--poses", gs.poses, "Comma-separated camera indices");

  TestArgs ts;
  CLI::App* c_ts = app.add_subcommand("test", "Consistency-test depth maps");
  c_ts->add_option("depths", ts.depths, "Depth map PGMs")->required();
  c_ts->add_option("--cameras", ts.cameras, "Camera file")->required();
  c_ts->add_option("--views", ts.views, "Camera id per depth input");
  auto* opt_pid = c_ts->add_option("--principal", ts.principal,
                                   "Principal camera id");
  double ts_pose = 0.0;
  auto* opt_px =
      c_ts->add_option("--pose-x", ts_pose, "Principal pose x translation");
  c_ts->add_option("--alpha", ts.alpha, "Threshold weight in [0,1]");
  c_ts->add_option("--out", ts.out, "Output directory")->required();

  EnhanceArgs en;
  CLI::App* c_en = app.add_subcommand("enhance", "Iteratively enhance depth "
                                                 "maps");
  c_en->add_option("depths", en.depths, "Depth map PGMs")->required();
  c_en->add_option("--cameras", en.cameras, "Camera file")->required();
  c_en->add_option("--views", en.views, "Camera id per depth input");
  c_en->add_option("--alpha", en.alpha, "Threshold weight in [0,1]");
  c_en->add_option("--stop-rel", en.stop_rel, "Relative energy stop");
  c_en->add_option("--max-sweeps", en.max_sweeps, "Sweep cap");
  c_en->add_option("--weighting", en.weighting,
                   "uniform | inverse-baseline");
  c_en->add_option("--out", en.out, "Output directory")->required();

  SynthArgs sy;
  CLI::App* c_sy = app.add_subcommand("synthesize", "Render a virtual view");
  c_sy->add_option("views", sy.views, "texture.ppm depth.pgm pairs")
      ->required();
  c_sy->add_option("--cameras", sy.cameras, "Camera file")->required();
  c_sy->add_option("--view-ids", sy.view_ids, "Camera id per view pair");
  auto* opt_vid =
      c_sy->add_option("--virtual-id", sy.virtual_id, "Virtual camera id");
  double sy_pose = 0.0;
  auto* opt_vx =
      c_sy->add_option("--virtual-x", sy_pose, "Virtual pose x translation");
  c_sy->add_option("--alpha", sy.alpha, "Threshold weight in [0,1]");
  c_sy->add_option("--tau-color", sy.tau_color, "RGB similarity threshold");
  c_sy->add_option("--weighting", sy.weighting,
                   "uniform | inverse-baseline");
  c_sy->add_option("--inpaint-iters", sy.inpaint_iters,
                   "Diffusion iteration cap");
  c_sy->add_flag("--baseline-two-view", sy.baseline,
                 "Two-view reference synthesizer");
  c_sy->add_option("--gt", sy.gt, "Ground-truth PPM for METRIC output");
  c_sy->add_option("--out", sy.out, "Output directory")->required();

  EvalArgs ev;
  CLI::App* c_ev = app.add_subcommand("eval", "PSNR between two images");
  c_ev->add_option("a", ev.a, "First image")->required();
  c_ev->add_option("b", ev.b, "Second image")->required();
  c_ev->add_option("--mask", ev.mask, "Evaluate only where mask is 0");

  AddNoiseArgs an;
  CLI::App* c_an = app.add_subcommand("add-noise", "Add depth noise");
  c_an->add_option("depth", an.depth, "Depth map PGM")->required();
  c_an->add_option("--sigma2", an.sigma2,
                   "Noise variance on the normalized [0,1] scale")
      ->required();
  c_an->add_option("--seed", an.seed, "Noise seed");
  c_an->add_option("--out", an.out, "Output PGM path")->required();

  CLI11_PARSE(app, argc, argv);
  set_thread_count(threads);

  try {
    if (*c_gs) return run_gen_scene(gs);
    if (*c_ts) {
      if (static_cast<bool>(*opt_px) == static_cast<bool>(*opt_pid)) {
        throw ConfigError("give exactly one of --principal or --pose-x");
      }
      if (*opt_px) ts.pose_x = ts_pose;
      return run_test(ts);
    }
    if (*c_en) return run_enhance(en);
    if (*c_sy) {
      if (static_cast<bool>(*opt_vx) == static_cast<bool>(*opt_vid)) {
        throw ConfigError("give exactly one of --virtual-id or --virtual-x");
      }
      if (*opt_vx) sy.virtual_x = sy_pose;
      return run_synthesize(sy);
    }
    if (*c_ev) return run_eval(ev);
    if (*c_an) return run_add_noise(an);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
