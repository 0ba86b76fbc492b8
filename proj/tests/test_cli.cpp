#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "mvdc/evalkit.hpp"
#include "mvdc/io_formats.hpp"

using namespace mvdc;
namespace fs = std::filesystem;

namespace {

std::string cli() {
  const char* p = std::getenv("MVDC_CLI");
  REQUIRE_MESSAGE(p != nullptr, "MVDC_CLI must point at the binary");
  return p;
}

int run(const std::string& args, const std::string& log_prefix = "") {
  std::string redir = log_prefix.empty()
                          ? " >/dev/null 2>/dev/null"
                          : " >" + log_prefix + ".out 2>" + log_prefix +
                                ".err";
  int rc = std::system((cli() + " " + args + redir).c_str());
  return WEXITSTATUS(rc);
}

struct Workspace {
  fs::path root;
  explicit Workspace(const std::string& name) {
    root = fs::path("/tmp/mvdc_cli") / name;
    fs::remove_all(root);
    fs::create_directories(root);
  }
  std::string operator/(const std::string& leaf) const {
    return (root / leaf).string();
  }
};

std::string small_scene_config(const Workspace& ws) {
  SceneConfig cfg = stripes_scene();
  cfg.width = 192;
  cfg.height = 144;
  std::string path = ws / "scene.cfg";
  save_scene_config(cfg, path);
  return path;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("gen-scene writes the rig and a manifest") {
  Workspace ws("gen");
  std::string cfg = small_scene_config(ws);
  CHECK(run("gen-scene --config " + cfg + " --out " + (ws / "rig")) == 0);
  CHECK(fs::exists(ws.root / "rig/tex_cam0.ppm"));
  CHECK(fs::exists(ws.root / "rig/dep_cam2.pgm"));
  CHECK(fs::exists(ws.root / "rig/cameras.txt"));
  std::string man = read_file_bytes(ws / "rig/manifest.txt");
  CHECK(man.find("subcommand gen-scene") == 0);
  CHECK(man.find("threads") == std::string::npos);

  Grid8 dep = read_pgm(ws / "rig/dep_cam0.pgm");
  CHECK(dep.width == 192);
  CHECK(dep.height == 144);
}

TEST_CASE("reruns are byte-identical") {
  Workspace ws("rerun");
  std::string cfg = small_scene_config(ws);
  REQUIRE(run("gen-scene --config " + cfg + " --out " + (ws / "a")) == 0);
  REQUIRE(run("gen-scene --config " + cfg + " --out " + (ws / "b")) == 0);
  CHECK(read_file_bytes(ws / "a/tex_cam1.ppm") ==
        read_file_bytes(ws / "b/tex_cam1.ppm"));
  CHECK(read_file_bytes(ws / "a/dep_cam1.pgm") ==
        read_file_bytes(ws / "b/dep_cam1.pgm"));
  CHECK(read_file_bytes(ws / "a/cameras.txt") ==
        read_file_bytes(ws / "b/cameras.txt"));
}

TEST_CASE("full pipeline is thread-count invariant") {
  Workspace ws("threads");
  std::string cfg = small_scene_config(ws);
  REQUIRE(run("gen-scene --config " + cfg + " --out " + (ws / "rig")) == 0);
  std::string noise_args = " --sigma2 0.001 --seed 5 --out ";
  for (int c = 0; c < 3; ++c) {
    std::string d = (ws / "rig/dep_cam") + std::to_string(c) + ".pgm";
    REQUIRE(run("add-noise " + d + noise_args + (ws / "n") +
                std::to_string(c) + ".pgm") == 0);
  }
  std::string inputs = (ws / "n0.pgm") + " " + (ws / "n1.pgm") + " " +
                       (ws / "n2.pgm") + " --cameras " +
                       (ws / "rig/cameras.txt") + " --views cam0,cam1,cam2";
  for (int t : {1, 4, 8}) {
    std::string tag = std::to_string(t);
    REQUIRE(run("--threads " + tag + " test " + inputs + " --principal cam1" +
                " --out " + (ws / ("t" + tag))) == 0);
    REQUIRE(run("--threads " + tag + " enhance " + inputs + " --out " +
                (ws / ("e" + tag))) == 0);
  }
  // Manifests embed the output path, so they differ by construction here.
  for (const char* f : {"energy.pgm", "status.pgm", "subsets.bin",
                        "summary.txt"}) {
    CHECK(read_file_bytes(ws / ("t1/" + std::string(f))) ==
          read_file_bytes(ws / ("t4/" + std::string(f))));
    CHECK(read_file_bytes(ws / ("t1/" + std::string(f))) ==
          read_file_bytes(ws / ("t8/" + std::string(f))));
  }
  for (const char* f : {"enhanced_cam0.pgm", "unresolved_cam0.pgm",
                        "sweep_log.txt"}) {
    CHECK(read_file_bytes(ws / ("e1/" + std::string(f))) ==
          read_file_bytes(ws / ("e4/" + std::string(f))));
    CHECK(read_file_bytes(ws / ("e1/" + std::string(f))) ==
          read_file_bytes(ws / ("e8/" + std::string(f))));
  }
}

TEST_CASE("zero noise copies the depth map") {
  Workspace ws("zero");
  std::string cfg = small_scene_config(ws);
  REQUIRE(run("gen-scene --config " + cfg + " --out " + (ws / "rig")) == 0);
  REQUIRE(run("add-noise " + (ws / "rig/dep_cam0.pgm") +
              " --sigma2 0 --out " + (ws / "same.pgm")) == 0);
  CHECK(read_file_bytes(ws / "rig/dep_cam0.pgm") ==
        read_file_bytes(ws / "same.pgm"));
  CHECK(fs::exists(ws.root / "same.pgm.manifest"));
}

TEST_CASE("eval prints a metric line") {
  Workspace ws("eval");
  std::string cfg = small_scene_config(ws);
  REQUIRE(run("gen-scene --config " + cfg + " --out " + (ws / "rig")) == 0);
  std::string log = ws / "psnr";
  REQUIRE(run("eval " + (ws / "rig/tex_cam0.ppm") + " " +
              (ws / "rig/tex_cam0.ppm"),
              log) == 0);
  CHECK(read_file_bytes(log + ".out") == "METRIC psnr 99.000000\n");
}

TEST_CASE("synthesize against ground truth reports psnr") {
  Workspace ws("synth");
  std::string cfg = small_scene_config(ws);
  REQUIRE(run("gen-scene --config " + cfg + " --out " + (ws / "rig")) == 0);
  std::string log = ws / "synthlog";
  REQUIRE(run("synthesize " + (ws / "rig/tex_cam0.ppm") + " " +
              (ws / "rig/dep_cam0.pgm") + " " + (ws / "rig/tex_cam2.ppm") +
              " " + (ws / "rig/dep_cam2.pgm") + " --cameras " +
              (ws / "rig/cameras.txt") + " --view-ids cam0,cam2" +
              " --virtual-id cam1 --gt " + (ws / "rig/tex_cam1.ppm") +
              " --out " + (ws / "out"),
              log) == 0);
  CHECK(fs::exists(ws.root / "out/synth.ppm"));
  CHECK(fs::exists(ws.root / "out/holes.pgm"));
  std::string metrics = read_file_bytes(log + ".out");
  CHECK(metrics.find("METRIC psnr ") != std::string::npos);
}

TEST_CASE("errors exit nonzero with a single-line diagnostic") {
  Workspace ws("err");
  std::string log = ws / "bad";
  write_file_bytes(ws / "garbage.cfg", "nonsense 1\n");
  CHECK(run("gen-scene --config " + (ws / "garbage.cfg") + " --out " +
            (ws / "x"),
            log) == 1);
  std::string err = read_file_bytes(log + ".err");
  CHECK(err.rfind("error: ", 0) == 0);
  CHECK(std::count(err.begin(), err.end(), '\n') == 1);

  // Unknown camera id.
  std::string cfg = small_scene_config(ws);
  REQUIRE(run("gen-scene --config " + cfg + " --out " + (ws / "rig")) == 0);
  std::string log2 = ws / "badcam";
  CHECK(run("test " + (ws / "rig/dep_cam0.pgm") + " " +
            (ws / "rig/dep_cam1.pgm") + " --cameras " +
            (ws / "rig/cameras.txt") +
            " --views cam0,cam9 --principal cam1 --out " + (ws / "y"),
            log2) != 0);
  std::string err2 = read_file_bytes(log2 + ".err");
  CHECK(err2.find("cam9") != std::string::npos);

  // Missing input file.
  CHECK(run("eval " + (ws / "nope.pgm") + " " + (ws / "nope.pgm")) != 0);
}

}  // TEST_SUITE
