#include "corpus.hpp"

#include <atomic>
#include <fstream>
#include <random>
#include <sstream>
#include <unistd.h>

#include <nlohmann/json.hpp>

namespace vf_test {

namespace fs = std::filesystem;
using namespace viewfuse;

namespace {

const std::vector<std::string> kColors = {"red", "blue", "green", "yellow", "black", "white", "orange", "brown"};
const std::vector<std::string> kMaterials = {"wooden", "metal", "plastic", "ceramic", "leather", "stone"};
const std::vector<std::string> kNouns = {"chair", "lamp", "teapot", "bicycle", "guitar", "vase", "helmet",
                                         "backpack", "clock", "robot", "sofa", "kettle"};
const std::vector<std::string> kAlien = {"nebula", "galaxy", "comet", "orbit", "quasar", "pulsar",
                                         "meteor", "eclipse", "aurora", "cosmos"};

template <class Gen>
const std::string& pick(const std::vector<std::string>& from, Gen& gen) {
  return from[std::uniform_int_distribution<std::size_t>(0, from.size() - 1)(gen)];
}

}  // namespace

std::string synthetic_id(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "obj-%04zu", i);
  return buf;
}

std::vector<ObjectManifest> make_manifests(const CorpusShape& shape) {
  std::mt19937_64 gen(shape.seed);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  std::vector<ObjectManifest> out;
  for (std::size_t i = 0; i < shape.objects; ++i) {
    ObjectManifest m;
    m.object_id = synthetic_id(i);
    for (Viewpoint v : kAllViewpoints) {
      m.view_images[v] = "renders/" + m.object_id + "_" + std::string(to_string(v)) + ".png";
    }
    m.point_cloud_ref = "clouds/" + m.object_id + ".ply";
    for (std::size_t p = 0; p < shape.points_per_cloud; ++p) {
      m.point_cloud.points.push_back({coord(gen), coord(gen), coord(gen)});
    }
    const std::string truth = "A " + pick(kColors, gen) + " " + pick(kMaterials, gen) + " " + pick(kNouns, gen) + ".";
    m.metadata["mock.truth"] = truth;
    if (shape.misaligned.contains(i)) {
      m.metadata["mock.cloud_truth"] =
          pick(kAlien, gen) + " " + pick(kAlien, gen) + " " + pick(kAlien, gen) + " " + pick(kAlien, gen);
    }
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<fs::path> write_corpus(const fs::path& dir, const CorpusShape& shape) {
  fs::create_directories(dir / "clouds");
  std::vector<fs::path> paths;
  for (const auto& m : make_manifests(shape)) {
    std::ofstream(dir / m.point_cloud_ref, std::ios::binary) << point_cloud_to_ply(m.point_cloud);
    const fs::path p = dir / (m.object_id + ".json");
    std::ofstream(p, std::ios::binary) << serialize_manifest(m);
    paths.push_back(p);
  }
  return paths;
}

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          ("viewfuse-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace vf_test
