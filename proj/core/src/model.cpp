#include "viewfuse/model.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "viewfuse/random.hpp"

namespace viewfuse {

namespace {

constexpr std::array<std::string_view, 6> kViewNames = {"front", "back", "left",
                                                        "right", "top",  "bottom"};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

double parse_double(std::string_view tok, std::size_t offset) {
  // std::from_chars for double is available in libstdc++ 11
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw Error(ErrorCode::ParseError,
                "bad number '" + std::string(tok) + "' at byte " + std::to_string(offset));
  }
  return value;
}

PointCloud parse_ply(std::string_view bytes) {
  struct Element {
    std::string name;
    std::size_t count = 0;
    std::vector<std::string> properties;
    bool has_list = false;
  };
  std::vector<Element> elements;
  std::size_t pos = 0;
  bool ascii = false;
  bool header_done = false;

  auto next_line = [&](std::size_t& line_start) -> std::optional<std::string_view> {
    if (pos >= bytes.size()) return std::nullopt;
    line_start = pos;
    std::size_t end = bytes.find('\n', pos);
    if (end == std::string_view::npos) end = bytes.size();
    std::string_view line = bytes.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
  };

  std::size_t line_start = 0;
  auto first = next_line(line_start);
  if (!first || trim(*first) != "ply") throw Error(ErrorCode::ParseError, "missing 'ply' magic at byte 0");

  while (auto line = next_line(line_start)) {
    auto toks = split_ws(*line);
    if (toks.empty() || toks[0] == "comment" || toks[0] == "obj_info") continue;
    if (toks[0] == "format") {
      if (toks.size() < 2 || toks[1] != "ascii") {
        throw Error(ErrorCode::ParseError,
                    "only ascii PLY is supported (byte " + std::to_string(line_start) + ")");
      }
      ascii = true;
    } else if (toks[0] == "element") {
      if (toks.size() != 3) {
        throw Error(ErrorCode::ParseError, "malformed element at byte " + std::to_string(line_start));
      }
      Element e;
      e.name = std::string(toks[1]);
      e.count = static_cast<std::size_t>(parse_double(toks[2], line_start));
      elements.push_back(std::move(e));
    } else if (toks[0] == "property") {
      if (elements.empty() || toks.size() < 3) {
        throw Error(ErrorCode::ParseError, "stray property at byte " + std::to_string(line_start));
      }
      if (toks[1] == "list") elements.back().has_list = true;
      elements.back().properties.emplace_back(toks.back());
    } else if (toks[0] == "end_header") {
      header_done = true;
      break;
    } else {
      throw Error(ErrorCode::ParseError,
                  "unknown header keyword '" + std::string(toks[0]) + "' at byte " +
                      std::to_string(line_start));
    }
  }
  if (!header_done) throw Error(ErrorCode::ParseError, "missing end_header");
  if (!ascii) throw Error(ErrorCode::ParseError, "missing format line");

  PointCloud cloud;
  bool saw_vertex = false;
  for (const Element& e : elements) {
    const bool is_vertex = e.name == "vertex";
    std::ptrdiff_t ix = -1, iy = -1, iz = -1;
    if (is_vertex) {
      saw_vertex = true;
      if (e.has_list) throw Error(ErrorCode::ParseError, "list property on vertex element");
      for (std::size_t k = 0; k < e.properties.size(); ++k) {
        if (e.properties[k] == "x") ix = static_cast<std::ptrdiff_t>(k);
        if (e.properties[k] == "y") iy = static_cast<std::ptrdiff_t>(k);
        if (e.properties[k] == "z") iz = static_cast<std::ptrdiff_t>(k);
      }
      if (ix < 0 || iy < 0 || iz < 0) throw Error(ErrorCode::ParseError, "vertex lacks x/y/z");
      cloud.points.reserve(e.count);
    }
    for (std::size_t n = 0; n < e.count; ++n) {
      auto line = next_line(line_start);
      if (!line) {
        throw Error(ErrorCode::ParseError,
                    "unexpected end of data in element '" + e.name + "' at byte " +
                        std::to_string(bytes.size()));
      }
      if (!is_vertex) continue;
      auto toks = split_ws(*line);
      if (toks.size() != e.properties.size()) {
        throw Error(ErrorCode::ParseError, "vertex arity mismatch at byte " + std::to_string(line_start));
      }
      cloud.points.push_back({parse_double(toks[static_cast<std::size_t>(ix)], line_start),
                              parse_double(toks[static_cast<std::size_t>(iy)], line_start),
                              parse_double(toks[static_cast<std::size_t>(iz)], line_start)});
    }
  }
  if (!saw_vertex) throw Error(ErrorCode::ParseError, "no vertex element");
  return cloud;
}

PointCloud parse_json_cloud(std::string_view bytes) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError,
                std::string("point cloud JSON at byte ") + std::to_string(e.byte) + ": " + e.what());
  }
  if (!j.is_array()) throw Error(ErrorCode::ParseError, "point cloud JSON must be an array");
  PointCloud cloud;
  cloud.points.reserve(j.size());
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 3 || !p[0].is_number() || !p[1].is_number() ||
        !p[2].is_number()) {
      throw Error(ErrorCode::ParseError,
                  "point " + std::to_string(cloud.points.size()) + " is not [x,y,z]");
    }
    cloud.points.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
  }
  return cloud;
}

}  // namespace

std::string_view to_string(Viewpoint v) noexcept {
  return kViewNames[static_cast<std::size_t>(v)];
}

std::optional<Viewpoint> parse_viewpoint(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kViewNames.size(); ++i) {
    if (kViewNames[i] == name) return static_cast<Viewpoint>(i);
  }
  return std::nullopt;
}

PointCloud parse_point_cloud(std::string_view bytes) {
  std::string_view body = trim(bytes);
  if (body.starts_with("ply")) return parse_ply(bytes);
  return parse_json_cloud(bytes);
}

PointCloud load_point_cloud(const std::filesystem::path& path) {
  return parse_point_cloud(read_file(path));
}

std::string point_cloud_to_json(const PointCloud& cloud) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : cloud.points) arr.push_back({p.x, p.y, p.z});
  return arr.dump();
}

std::string point_cloud_to_ply(const PointCloud& cloud) {
  std::ostringstream out;
  out.precision(17);
  out << "ply\nformat ascii 1.0\nelement vertex " << cloud.count()
      << "\nproperty double x\nproperty double y\nproperty double z\nend_header\n";
  for (const auto& p : cloud.points) out << p.x << ' ' << p.y << ' ' << p.z << '\n';
  return out.str();
}

void validate_point_cloud(const PointCloud& cloud) {
  if (cloud.points.empty()) throw Error(ErrorCode::EmptyPointCloud, "point cloud has no points");
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const auto& p = cloud.points[i];
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) {
      throw Error(ErrorCode::InvalidPointCloud, "non-finite coordinate at point " + std::to_string(i));
    }
  }
}

PointCloud downsample(const PointCloud& cloud, std::size_t budget, std::uint64_t seed) {
  if (budget == 0 || cloud.count() <= budget) return cloud;
  std::vector<std::size_t> idx(cloud.count());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  // partial Fisher-Yates: the first `budget` slots form the sample
  for (std::size_t i = 0; i < budget; ++i) {
    std::size_t j = i + rng.index(idx.size() - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(budget);
  std::sort(idx.begin(), idx.end());
  PointCloud out;
  out.points.reserve(budget);
  for (std::size_t i : idx) out.points.push_back(cloud.points[i]);
  return out;
}

EmbeddingVector::EmbeddingVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw Error(ErrorCode::DimensionContractViolation, "embedding has zero dimensions");
  for (double v : values_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::DimensionContractViolation, "embedding has NaN/Inf entry");
  }
}

double EmbeddingVector::norm() const noexcept {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return std::sqrt(s);
}

EmbeddingVector EmbeddingVector::scaled(double factor) const {
  std::vector<double> out(values_);
  for (double& v : out) v *= factor;
  return EmbeddingVector(std::move(out));
}

namespace {

std::string join_views(const std::vector<Viewpoint>& views) {
  std::string s;
  for (Viewpoint v : views) {
    if (!s.empty()) s += ", ";
    s += to_string(v);
  }
  return s;
}

}  // namespace

MissingViewpointError::MissingViewpointError(std::vector<Viewpoint> missing)
    : Error(ErrorCode::MissingViewpoint, "missing views: " + join_views(missing)),
      missing_(std::move(missing)) {}

ObjectManifest ingest_manifest(std::string_view bytes, const std::filesystem::path& base_dir,
                               const IngestOptions& opts) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, "manifest at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "manifest must be a JSON object (byte 0)");

  auto require_string = [&](const nlohmann::json& obj, const char* key) -> std::string {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) {
      throw Error(ErrorCode::ParseError, std::string("manifest field '") + key + "' must be a string");
    }
    return it->get<std::string>();
  };

  ObjectManifest m;
  m.object_id = require_string(j, "object_id");
  if (m.object_id.empty()) throw Error(ErrorCode::ParseError, "object_id is empty");

  auto views = j.find("views");
  if (views == j.end() || !views->is_object()) {
    throw Error(ErrorCode::ParseError, "manifest field 'views' must be an object");
  }
  for (const auto& [key, value] : views->items()) {
    auto v = parse_viewpoint(key);
    if (!v) throw Error(ErrorCode::ParseError, "unknown viewpoint '" + key + "'");
    if (!value.is_string() || value.get<std::string>().empty()) {
      throw Error(ErrorCode::ParseError, "view '" + key + "' must be a non-empty string");
    }
    m.view_images[*v] = value.get<std::string>();
  }
  std::vector<Viewpoint> missing;
  for (Viewpoint v : kAllViewpoints) {
    if (!m.view_images.contains(v)) missing.push_back(v);
  }
  if (!missing.empty()) throw MissingViewpointError(std::move(missing));

  if (auto meta = j.find("metadata"); meta != j.end()) {
    if (!meta->is_object()) throw Error(ErrorCode::ParseError, "metadata must be an object");
    m.metadata = *meta;
  }

  m.point_cloud_ref = require_string(j, "point_cloud");
  std::filesystem::path cloud_path(m.point_cloud_ref);
  if (cloud_path.is_relative()) cloud_path = base_dir / cloud_path;
  PointCloud cloud = load_point_cloud(cloud_path);
  validate_point_cloud(cloud);
  m.point_cloud = downsample(cloud, opts.point_budget, derive_seed(opts.seed, m.object_id));
  return m;
}

ObjectManifest ingest_manifest_file(const std::filesystem::path& path, const IngestOptions& opts) {
  return ingest_manifest(read_file(path), path.parent_path(), opts);
}

std::string serialize_manifest(const ObjectManifest& manifest) {
  nlohmann::ordered_json j;
  j["object_id"] = manifest.object_id;
  nlohmann::ordered_json views = nlohmann::ordered_json::object();
  for (Viewpoint v : kAllViewpoints) {
    auto it = manifest.view_images.find(v);
    if (it != manifest.view_images.end()) views[std::string(to_string(v))] = it->second;
  }
  j["views"] = std::move(views);
  j["point_cloud"] = manifest.point_cloud_ref;
  j["metadata"] = nlohmann::ordered_json::parse(manifest.metadata.dump());
  return j.dump(2);
}

std::optional<std::string> metadata_string(const nlohmann::json& metadata, const std::string& key) {
  if (!metadata.is_object()) return std::nullopt;
  auto it = metadata.find(key);
  if (it == metadata.end() || !it->is_string()) return std::nullopt;
  return it->get<std::string>();
}

}  // namespace viewfuse
