#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "viewfuse/error.hpp"

namespace viewfuse {

// ── Viewpoints ──────────────────────────────────────────────────────────────

/// The six standardized render directions. Enumerator order is the
/// canonical serialization order.
enum class Viewpoint : std::uint8_t { Front, Back, Left, Right, Top, Bottom };

inline constexpr std::array<Viewpoint, 6> kAllViewpoints = {
    Viewpoint::Front, Viewpoint::Back, Viewpoint::Left,
    Viewpoint::Right, Viewpoint::Top,  Viewpoint::Bottom};

inline constexpr std::array<Viewpoint, 4> kSideViewpoints = {
    Viewpoint::Left, Viewpoint::Right, Viewpoint::Top, Viewpoint::Bottom};

[[nodiscard]] std::string_view to_string(Viewpoint v) noexcept;
[[nodiscard]] std::optional<Viewpoint> parse_viewpoint(std::string_view name) noexcept;

// ── Geometry ────────────────────────────────────────────────────────────────

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  friend bool operator==(const Point3&, const Point3&) = default;
};

/// Unordered point sample of an object surface, in model units.
struct PointCloud {
  std::vector<Point3> points;

  [[nodiscard]] std::size_t count() const noexcept { return points.size(); }
  friend bool operator==(const PointCloud&, const PointCloud&) = default;
};

inline constexpr std::size_t kDefaultPointBudget = 10'000;

/// Parses an ASCII PLY file body (vertex x/y/z properties) or a flat JSON
/// array of [x, y, z] triples. Format is sniffed from the content.
[[nodiscard]] PointCloud parse_point_cloud(std::string_view bytes);
[[nodiscard]] PointCloud load_point_cloud(const std::filesystem::path& path);

[[nodiscard]] std::string point_cloud_to_json(const PointCloud& cloud);
[[nodiscard]] std::string point_cloud_to_ply(const PointCloud& cloud);

/// Checks every coordinate is finite and the cloud is non-empty.
void validate_point_cloud(const PointCloud& cloud);

/// Uniform random subset of `budget` points, original order preserved.
/// Returns the input unchanged when it already fits.
[[nodiscard]] PointCloud downsample(const PointCloud& cloud, std::size_t budget,
                                    std::uint64_t seed);

// ── Embeddings ──────────────────────────────────────────────────────────────

/// Fixed-length real vector; construction rejects NaN/Inf and empty input.
class EmbeddingVector {
 public:
  EmbeddingVector() = default;
  explicit EmbeddingVector(std::vector<double> values);

  [[nodiscard]] std::size_t dim() const noexcept { return values_.size(); }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] double norm() const noexcept;
  [[nodiscard]] EmbeddingVector scaled(double factor) const;

  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;

 private:
  std::vector<double> values_;
};

// ── Candidates ──────────────────────────────────────────────────────────────

/// One generated description for one view.
struct CandidateDescription {
  Viewpoint view = Viewpoint::Front;
  std::string text;
  /// Natural-log token probabilities; empty when the provider omitted them.
  std::vector<double> token_logprobs;
  double raw_confidence = 0.0;
  /// True when raw_confidence came from the missing-logprob fallback.
  bool confidence_imputed = false;
  std::size_t index = 0;

  friend bool operator==(const CandidateDescription&, const CandidateDescription&) = default;
};

// ── Manifests ───────────────────────────────────────────────────────────────

struct ObjectManifest {
  std::string object_id;
  std::map<Viewpoint, std::string> view_images;
  /// Reference exactly as written in the manifest.
  std::string point_cloud_ref;
  PointCloud point_cloud;
  /// Free-form object; keys sorted.
  nlohmann::json metadata = nlohmann::json::object();

  friend bool operator==(const ObjectManifest&, const ObjectManifest&) = default;
};

/// Thrown when a manifest lacks one or more of the six views.
class MissingViewpointError : public Error {
 public:
  explicit MissingViewpointError(std::vector<Viewpoint> missing);
  [[nodiscard]] const std::vector<Viewpoint>& missing() const noexcept { return missing_; }

 private:
  std::vector<Viewpoint> missing_;
};

struct IngestOptions {
  std::size_t point_budget = kDefaultPointBudget;
  std::uint64_t seed = 0;
};

/// Parses and validates a manifest. The point cloud reference is resolved
/// relative to `base_dir` when it is not absolute.
[[nodiscard]] ObjectManifest ingest_manifest(std::string_view bytes,
                                             const std::filesystem::path& base_dir,
                                             const IngestOptions& opts = {});
[[nodiscard]] ObjectManifest ingest_manifest_file(const std::filesystem::path& path,
                                                  const IngestOptions& opts = {});

/// Manifest JSON with views in canonical order.
[[nodiscard]] std::string serialize_manifest(const ObjectManifest& manifest);

/// Looks up a string-valued metadata key.
[[nodiscard]] std::optional<std::string> metadata_string(const nlohmann::json& metadata,
                                                         const std::string& key);

}  // namespace viewfuse
