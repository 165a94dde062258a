#pragma once

// Synthetic corpora for pipeline tests. Each object gets a ground-truth
// description for the mock providers; "misaligned" objects get a point-cloud
// truth from an unrelated vocabulary so the gate should reject them.

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "viewfuse/model.hpp"

namespace vf_test {

struct CorpusShape {
  std::size_t objects = 10;
  /// Indices whose cloud truth shares no words with the text truth.
  std::set<std::size_t> misaligned;
  std::uint64_t seed = 7;
  std::size_t points_per_cloud = 64;
};

std::string synthetic_id(std::size_t i);

std::vector<viewfuse::ObjectManifest> make_manifests(const CorpusShape& shape);

/// Writes <dir>/<id>.json manifests and <dir>/clouds/<id>.ply. Returns the
/// manifest paths in id order.
std::vector<std::filesystem::path> write_corpus(const std::filesystem::path& dir, const CorpusShape& shape);

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  [[nodiscard]] const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

std::string read_text(const std::filesystem::path& path);

}  // namespace vf_test
