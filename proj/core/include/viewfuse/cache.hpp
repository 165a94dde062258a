#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>

#include <nlohmann/json.hpp>

#include "viewfuse/providers.hpp"

namespace viewfuse {

struct CacheStats {
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  /// Entries that failed to parse or did not match their request.
  std::uint64_t corruptions = 0;
};

/// JSON response cache, one file per request:
///   <dir>/<kind>/<cache_key>.json
/// Entries are written to a temporary file and renamed into place, so
/// concurrent writers of one key leave a complete entry (last one wins).
class ResponseCache {
 public:
  /// Creates the directory tree. Throws CacheDirUnwritable.
  explicit ResponseCache(std::filesystem::path dir);

  /// Returns the stored response, or calls `backing`, stores and returns
  /// its result. Corrupt entries fall through to `backing` and are rewritten.
  nlohmann::json cached_call(const ProviderRequest& req, const std::function<nlohmann::json()>& backing);

  [[nodiscard]] std::filesystem::path entry_path(const ProviderRequest& req) const;
  [[nodiscard]] CacheStats stats() const noexcept;
  [[nodiscard]] const std::filesystem::path& dir() const noexcept { return dir_; }

 private:
  void store(const ProviderRequest& req, const nlohmann::json& response);

  std::filesystem::path dir_;
  std::atomic<std::uint64_t> hits_{0};
  std::atomic<std::uint64_t> misses_{0};
  std::atomic<std::uint64_t> corruptions_{0};
  std::atomic<std::uint64_t> tmp_counter_{0};
};

/// Wraps each provider of `backends` with the cache. The returned set keeps
/// the originals in `backends` for call accounting.
[[nodiscard]] ProviderSet with_cache(const ProviderSet& backends, std::shared_ptr<ResponseCache> cache);

}  // namespace viewfuse
