#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace fcr::llm {

/// sha256(template_version, model, input) as lowercase hex.
std::string cache_key(std::string_view template_version, std::string_view model,
                      std::string_view input);

/// Content-addressed response store: one file per key, named by the key,
/// holding the raw response bytes. Writes go through a rename, so concurrent
/// readers never see partial files.
class ResponseCache {
 public:
  /// Creates the directory when missing.
  explicit ResponseCache(std::string directory);

  std::optional<std::string> get(const std::string& key) const;
  void put(const std::string& key, std::string_view value) const;

  const std::string& directory() const noexcept { return directory_; }

 private:
  std::string path_for(const std::string& key) const;
  std::string directory_;
};

}  // namespace fcr::llm
