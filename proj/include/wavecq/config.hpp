#pragma once

// Flat `section.key = value` configuration text. Blank lines and lines
// starting with '#' are ignored; entries keep their order of appearance.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace wavecq {

class FlatConfig {
 public:
  /// Throws ConfigError (with the line number) for malformed lines and for
  /// keys given twice.
  [[nodiscard]] static FlatConfig parse(std::string_view text);
  [[nodiscard]] static FlatConfig load(const std::filesystem::path& path);

  [[nodiscard]] std::string serialize() const;
  void save(const std::filesystem::path& path) const;

  /// Replaces an existing value or appends a new entry.
  void set(std::string key, std::string value);
  [[nodiscard]] bool contains(std::string_view key) const;
  [[nodiscard]] std::optional<std::string> find(std::string_view key) const;
  [[nodiscard]] std::vector<std::string> keys() const;
  [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }

  bool operator==(const FlatConfig&) const = default;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// Shortest decimal text that reads back to the same double.
[[nodiscard]] std::string format_double(double value);
/// Whole-string numeric parsing; throw ConfigError naming `what` on failure.
[[nodiscard]] double parse_double(std::string_view text, std::string_view what);
[[nodiscard]] std::size_t parse_size(std::string_view text, std::string_view what);
[[nodiscard]] bool parse_bool(std::string_view text, std::string_view what);
/// Splits on `sep` and trims blanks; an all-blank input gives no items.
[[nodiscard]] std::vector<std::string> split_list(std::string_view text, char sep = ',');
[[nodiscard]] std::vector<double> parse_double_list(std::string_view text, std::string_view what);
[[nodiscard]] std::vector<std::size_t> parse_size_list(std::string_view text, std::string_view what);

}  // namespace wavecq
