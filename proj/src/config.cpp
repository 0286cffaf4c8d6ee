#include "wavecq/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "wavecq/errors.hpp"

namespace wavecq {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool valid_key(std::string_view key) {
  if (key.empty() || key.front() == '.' || key.back() == '.') return false;
  return std::all_of(key.begin(), key.end(), [](unsigned char c) {
    return std::isalnum(c) != 0 || c == '_' || c == '.' || c == '-';
  });
}

}  // namespace

FlatConfig FlatConfig::parse(std::string_view text) {
  FlatConfig cfg;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t end = text.find('\n');
    std::string_view line = text.substr(0, end);
    text = end == std::string_view::npos ? std::string_view{} : text.substr(end + 1);
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key(trim(line.substr(0, eq)));
    if (!valid_key(key)) throw ConfigError("config line " + std::to_string(line_no) + ": invalid key '" + key + "'");
    if (cfg.contains(key)) throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    cfg.entries_.emplace_back(key, std::string(trim(line.substr(eq + 1))));
  }
  return cfg;
}

FlatConfig FlatConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string FlatConfig::serialize() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
  return out;
}

void FlatConfig::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config file '" + path.string() + "'");
  out << serialize();
}

void FlatConfig::set(std::string key, std::string value) {
  if (!valid_key(key)) throw ConfigError("invalid key '" + key + "'");
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  entries_.emplace_back(std::move(key), std::move(value));
}

bool FlatConfig::contains(std::string_view key) const { return find(key).has_value(); }

std::optional<std::string> FlatConfig::find(std::string_view key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return v;
  return std::nullopt;
}

std::vector<std::string> FlatConfig::keys() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.first);
  return out;
}

std::string format_double(double value) {
  char buf[32];
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, value);
    if (std::strtod(buf, nullptr) == value) break;
  }
  return buf;
}

double parse_double(std::string_view text, std::string_view what) {
  const std::string s(trim(text));
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size() || !std::isfinite(value)) {
    throw ConfigError(std::string(what) + ": expected a number, got '" + s + "'");
  }
  return value;
}

std::size_t parse_size(std::string_view text, std::string_view what) {
  const std::string_view s = trim(text);
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError(std::string(what) + ": expected a non-negative integer, got '" + std::string(s) + "'");
  }
  return value;
}

bool parse_bool(std::string_view text, std::string_view what) {
  std::string s(trim(text));
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError(std::string(what) + ": expected true or false, got '" + s + "'");
}

std::vector<std::string> split_list(std::string_view text, char sep) {
  std::vector<std::string> out;
  if (trim(text).empty()) return out;
  for (;;) {
    const std::size_t pos = text.find(sep);
    out.emplace_back(trim(text.substr(0, pos)));
    if (pos == std::string_view::npos) break;
    text = text.substr(pos + 1);
  }
  return out;
}

std::vector<double> parse_double_list(std::string_view text, std::string_view what) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(parse_double(item, what));
  return out;
}

std::vector<std::size_t> parse_size_list(std::string_view text, std::string_view what) {
  std::vector<std::size_t> out;
  for (const auto& item : split_list(text)) out.push_back(parse_size(item, what));
  return out;
}

}  // namespace wavecq
