#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ascale/matrix.hpp"

namespace ascale {

// Flat ordered `key = value` text records, used for fitted-model sidecar
// files and harness config files.  Doubles are written with std::to_chars
// (shortest round-trip form), so serialization is locale-independent and
// parse(serialize(r)) reproduces every number bit for bit.
class KvRecord {
public:
  void set(const std::string& key, const std::string& value);
  void set_u64(const std::string& key, std::uint64_t value);
  void set_double(const std::string& key, double value);
  void set_doubles(const std::string& key, const Vector& values);

  bool has(const std::string& key) const;
  const std::string& get(const std::string& key) const;
  std::optional<std::string> get_optional(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  double get_double(const std::string& key) const;
  Vector get_doubles(const std::string& key) const;

  const std::vector<std::pair<std::string, std::string>>& entries() const {
    return entries_;
  }

  std::string serialize() const;

  // Parses `key = value` lines; '#' starts a comment, blank lines are
  // skipped, duplicate keys are rejected.
  static KvRecord parse(const std::string& text);
  static KvRecord parse_file(const std::string& path);

private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

std::string format_double(double value);                  // shortest round-trip
std::string format_double_fixed17(double value);          // 17 significant digits
double parse_double(const std::string& text, const std::string& context);

}  // namespace ascale
