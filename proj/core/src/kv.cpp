#include "ascale/kv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "ascale/errors.hpp"

namespace ascale {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string format_double_fixed17(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value,
                           std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text, const std::string& context) {
  double out = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto res = std::from_chars(first, last, out);
  if (res.ec != std::errc() || res.ptr != last) {
    throw DataError("not a number: \"" + text + "\" (" + context + ")");
  }
  return out;
}

void KvRecord::set(const std::string& key, const std::string& value) {
  for (auto& e : entries_) {
    if (e.first == key) {
      e.second = value;
      return;
    }
  }
  entries_.emplace_back(key, value);
}

void KvRecord::set_u64(const std::string& key, std::uint64_t value) {
  set(key, std::to_string(value));
}

void KvRecord::set_double(const std::string& key, double value) {
  set(key, format_double(value));
}

void KvRecord::set_doubles(const std::string& key, const Vector& values) {
  std::string joined;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) joined += ' ';
    joined += format_double(values[i]);
  }
  set(key, joined);
}

bool KvRecord::has(const std::string& key) const {
  for (const auto& e : entries_)
    if (e.first == key) return true;
  return false;
}

const std::string& KvRecord::get(const std::string& key) const {
  for (const auto& e : entries_)
    if (e.first == key) return e.second;
  throw DataError("missing key \"" + key + "\"");
}

std::optional<std::string> KvRecord::get_optional(const std::string& key) const {
  for (const auto& e : entries_)
    if (e.first == key) return e.second;
  return std::nullopt;
}

std::uint64_t KvRecord::get_u64(const std::string& key) const {
  const std::string& v = get(key);
  std::uint64_t out = 0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw DataError("not an unsigned integer: \"" + v + "\" (key " + key + ")");
  }
  return out;
}

double KvRecord::get_double(const std::string& key) const {
  return parse_double(get(key), "key " + key);
}

Vector KvRecord::get_doubles(const std::string& key) const {
  std::istringstream in(get(key));
  Vector out;
  std::string tok;
  while (in >> tok) out.push_back(parse_double(tok, "key " + key));
  return out;
}

std::string KvRecord::serialize() const {
  std::string out;
  for (const auto& e : entries_) {
    out += e.first;
    out += " = ";
    out += e.second;
    out += '\n';
  }
  return out;
}

KvRecord KvRecord::parse(const std::string& text) {
  KvRecord rec;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw DataError("line " + std::to_string(lineno) +
                      ": expected `key = value`");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw DataError("line " + std::to_string(lineno) + ": empty key");
    }
    if (rec.has(key)) {
      throw DataError("line " + std::to_string(lineno) + ": duplicate key \"" +
                      key + "\"");
    }
    rec.entries_.emplace_back(key, value);
  }
  return rec;
}

KvRecord KvRecord::parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

}  // namespace ascale
