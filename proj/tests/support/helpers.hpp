#pragma once

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ascale/matrix.hpp"
#include "ascale/rng.hpp"

namespace testsupport {

inline ascale::Matrix random_matrix(std::size_t n, std::size_t p,
                                    ascale::RngStream& rng) {
  ascale::Matrix x(n, p);
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t i = 0; i < n; ++i) x(i, j) = rng.next_normal();
  return x;
}

inline ascale::Vector random_vector(std::size_t n, ascale::RngStream& rng) {
  ascale::Vector y(n);
  for (auto& v : y) v = rng.next_normal();
  return y;
}

inline double max_abs_diff(const ascale::Vector& a, const ascale::Vector& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return a.size() == b.size() ? m : 1e300;
}

// Scratch directory under the system temp root, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("ascale-" + tag + "-" + std::to_string(++counter) + "-" +
             std::to_string(static_cast<unsigned>(::getpid())));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const {
    return (path_ / name).string();
  }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace testsupport
