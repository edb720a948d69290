#include "ascale/dataio.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <utility>

#include "ascale/errors.hpp"
#include "ascale/kv.hpp"

namespace ascale {
namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;  // column-major cells
  std::size_t n_rows = 0;
};

RawTable read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open csv file: " + path);

  RawTable t;
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty csv file: " + path);
  t.header = split_line(strip_cr(line));
  for (auto& h : t.header) {
    if (h.empty()) throw DataError("empty column name in header of " + path);
  }
  {
    std::set<std::string> seen;
    for (const auto& h : t.header) {
      if (!seen.insert(h).second)
        throw DataError("duplicate column name in header: " + h);
    }
  }

  t.columns.resize(t.header.size());
  std::size_t row = 0;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty() && in.eof()) break;  // tolerate one trailing newline
    ++row;
    auto cells = split_line(line);
    if (cells.size() != t.header.size()) {
      throw DataError("row " + std::to_string(row) + " has " +
                      std::to_string(cells.size()) + " cells, expected " +
                      std::to_string(t.header.size()));
    }
    for (std::size_t j = 0; j < cells.size(); ++j) {
      double v;
      try {
        v = parse_double(cells[j], "csv cell");
      } catch (const DataError&) {
        throw DataError("non-numeric cell at row " + std::to_string(row) +
                        ", column " + t.header[j] + ": '" + cells[j] + "'");
      }
      t.columns[j].push_back(v);
    }
  }
  t.n_rows = row;
  if (t.n_rows == 0) throw DataError("csv file has no data rows: " + path);
  return t;
}

std::size_t distinct_count(const std::vector<double>& col) {
  std::vector<double> sorted = col;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  return sorted.size();
}

}  // namespace

Dataset load_csv(const std::string& path, const CsvOptions& options) {
  detail::require(!options.target.empty(), "csv target column name is empty");
  RawTable t = read_table(path);

  auto col_index = [&](const std::string& name) {
    auto it = std::find(t.header.begin(), t.header.end(), name);
    return it == t.header.end()
               ? std::string::npos
               : static_cast<std::size_t>(it - t.header.begin());
  };

  std::size_t target_j = col_index(options.target);
  if (target_j == std::string::npos)
    throw DataError("target column not found: " + options.target);

  std::vector<bool> dropped(t.header.size(), false);
  for (const auto& name : options.drop) {
    std::size_t j = col_index(name);
    if (j != std::string::npos && j != target_j) dropped[j] = true;
  }

  std::set<std::string> one_hot(options.one_hot.begin(), options.one_hot.end());
  for (const auto& name : one_hot) {
    std::size_t j = col_index(name);
    if (j == std::string::npos)
      throw DataError("one-hot column not found: " + name);
    if (j == target_j)
      throw DataError("cannot one-hot encode the target column: " + name);
  }

  Dataset d;
  d.target_name = options.target;
  d.y = t.columns[target_j];

  std::vector<std::vector<double>> cols;
  for (std::size_t j = 0; j < t.header.size(); ++j) {
    if (j == target_j || dropped[j]) continue;
    const auto& name = t.header[j];
    if (one_hot.count(name)) {
      std::vector<double> levels = t.columns[j];
      std::sort(levels.begin(), levels.end());
      levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
      for (double level : levels) {
        std::vector<double> ind(t.n_rows, 0.0);
        for (std::size_t i = 0; i < t.n_rows; ++i)
          if (t.columns[j][i] == level) ind[i] = 1.0;
        d.feature_names.push_back(name + "=" + format_double(level));
        cols.push_back(std::move(ind));
      }
    } else {
      d.feature_names.push_back(name);
      cols.push_back(t.columns[j]);
    }
  }
  if (cols.empty()) throw DataError("no feature columns remain after drops");

  d.x = Matrix(t.n_rows, cols.size());
  d.kinds.resize(cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j) {
    for (std::size_t i = 0; i < t.n_rows; ++i) d.x(i, j) = cols[j][i];
    auto it = options.kind_overrides.find(d.feature_names[j]);
    if (it != options.kind_overrides.end()) {
      d.kinds[j] = it->second;
    } else {
      d.kinds[j] = distinct_count(cols[j]) <= 2 ? FeatureKind::Binary
                                                : FeatureKind::Numeric;
    }
  }
  return d;
}

void write_csv(const Dataset& d, const std::string& path) {
  detail::require(d.y.size() == d.x.rows(), "dataset y length mismatch");
  detail::require(d.feature_names.size() == d.x.cols(),
                  "dataset feature name count mismatch");
  std::ofstream out(path);
  if (!out) throw DataError("cannot open file for writing: " + path);

  for (std::size_t j = 0; j < d.feature_names.size(); ++j)
    out << d.feature_names[j] << ',';
  out << d.target_name << '\n';
  for (std::size_t i = 0; i < d.x.rows(); ++i) {
    for (std::size_t j = 0; j < d.x.cols(); ++j)
      out << format_double_fixed17(d.x(i, j)) << ',';
    out << format_double_fixed17(d.y[i]) << '\n';
  }
  if (!out) throw DataError("write failed: " + path);
}

SplitResult train_test_split(const Dataset& d, double ratio, RngStream& rng) {
  detail::require(ratio > 0.0 && ratio < 1.0,
                  "split ratio must lie strictly between 0 and 1");
  const std::size_t n = d.n_rows();
  detail::require(n >= 2, "need at least two rows to split");

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = n - 1; i > 0; --i) {
    std::size_t j = rng.next_below(i + 1);
    std::swap(perm[i], perm[j]);
  }

  const auto n_train =
      static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(n)));

  auto take = [&](std::size_t from, std::size_t to) {
    Dataset out;
    out.feature_names = d.feature_names;
    out.kinds = d.kinds;
    out.target_name = d.target_name;
    out.x = Matrix(to - from, d.n_features());
    out.y.resize(to - from);
    for (std::size_t i = from; i < to; ++i) {
      const std::size_t src = perm[i];
      for (std::size_t j = 0; j < d.n_features(); ++j)
        out.x(i - from, j) = d.x(src, j);
      out.y[i - from] = d.y[src];
    }
    return out;
  };

  return SplitResult{take(0, n_train), take(n_train, n)};
}

std::vector<std::vector<std::size_t>> kfold_indices(std::size_t n,
                                                    std::size_t k,
                                                    RngStream& rng) {
  detail::require(k >= 2, "need at least two folds");
  detail::require(n >= k, "need at least one row per fold");

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = n - 1; i > 0; --i) {
    std::size_t j = rng.next_below(i + 1);
    std::swap(perm[i], perm[j]);
  }

  std::vector<std::vector<std::size_t>> folds(k);
  for (std::size_t i = 0; i < n; ++i) folds[i % k].push_back(perm[i]);
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

}  // namespace ascale
