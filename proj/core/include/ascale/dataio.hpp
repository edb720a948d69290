#pragma once

#include <map>
#include <string>
#include <vector>

#include "ascale/matrix.hpp"
#include "ascale/rng.hpp"
#include "ascale/scaling.hpp"

namespace ascale {

struct Dataset {
  Matrix x;
  Vector y;
  std::vector<std::string> feature_names;
  std::vector<FeatureKind> kinds;
  std::string target_name;

  std::size_t n_rows() const { return x.rows(); }
  std::size_t n_features() const { return x.cols(); }
};

struct CsvOptions {
  std::string target;                              // required header name
  std::vector<std::string> drop = {"ID"};          // absent names are ignored
  std::map<std::string, FeatureKind> kind_overrides;
  std::vector<std::string> one_hot;                // expand into indicators
};

// Strict numeric CSV reader: UTF-8, comma separated, one header row, no
// quoting.  Malformed cells and ragged rows raise DataError naming the
// 1-based data row and the column.  Feature kinds are inferred as Binary
// when a column has <= 2 distinct values, unless overridden by name.
Dataset load_csv(const std::string& path, const CsvOptions& options);

// Writes features plus the target with 17 significant digits, so a
// write -> load round trip reproduces every double bit for bit.
void write_csv(const Dataset& d, const std::string& path);

struct SplitResult {
  Dataset train;
  Dataset test;
};

// Uniform random split: the first ceil(n * ratio) rows of a random
// permutation become the training set.
SplitResult train_test_split(const Dataset& d, double ratio, RngStream& rng);

// k shuffled folds dealt round-robin; sizes differ by at most one; each
// fold's indices are returned sorted.
std::vector<std::vector<std::size_t>> kfold_indices(std::size_t n,
                                                    std::size_t k,
                                                    RngStream& rng);

}  // namespace ascale
