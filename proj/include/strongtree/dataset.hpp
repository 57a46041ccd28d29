#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace strongtree {

enum class ColumnKind { Categorical, Integer, Binary };

const char* to_string(ColumnKind kind);
ColumnKind parse_column_kind(const std::string& text);

struct RawColumn {
  std::string name;
  ColumnKind kind = ColumnKind::Categorical;
  std::vector<std::string> values;
};

struct RawTable {
  std::vector<std::string> column_names;  // feature columns, file order
  std::vector<RawColumn> columns;
  std::string label_name;
  std::vector<std::string> labels;
  int n_rows = 0;
  /// 1-based data row number in the source file for every kept row.
  std::vector<int> source_rows;
  std::vector<std::string> warnings;

  const RawColumn* find(const std::string& name) const;
};

struct LoadOptions {
  std::map<std::string, ColumnKind> column_kinds;
  /// Throw MissingValue instead of dropping rows with empty or "?" cells.
  bool strict_missing = false;
  char delimiter = ',';
};

/// An empty `label_column` reads a file without labels (every label is "").
RawTable load_csv(const std::string& path, const std::string& label_column,
                  const LoadOptions& options = {});
RawTable parse_csv(std::istream& in, const std::string& label_column,
                   const LoadOptions& options = {}, const std::string& source = "<stream>");

/// Provenance of one binary column.
struct FeatureEncoding {
  enum class Kind { Passthrough, Level, AtMost };
  std::string source;
  Kind kind = Kind::Passthrough;
  std::string level;    // Level: the one-hot category
  long long threshold = 0;  // AtMost: 1 iff value <= threshold
};

std::string feature_name(const FeatureEncoding& e);

struct BinaryDataset {
  std::vector<std::vector<std::uint8_t>> x;  // n_rows x n_features
  std::vector<int> y;
  std::vector<std::string> feature_names;
  std::vector<std::string> class_names;
  std::vector<FeatureEncoding> encoding;
  std::vector<RawColumn> raw;  // source columns, restricted to the kept rows
  std::vector<int> source_rows;
  std::vector<std::string> warnings;

  int n_rows() const { return static_cast<int>(y.size()); }
  int n_features() const { return static_cast<int>(feature_names.size()); }
  int n_classes() const { return static_cast<int>(class_names.size()); }
  std::vector<int> class_counts() const;
  /// Raw values of a source column; throws InvalidArgument if unknown.
  const std::vector<std::string>& attribute(const std::string& column) const;
  BinaryDataset subset(const std::vector<int>& rows) const;
  /// Removes every binary column derived from the named source columns.
  BinaryDataset without_sources(const std::vector<std::string>& sources) const;
};

BinaryDataset binarize(const RawTable& table);

/// Encodes `table` with a fixed encoding (e.g. the one a tree was trained with).
/// Labels are mapped onto `class_names`; unseen labels raise InvalidArgument.
/// Rows of an unlabelled table get class 0.
BinaryDataset encode_like(const RawTable& table, const std::vector<FeatureEncoding>& encoding,
                          const std::vector<std::string>& class_names);

struct SplitSpec {
  std::uint64_t seed = 0;
  double train = 0.5;
  double calibration = 0.25;
  double test = 0.25;
};

struct SplitIndices {
  std::vector<int> train, calibration, test;
};

struct DatasetSplit {
  BinaryDataset train, calibration, test;
};

/// Fisher-Yates over std::mt19937_64(seed) with rejection sampling, so the
/// partition is the same on every platform. Parts are returned sorted.
SplitIndices split_indices(int n_rows, const SplitSpec& spec);
DatasetSplit split(const BinaryDataset& data, const SplitSpec& spec);

}  // namespace strongtree
