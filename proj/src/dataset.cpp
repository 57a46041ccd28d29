#include "strongtree/dataset.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <random>
#include <set>

#include "strongtree/error.hpp"

namespace strongtree {

const char* to_string(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::Categorical: return "cat";
    case ColumnKind::Integer: return "int";
    case ColumnKind::Binary: return "bin";
  }
  return "?";
}

ColumnKind parse_column_kind(const std::string& text) {
  if (text == "cat" || text == "categorical") return ColumnKind::Categorical;
  if (text == "int" || text == "integer") return ColumnKind::Integer;
  if (text == "bin" || text == "binary") return ColumnKind::Binary;
  throw Error(ErrorCode::InvalidArgument, "unknown column kind '" + text + "' (use cat, int or bin)");
}

const RawColumn* RawTable::find(const std::string& name) const {
  for (const RawColumn& c : columns) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_record(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char ch = line[k];
    if (quoted) {
      if (ch == '"') {
        if (k + 1 < line.size() && line[k + 1] == '"') {
          cur.push_back('"');
          ++k;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
      was_quoted = true;
    } else if (ch == delim) {
      out.push_back(was_quoted ? cur : trim(cur));
      cur.clear();
      was_quoted = false;
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(was_quoted ? cur : trim(cur));
  return out;
}

std::optional<long long> parse_integer(const std::string& s) {
  if (s.empty()) return std::nullopt;
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (errno != 0 || end != s.c_str() + s.size()) return std::nullopt;
  return v;
}

bool is_missing(const std::string& s) { return s.empty() || s == "?"; }

ColumnKind infer_kind(const std::vector<std::string>& values) {
  bool binary = true;
  bool integer = true;
  for (const std::string& v : values) {
    if (v != "0" && v != "1") binary = false;
    if (!parse_integer(v)) integer = false;
  }
  if (binary) return ColumnKind::Binary;
  if (integer) return ColumnKind::Integer;
  return ColumnKind::Categorical;
}

std::vector<std::string> ordered_class_names(const std::vector<std::string>& labels) {
  std::set<std::string> distinct(labels.begin(), labels.end());
  std::vector<std::string> names(distinct.begin(), distinct.end());
  const bool numeric = std::all_of(names.begin(), names.end(),
                                   [](const std::string& s) { return parse_integer(s).has_value(); });
  if (numeric) {
    std::sort(names.begin(), names.end(), [](const std::string& a, const std::string& b) {
      return *parse_integer(a) < *parse_integer(b);
    });
  }
  return names;
}

std::vector<int> label_indices(const std::vector<std::string>& labels,
                               const std::vector<std::string>& class_names) {
  std::vector<int> y;
  y.reserve(labels.size());
  for (const std::string& l : labels) {
    const auto it = std::find(class_names.begin(), class_names.end(), l);
    if (it == class_names.end()) {
      throw Error(ErrorCode::InvalidArgument, "label '" + l + "' is not a known class");
    }
    y.push_back(static_cast<int>(it - class_names.begin()));
  }
  return y;
}

}  // namespace

RawTable parse_csv(std::istream& in, const std::string& label_column, const LoadOptions& options,
                   const std::string& source) {
  std::string line;
  std::vector<std::string> header;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split_record(line, options.delimiter);
      break;
    }
  }
  if (header.empty()) throw Error(ErrorCode::EmptyFile, source + ": no header row");
  if (!header.empty() && header[0].size() >= 3 && header[0].compare(0, 3, "\xEF\xBB\xBF") == 0) {
    header[0] = header[0].substr(3);
  }
  const auto label_it = std::find(header.begin(), header.end(), label_column);
  if (!label_column.empty() && label_it == header.end()) {
    throw Error(ErrorCode::MissingLabelColumn,
                source + ": header has no column '" + label_column + "'");
  }
  // an empty label name reads an unlabelled file
  const std::size_t label_pos =
      label_column.empty() ? header.size() : static_cast<std::size_t>(label_it - header.begin());
  for (const auto& [name, kind] : options.column_kinds) {
    (void)kind;
    if (std::find(header.begin(), header.end(), name) == header.end() || name == label_column) {
      throw Error(ErrorCode::InvalidArgument, source + ": declared kind for unknown column '" + name + "'");
    }
  }

  RawTable table;
  table.label_name = label_column;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c == label_pos) continue;
    table.column_names.push_back(header[c]);
    table.columns.push_back(RawColumn{header[c], ColumnKind::Categorical, {}});
  }
  int data_row = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    ++data_row;
    const std::vector<std::string> cells = split_record(line, options.delimiter);
    if (cells.size() != header.size()) {
      throw Error(ErrorCode::RaggedRow, source + ": line " + std::to_string(line_no) + " has " +
                                            std::to_string(cells.size()) + " fields, header has " +
                                            std::to_string(header.size()));
    }
    int missing_col = -1;
    for (std::size_t c = 0; c < cells.size() && missing_col < 0; ++c) {
      if (is_missing(cells[c])) missing_col = static_cast<int>(c);
    }
    if (missing_col >= 0) {
      const std::string what = source + ": line " + std::to_string(line_no) + ", column '" +
                               header[missing_col] + "' is missing";
      if (options.strict_missing) throw Error(ErrorCode::MissingValue, what);
      table.warnings.push_back(what + "; row dropped");
      continue;
    }
    std::size_t k = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c == label_pos) continue;
      table.columns[k++].values.push_back(cells[c]);
    }
    table.labels.push_back(label_pos < cells.size() ? cells[label_pos] : std::string());
    table.source_rows.push_back(data_row);
  }
  table.n_rows = static_cast<int>(table.labels.size());
  if (table.n_rows == 0) throw Error(ErrorCode::EmptyFile, source + ": no data rows");

  for (RawColumn& col : table.columns) {
    const auto declared = options.column_kinds.find(col.name);
    if (declared == options.column_kinds.end()) {
      col.kind = infer_kind(col.values);
      continue;
    }
    col.kind = declared->second;
    for (std::size_t r = 0; r < col.values.size(); ++r) {
      const std::string& v = col.values[r];
      const bool ok = col.kind == ColumnKind::Categorical ||
                      (col.kind == ColumnKind::Integer && parse_integer(v)) ||
                      (col.kind == ColumnKind::Binary && (v == "0" || v == "1"));
      if (!ok) {
        throw Error(ErrorCode::InvalidArgument,
                    source + ": data row " + std::to_string(table.source_rows[r]) + ", column '" +
                        col.name + "' value '" + v + "' is not " + to_string(col.kind));
      }
    }
  }
  return table;
}

RawTable load_csv(const std::string& path, const std::string& label_column, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open '" + path + "'");
  return parse_csv(in, label_column, options, path);
}

std::string feature_name(const FeatureEncoding& e) {
  switch (e.kind) {
    case FeatureEncoding::Kind::Passthrough: return e.source;
    case FeatureEncoding::Kind::Level: return e.source + "=" + e.level;
    case FeatureEncoding::Kind::AtMost: return e.source + "<=" + std::to_string(e.threshold);
  }
  return e.source;
}

namespace {

std::uint8_t encode_value(const FeatureEncoding& e, const std::string& v) {
  switch (e.kind) {
    case FeatureEncoding::Kind::Passthrough: return v == "1" ? 1 : 0;
    case FeatureEncoding::Kind::Level: return v == e.level ? 1 : 0;
    case FeatureEncoding::Kind::AtMost: {
      const auto iv = parse_integer(v);
      if (!iv) throw Error(ErrorCode::InvalidArgument, "'" + v + "' is not an integer");
      return *iv <= e.threshold ? 1 : 0;
    }
  }
  return 0;
}

BinaryDataset assemble(const RawTable& table, std::vector<FeatureEncoding> encoding,
                       std::vector<std::string> class_names) {
  BinaryDataset out;
  out.encoding = std::move(encoding);
  out.class_names = std::move(class_names);
  out.y = table.label_name.empty() ? std::vector<int>(table.n_rows, 0)
                                   : label_indices(table.labels, out.class_names);
  out.raw = table.columns;
  out.source_rows = table.source_rows;
  out.warnings = table.warnings;
  out.x.assign(table.n_rows, std::vector<std::uint8_t>(out.encoding.size(), 0));
  for (std::size_t f = 0; f < out.encoding.size(); ++f) {
    const FeatureEncoding& e = out.encoding[f];
    out.feature_names.push_back(feature_name(e));
    const RawColumn* col = table.find(e.source);
    if (!col) {
      throw Error(ErrorCode::FeatureMismatch, "dataset has no column '" + e.source + "'");
    }
    for (int r = 0; r < table.n_rows; ++r) out.x[r][f] = encode_value(e, col->values[r]);
  }
  return out;
}

}  // namespace

BinaryDataset binarize(const RawTable& table) {
  std::vector<FeatureEncoding> encoding;
  std::vector<std::string> warnings;
  for (const RawColumn& col : table.columns) {
    std::vector<std::string> levels;
    for (const std::string& v : col.values) {
      if (std::find(levels.begin(), levels.end(), v) == levels.end()) levels.push_back(v);
    }
    if (levels.size() < 2) {
      warnings.push_back("column '" + col.name + "' has a single value; dropped");
      continue;
    }
    switch (col.kind) {
      case ColumnKind::Binary:
        encoding.push_back({col.name, FeatureEncoding::Kind::Passthrough, {}, 0});
        break;
      case ColumnKind::Categorical:
        for (const std::string& l : levels) {
          encoding.push_back({col.name, FeatureEncoding::Kind::Level, l, 0});
        }
        break;
      case ColumnKind::Integer: {
        std::vector<long long> sorted;
        for (const std::string& l : levels) sorted.push_back(*parse_integer(l));
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t k = 0; k + 1 < sorted.size(); ++k) {
          encoding.push_back({col.name, FeatureEncoding::Kind::AtMost, {}, sorted[k]});
        }
        break;
      }
    }
  }
  std::vector<std::string> classes = ordered_class_names(table.labels);
  if (classes.size() < 2) {
    throw Error(ErrorCode::TooFewClasses, "label column '" + table.label_name + "' has " +
                                              std::to_string(classes.size()) + " distinct value(s)");
  }
  BinaryDataset out = assemble(table, std::move(encoding), std::move(classes));
  out.warnings.insert(out.warnings.end(), warnings.begin(), warnings.end());
  return out;
}

BinaryDataset encode_like(const RawTable& table, const std::vector<FeatureEncoding>& encoding,
                          const std::vector<std::string>& class_names) {
  return assemble(table, encoding, class_names);
}

std::vector<int> BinaryDataset::class_counts() const {
  std::vector<int> counts(class_names.size(), 0);
  for (int k : y) ++counts[k];
  return counts;
}

const std::vector<std::string>& BinaryDataset::attribute(const std::string& column) const {
  for (const RawColumn& c : raw) {
    if (c.name == column) return c.values;
  }
  throw Error(ErrorCode::InvalidArgument, "dataset has no source column '" + column + "'");
}

BinaryDataset BinaryDataset::subset(const std::vector<int>& rows) const {
  BinaryDataset out;
  out.feature_names = feature_names;
  out.class_names = class_names;
  out.encoding = encoding;
  out.warnings = warnings;
  for (const RawColumn& c : raw) out.raw.push_back(RawColumn{c.name, c.kind, {}});
  for (int r : rows) {
    if (r < 0 || r >= n_rows()) throw Error(ErrorCode::InvalidArgument, "row index out of range");
    out.x.push_back(x[r]);
    out.y.push_back(y[r]);
    if (!source_rows.empty()) out.source_rows.push_back(source_rows[r]);
    for (std::size_t c = 0; c < raw.size(); ++c) out.raw[c].values.push_back(raw[c].values[r]);
  }
  return out;
}

BinaryDataset BinaryDataset::without_sources(const std::vector<std::string>& sources) const {
  BinaryDataset out = *this;
  std::vector<int> keep;
  for (int f = 0; f < n_features(); ++f) {
    if (std::find(sources.begin(), sources.end(), encoding[f].source) == sources.end()) keep.push_back(f);
  }
  out.feature_names.clear();
  out.encoding.clear();
  for (int f : keep) {
    out.feature_names.push_back(feature_names[f]);
    out.encoding.push_back(encoding[f]);
  }
  for (std::size_t r = 0; r < x.size(); ++r) {
    out.x[r].clear();
    for (int f : keep) out.x[r].push_back(x[r][f]);
  }
  return out;
}

SplitIndices split_indices(int n_rows, const SplitSpec& spec) {
  const double parts[3] = {spec.train, spec.calibration, spec.test};
  for (double p : parts) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::InvalidSplit, "split fractions must lie in [0,1]");
  }
  if (std::abs(spec.train + spec.calibration + spec.test - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvalidSplit, "split fractions must sum to 1");
  }
  if (n_rows < 3) throw Error(ErrorCode::TooFewRows, "splitting needs at least 3 rows");
  const int n_cal = static_cast<int>(std::round(spec.calibration * n_rows));
  const int n_test = static_cast<int>(std::round(spec.test * n_rows));
  const int n_train = n_rows - n_cal - n_test;
  if (n_train < 0 || (spec.train > 0 && n_train == 0) || (spec.calibration > 0 && n_cal == 0) ||
      (spec.test > 0 && n_test == 0)) {
    throw Error(ErrorCode::TooFewRows, std::to_string(n_rows) + " rows cannot fill every requested split");
  }
  std::vector<int> order(n_rows);
  for (int i = 0; i < n_rows; ++i) order[i] = i;
  std::mt19937_64 rng(spec.seed);
  for (int i = n_rows - 1; i > 0; --i) {
    // uniform in [0, i] by rejection; std::uniform_int_distribution is not portable
    const std::uint64_t range = static_cast<std::uint64_t>(i) + 1;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % range;
    std::uint64_t draw;
    do {
      draw = rng();
    } while (draw >= limit);
    std::swap(order[i], order[static_cast<int>(draw % range)]);
  }
  SplitIndices out;
  out.train.assign(order.begin(), order.begin() + n_train);
  out.calibration.assign(order.begin() + n_train, order.begin() + n_train + n_cal);
  out.test.assign(order.begin() + n_train + n_cal, order.end());
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.calibration.begin(), out.calibration.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

DatasetSplit split(const BinaryDataset& data, const SplitSpec& spec) {
  const SplitIndices idx = split_indices(data.n_rows(), spec);
  return DatasetSplit{data.subset(idx.train), data.subset(idx.calibration), data.subset(idx.test)};
}

}  // namespace strongtree
