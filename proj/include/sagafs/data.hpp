#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace sagafs {

/// Raised for malformed or unusable input data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ColumnKind { Numeric, Categorical };

struct RawColumn {
  std::string name;
  ColumnKind kind = ColumnKind::Numeric;
  std::vector<std::optional<std::string>> cells;  // nullopt = missing
};

/// Pre-encoding dataset as read from disk; every column has the same length.
struct RawTable {
  std::vector<RawColumn> columns;
  std::size_t target_column = 0;

  std::size_t n_rows() const { return columns.empty() ? 0 : columns.front().cells.size(); }
  void validate() const;
};

/// Preprocessed numeric instances with class ids in [0, n_classes).
struct TableData {
  Eigen::MatrixXd features;  // N x K, column-major
  Eigen::VectorXi labels;    // N
  int n_classes = 0;
  std::vector<std::string> feature_names;

  Eigen::Index n_instances() const { return features.rows(); }
  Eigen::Index n_features() const { return features.cols(); }
  void validate() const;
};

struct SplitData {
  TableData train;
  TableData validation;
  TableData test;
  std::uint64_t split_seed = 0;
};

/// Row indices into a training table drawn without replacement.
struct SampleHandle {
  std::vector<Eigen::Index> indices;
  int level = 0;
  std::uint64_t sample_seed = 0;
};

struct CsvOptions {
  std::vector<std::string> missing_tokens{"", "?"};
  char delimiter = ',';
};

RawTable load_csv(const std::filesystem::path& path, const std::string& target,
                  const CsvOptions& options = {});
RawTable parse_csv(std::istream& in, const std::string& target, const CsvOptions& options = {});

/// Writes a header row then one record per row; missing cells are written as "?".
void write_csv(std::ostream& out, const RawTable& raw);

/// Integer-encodes categoricals (sorted order), imputes medians / modes, encodes labels.
TableData preprocess(const RawTable& raw);

/// Wraps preprocessed data back into a RawTable (all numeric, label column last).
RawTable to_raw(const TableData& data, const std::string& target_name = "target");

/// Seeded shuffle then a floor(0.6N) / floor(0.2N) / remainder cut.
SplitData shuffle_split(const TableData& data, std::uint64_t seed);

SampleHandle subsample(const TableData& train, std::size_t size, std::uint64_t seed,
                       int level = 0);

/// Copies the given rows into a new table (same columns, same class count).
TableData take_rows(const TableData& data, std::span<const Eigen::Index> rows);

}  // namespace sagafs
