#include "sagafs/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "sagafs/rng.hpp"

namespace sagafs {

namespace {

std::optional<double> parse_number(const std::string& text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || !std::isfinite(value)) return std::nullopt;
  return value;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

// Splits one record; double quotes group a field and "" escapes a quote.
std::vector<std::string> split_record(const std::string& line, char delim) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
      was_quoted = true;
    } else if (c == delim) {
      fields.push_back(was_quoted ? current : trim(current));
      current.clear();
      was_quoted = false;
    } else {
      current.push_back(c);
    }
  }
  if (quoted) throw DataError("csv: unterminated quoted field");
  fields.push_back(was_quoted ? current : trim(current));
  return fields;
}

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

// Distinct non-missing values of a column in encoding order: numeric order for
// numeric columns, lexicographic otherwise.
std::vector<std::string> sorted_levels(const RawColumn& col) {
  std::vector<std::string> levels;
  for (const auto& cell : col.cells) {
    if (cell) levels.push_back(*cell);
  }
  if (col.kind == ColumnKind::Numeric) {
    std::sort(levels.begin(), levels.end(), [](const std::string& a, const std::string& b) {
      return *parse_number(a) < *parse_number(b);
    });
    levels.erase(std::unique(levels.begin(), levels.end(),
                             [](const std::string& a, const std::string& b) {
                               return *parse_number(a) == *parse_number(b);
                             }),
                 levels.end());
  } else {
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  }
  return levels;
}

int level_code(const std::vector<std::string>& levels, const RawColumn& col,
               const std::string& value) {
  if (col.kind == ColumnKind::Numeric) {
    const double v = *parse_number(value);
    const auto it = std::lower_bound(levels.begin(), levels.end(), v,
                                     [](const std::string& a, double x) { return *parse_number(a) < x; });
    return static_cast<int>(it - levels.begin());
  }
  const auto it = std::lower_bound(levels.begin(), levels.end(), value);
  return static_cast<int>(it - levels.begin());
}

}  // namespace

void RawTable::validate() const {
  if (columns.empty()) throw DataError("table has no columns");
  if (target_column >= columns.size()) throw DataError("target column index out of range");
  const std::size_t n = columns.front().cells.size();
  if (n == 0) throw DataError("table has no rows");
  for (const auto& col : columns) {
    if (col.cells.size() != n) throw DataError("column '" + col.name + "' has a different length");
  }
}

void TableData::validate() const {
  if (labels.size() != features.rows()) throw DataError("label count differs from row count");
  if (n_classes < 2) throw DataError("need at least two classes");
  if (!features.allFinite()) throw DataError("features contain non-finite values");
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= n_classes) throw DataError("label out of range");
  }
}

RawTable parse_csv(std::istream& in, const std::string& target, const CsvOptions& options) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("csv: missing header row");
  const auto header = split_record(line, options.delimiter);

  RawTable raw;
  raw.columns.resize(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) raw.columns[c].name = header[c];
  const auto target_it = std::find(header.begin(), header.end(), target);
  if (target_it == header.end()) throw DataError("csv: target column '" + target + "' not found");
  raw.target_column = static_cast<std::size_t>(target_it - header.begin());

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() && header.size() > 1) continue;
    const auto fields = split_record(line, options.delimiter);
    if (fields.size() != header.size()) {
      throw DataError("csv: ragged row at line " + std::to_string(line_no));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const bool missing = std::find(options.missing_tokens.begin(), options.missing_tokens.end(),
                                     fields[c]) != options.missing_tokens.end();
      raw.columns[c].cells.push_back(missing ? std::nullopt : std::optional<std::string>(fields[c]));
    }
  }
  if (raw.n_rows() == 0) throw DataError("csv: no data rows");

  for (auto& col : raw.columns) {
    const bool numeric = std::all_of(col.cells.begin(), col.cells.end(), [](const auto& cell) {
      return !cell || parse_number(*cell).has_value();
    });
    col.kind = numeric ? ColumnKind::Numeric : ColumnKind::Categorical;
  }
  return raw;
}

RawTable load_csv(const std::filesystem::path& path, const std::string& target,
                  const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return parse_csv(in, target, options);
}

void write_csv(std::ostream& out, const RawTable& raw) {
  raw.validate();
  auto field = [](const std::string& v) {
    if (v.find_first_of(",\"\n") == std::string::npos) return v;
    std::string q = "\"";
    for (char c : v) {
      if (c == '"') q.push_back('"');
      q.push_back(c);
    }
    return q + "\"";
  };
  for (std::size_t c = 0; c < raw.columns.size(); ++c) out << (c ? "," : "") << field(raw.columns[c].name);
  out << '\n';
  for (std::size_t r = 0; r < raw.n_rows(); ++r) {
    for (std::size_t c = 0; c < raw.columns.size(); ++c) {
      const auto& cell = raw.columns[c].cells[r];
      out << (c ? "," : "") << (cell ? field(*cell) : std::string("?"));
    }
    out << '\n';
  }
}

TableData preprocess(const RawTable& raw) {
  raw.validate();
  const std::size_t n = raw.n_rows();
  const std::size_t k = raw.columns.size() - 1;

  TableData out;
  out.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  out.labels.resize(static_cast<Eigen::Index>(n));

  Eigen::Index feature = 0;
  for (std::size_t c = 0; c < raw.columns.size(); ++c) {
    const RawColumn& col = raw.columns[c];
    const bool all_missing =
        std::none_of(col.cells.begin(), col.cells.end(), [](const auto& cell) { return cell.has_value(); });
    if (all_missing) throw DataError("column '" + col.name + "' is entirely missing");

    if (c == raw.target_column) {
      if (std::any_of(col.cells.begin(), col.cells.end(), [](const auto& cell) { return !cell; })) {
        throw DataError("target column contains missing labels");
      }
      const auto levels = sorted_levels(col);
      if (levels.size() < 2) throw DataError("fewer than two distinct labels");
      out.n_classes = static_cast<int>(levels.size());
      for (std::size_t r = 0; r < n; ++r) {
        out.labels[static_cast<Eigen::Index>(r)] = level_code(levels, col, *col.cells[r]);
      }
      continue;
    }

    out.feature_names.push_back(col.name);
    auto dst = out.features.col(feature++);
    if (col.kind == ColumnKind::Numeric) {
      std::vector<double> present;
      for (const auto& cell : col.cells) {
        if (cell) present.push_back(*parse_number(*cell));
      }
      const double median = median_of(present);
      for (std::size_t r = 0; r < n; ++r) {
        dst[static_cast<Eigen::Index>(r)] = col.cells[r] ? *parse_number(*col.cells[r]) : median;
      }
    } else {
      const auto levels = sorted_levels(col);
      std::map<std::string, std::size_t> freq;
      for (const auto& cell : col.cells) {
        if (cell) ++freq[*cell];
      }
      // std::map iterates in lexicographic order, so the first maximum is the smallest value.
      auto mode = freq.begin();
      for (auto it = freq.begin(); it != freq.end(); ++it) {
        if (it->second > mode->second) mode = it;
      }
      for (std::size_t r = 0; r < n; ++r) {
        const std::string& value = col.cells[r] ? *col.cells[r] : mode->first;
        dst[static_cast<Eigen::Index>(r)] = level_code(levels, col, value);
      }
    }
  }
  out.validate();
  return out;
}

RawTable to_raw(const TableData& data, const std::string& target_name) {
  RawTable raw;
  const auto n = data.n_instances();
  auto to_text = [](double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
  };
  for (Eigen::Index c = 0; c < data.n_features(); ++c) {
    RawColumn col;
    col.name = c < static_cast<Eigen::Index>(data.feature_names.size())
                   ? data.feature_names[static_cast<std::size_t>(c)]
                   : "f" + std::to_string(c);
    for (Eigen::Index r = 0; r < n; ++r) col.cells.emplace_back(to_text(data.features(r, c)));
    raw.columns.push_back(std::move(col));
  }
  RawColumn target;
  target.name = target_name;
  for (Eigen::Index r = 0; r < n; ++r) target.cells.emplace_back(std::to_string(data.labels[r]));
  raw.columns.push_back(std::move(target));
  raw.target_column = raw.columns.size() - 1;
  return raw;
}

TableData take_rows(const TableData& data, std::span<const Eigen::Index> rows) {
  TableData out;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), data.n_features());
  out.labels.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = rows[i];
    if (r < 0 || r >= data.n_instances()) throw std::out_of_range("take_rows: row index out of range");
    out.features.row(static_cast<Eigen::Index>(i)) = data.features.row(r);
    out.labels[static_cast<Eigen::Index>(i)] = data.labels[r];
  }
  out.n_classes = data.n_classes;
  out.feature_names = data.feature_names;
  return out;
}

SplitData shuffle_split(const TableData& data, std::uint64_t seed) {
  const auto n = data.n_instances();
  const auto n_train = static_cast<Eigen::Index>(std::floor(0.6 * static_cast<double>(n)));
  const auto n_val = static_cast<Eigen::Index>(std::floor(0.2 * static_cast<double>(n)));
  if (n < 5 || n_train < 1 || n_val < 1 || n - n_train - n_val < 1) {
    throw DataError("dataset too small for a 60/20/20 split");
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Rng rng(derive_seed(seed, 0x5eed5011ULL));
  rng.shuffle(std::span<Eigen::Index>(order));

  const std::span<const Eigen::Index> all(order);
  SplitData split;
  split.train = take_rows(data, all.subspan(0, static_cast<std::size_t>(n_train)));
  split.validation = take_rows(data, all.subspan(static_cast<std::size_t>(n_train),
                                                 static_cast<std::size_t>(n_val)));
  split.test = take_rows(data, all.subspan(static_cast<std::size_t>(n_train + n_val)));
  split.split_seed = seed;
  return split;
}

SampleHandle subsample(const TableData& train, std::size_t size, std::uint64_t seed, int level) {
  const auto n = static_cast<std::size_t>(train.n_instances());
  if (size < 1 || size > n) throw std::invalid_argument("subsample: size out of range");
  std::vector<Eigen::Index> pool(n);
  std::iota(pool.begin(), pool.end(), Eigen::Index{0});
  Rng rng(seed);
  // partial Fisher-Yates: the first `size` slots are a uniform draw without replacement
  for (std::size_t i = 0; i < size; ++i) {
    std::swap(pool[i], pool[i + rng.uniform_index(n - i)]);
  }
  pool.resize(size);
  return SampleHandle{std::move(pool), level, seed};
}

}  // namespace sagafs
