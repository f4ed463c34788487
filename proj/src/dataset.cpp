#include "xspn/dataset.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <string_view>

#include "xspn/error.hpp"

namespace xspn {

BinaryDataset::BinaryDataset(std::size_t rows, std::size_t cols, std::vector<std::uint8_t> values,
                             std::vector<std::string> column_names)
    : rows_(rows), cols_(cols), values_(std::move(values)), names_(std::move(column_names)) {
  if (values_.size() != rows_ * cols_) throw InputError("dataset value count does not match its shape");
  if (!names_.empty() && names_.size() != cols_)
    throw InputError("dataset column name count does not match its width");
  for (std::uint8_t v : values_)
    if (v > 1) throw InputError("dataset contains a non-binary value");
}

BinaryDataset BinaryDataset::select_rows(std::span<const std::size_t> rows) const {
  std::vector<std::uint8_t> out;
  out.reserve(rows.size() * cols_);
  for (std::size_t r : rows) {
    if (r >= rows_) throw InputError("row index out of range");
    auto src = row(r);
    out.insert(out.end(), src.begin(), src.end());
  }
  return BinaryDataset(rows.size(), cols_, std::move(out), names_);
}

BinaryDataset BinaryDataset::select_columns(std::span<const VariableId> columns) const {
  std::vector<std::uint8_t> out;
  out.reserve(rows_ * columns.size());
  for (VariableId c : columns)
    if (c >= cols_) throw InputError("column index out of range");
  for (std::size_t r = 0; r < rows_; ++r)
    for (VariableId c : columns) out.push_back((*this)(r, c));
  std::vector<std::string> names;
  if (!names_.empty())
    for (VariableId c : columns) names.push_back(names_[c]);
  return BinaryDataset(rows_, columns.size(), std::move(out), std::move(names));
}

std::vector<std::size_t> all_rows(std::size_t count) {
  std::vector<std::size_t> r(count);
  std::iota(r.begin(), r.end(), std::size_t{0});
  return r;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(',', start);
    tokens.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return tokens;
}

std::optional<long> parse_int(std::string_view tok) {
  long v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size() || tok.empty()) return std::nullopt;
  return v;
}

struct RawTable {
  std::size_t cols = 0;
  std::vector<std::string> header;
  std::vector<std::vector<long>> rows;
  std::vector<std::size_t> line_numbers;
};

RawTable read_table(std::istream& in, const std::string& source) {
  RawTable t;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty()) continue;
    auto tokens = split_commas(view);
    if (first) {
      first = false;
      t.cols = tokens.size();
      bool header = false;
      for (auto tok : tokens)
        if (!parse_int(tok)) header = true;
      if (header) {
        for (auto tok : tokens) t.header.emplace_back(tok);
        continue;
      }
    }
    if (tokens.size() != t.cols)
      throw InputError(source + ":" + std::to_string(line_no) + ": expected " + std::to_string(t.cols) +
                       " columns, found " + std::to_string(tokens.size()));
    std::vector<long> row;
    row.reserve(tokens.size());
    for (std::size_t c = 0; c < tokens.size(); ++c) {
      auto v = parse_int(tokens[c]);
      if (!v || *v < 0)
        throw InputError(source + ":" + std::to_string(line_no) + ": column " + std::to_string(c + 1) +
                         ": invalid token '" + std::string(tokens[c]) + "'");
      row.push_back(*v);
    }
    t.rows.push_back(std::move(row));
    t.line_numbers.push_back(line_no);
  }
  return t;
}

void check_binary(const RawTable& t, std::size_t r, std::size_t c, const std::string& source) {
  if (t.rows[r][c] > 1)
    throw InputError(source + ":" + std::to_string(t.line_numbers[r]) + ": column " + std::to_string(c + 1) +
                     ": value " + std::to_string(t.rows[r][c]) + " is not binary");
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open dataset file '" + path.string() + "'");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write file '" + path.string() + "'");
  return out;
}

}  // namespace

BinaryDataset read_dataset(std::istream& in, const std::string& source) {
  RawTable t = read_table(in, source);
  std::vector<std::uint8_t> values;
  values.reserve(t.rows.size() * t.cols);
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    for (std::size_t c = 0; c < t.cols; ++c) {
      check_binary(t, r, c, source);
      values.push_back(static_cast<std::uint8_t>(t.rows[r][c]));
    }
  return BinaryDataset(t.rows.size(), t.cols, std::move(values), std::move(t.header));
}

BinaryDataset read_dataset(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_dataset(in, path.string());
}

LabeledDataset read_labeled_dataset(std::istream& in, int label_column, const std::string& source) {
  RawTable t = read_table(in, source);
  if (t.cols < 2) throw InputError(source + ": labeled data needs at least one feature column");
  const long resolved = label_column < 0 ? static_cast<long>(t.cols) + label_column : label_column;
  if (resolved < 0 || resolved >= static_cast<long>(t.cols))
    throw InputError(source + ": label column " + std::to_string(label_column) + " out of range");
  const auto lc = static_cast<std::size_t>(resolved);

  LabeledDataset out;
  std::vector<std::uint8_t> values;
  values.reserve(t.rows.size() * (t.cols - 1));
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    for (std::size_t c = 0; c < t.cols; ++c) {
      if (c == lc) {
        out.labels.push_back(static_cast<int>(t.rows[r][c]));
        continue;
      }
      check_binary(t, r, c, source);
      values.push_back(static_cast<std::uint8_t>(t.rows[r][c]));
    }
  }
  std::vector<std::string> names;
  for (std::size_t c = 0; c < t.header.size(); ++c)
    if (c != lc) names.push_back(t.header[c]);
  out.features = BinaryDataset(t.rows.size(), t.cols - 1, std::move(values), std::move(names));
  return out;
}

LabeledDataset read_labeled_dataset(const std::filesystem::path& path, int label_column) {
  auto in = open_input(path);
  return read_labeled_dataset(in, label_column, path.string());
}

namespace {

void write_header(std::ostream& out, const BinaryDataset& data, bool with_label) {
  for (std::size_t c = 0; c < data.cols(); ++c) {
    if (c) out << ',';
    if (data.column_names().empty())
      out << 'X' << c;
    else
      out << data.column_names()[c];
  }
  if (with_label) out << (data.cols() ? "," : "") << "label";
  out << '\n';
}

void write_rows(std::ostream& out, const BinaryDataset& data, const std::vector<int>* labels) {
  std::string line;
  for (std::size_t r = 0; r < data.rows(); ++r) {
    line.clear();
    auto row = data.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) line.push_back(',');
      line.push_back(static_cast<char>('0' + row[c]));
    }
    if (labels) {
      line.push_back(',');
      line += std::to_string((*labels)[r]);
    }
    line.push_back('\n');
    out << line;
  }
}

}  // namespace

void write_dataset(std::ostream& out, const BinaryDataset& data, bool header) {
  if (header) write_header(out, data, false);
  write_rows(out, data, nullptr);
}

void write_dataset(const std::filesystem::path& path, const BinaryDataset& data, bool header) {
  auto out = open_output(path);
  write_dataset(out, data, header);
  if (!out) throw InputError("failed writing '" + path.string() + "'");
}

void write_labeled_dataset(std::ostream& out, const LabeledDataset& data, bool header) {
  if (data.labels.size() != data.features.rows()) throw InputError("label count does not match row count");
  if (header) write_header(out, data.features, true);
  write_rows(out, data.features, &data.labels);
}

void write_labeled_dataset(const std::filesystem::path& path, const LabeledDataset& data, bool header) {
  auto out = open_output(path);
  write_labeled_dataset(out, data, header);
  if (!out) throw InputError("failed writing '" + path.string() + "'");
}

}  // namespace xspn
