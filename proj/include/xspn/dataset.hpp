#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "xspn/scope.hpp"

namespace xspn {

/// N x n matrix of {0,1} values, row-major, with optional column names.
class BinaryDataset {
 public:
  BinaryDataset() = default;
  /// Throws InputError when `values.size() != rows * cols` or a value is not 0/1.
  BinaryDataset(std::size_t rows, std::size_t cols, std::vector<std::uint8_t> values,
                std::vector<std::string> column_names = {});

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0; }

  std::uint8_t operator()(std::size_t r, std::size_t c) const noexcept { return values_[r * cols_ + c]; }
  std::span<const std::uint8_t> row(std::size_t r) const noexcept {
    return {values_.data() + r * cols_, cols_};
  }
  std::span<const std::uint8_t> values() const noexcept { return values_; }
  const std::vector<std::string>& column_names() const noexcept { return names_; }

  /// Copy of the given rows, in the given order.
  BinaryDataset select_rows(std::span<const std::size_t> rows) const;
  /// Copy of the given columns; column j of the result is `columns[j]` here.
  BinaryDataset select_columns(std::span<const VariableId> columns) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint8_t> values_;
  std::vector<std::string> names_;
};

/// Binary features plus one integer label per row.
struct LabeledDataset {
  BinaryDataset features;
  std::vector<int> labels;
};

/// 0, 1, ..., count-1
std::vector<std::size_t> all_rows(std::size_t count);

// Dataset files: one sample per line, comma-separated 0/1 tokens, optionally
// preceded by a header line of column names. A first line counts as a header
// when any of its tokens is not an integer. Blank lines are ignored.

BinaryDataset read_dataset(std::istream& in, const std::string& source = "<stream>");
BinaryDataset read_dataset(const std::filesystem::path& path);

/// `label_column` indexes the raw file columns; negative values count from the
/// end (-1 = last). The label column may hold any non-negative integer.
LabeledDataset read_labeled_dataset(std::istream& in, int label_column,
                                    const std::string& source = "<stream>");
LabeledDataset read_labeled_dataset(const std::filesystem::path& path, int label_column);

void write_dataset(std::ostream& out, const BinaryDataset& data, bool header = false);
void write_dataset(const std::filesystem::path& path, const BinaryDataset& data, bool header = false);
/// Label written as the last column.
void write_labeled_dataset(std::ostream& out, const LabeledDataset& data, bool header = false);
void write_labeled_dataset(const std::filesystem::path& path, const LabeledDataset& data,
                           bool header = false);

}  // namespace xspn
