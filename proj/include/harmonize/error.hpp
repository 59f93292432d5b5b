#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace harmonize {

enum class Errc {
  CastError,
  UnmappedCode,
  UnbinnedValue,
  BadVector,
  DateParseError,
  DimensionMismatch,
  TypeMismatch,
  InvalidParams,
  NotFound,
  ParseError,
  UnknownPrimitive,
  SchemaError,
  StorageFailure,
  HeaderMismatch,
  CellParseError,
  JobConfigError,
  ConformanceError,
  MissingOriginal,
};

std::string_view errc_name(Errc code) noexcept;

/// Base of every error raised by the library. The code is stable and is what
/// callers (and the CLI exit-code mapping) switch on; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// A primitive failure inside a composed mapping function. `operation_index`
/// is 1-based within the rule's operation list.
class OperationError : public Error {
 public:
  OperationError(Errc code, std::size_t operation_index, std::string primitive,
                 const std::string& detail);

  std::size_t operation_index() const noexcept { return operation_index_; }
  const std::string& primitive() const noexcept { return primitive_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t operation_index_;
  std::string primitive_;
  std::string detail_;
};

/// A data error located at a cell of an input file during harmonization.
/// `row` is the 1-based record number within the input file.
class CellError : public Error {
 public:
  CellError(const OperationError& cause, std::string dataset, std::size_t row,
            std::string source_element, std::string target_element);
  /// A cell failure outside any operation (e.g. a non-conforming pass-through value).
  CellError(Errc code, const std::string& detail, std::string dataset, std::size_t row,
            std::string source_element, std::string target_element);

  const std::string& dataset() const noexcept { return dataset_; }
  std::size_t row() const noexcept { return row_; }
  const std::string& source_element() const noexcept { return source_element_; }
  const std::string& target_element() const noexcept { return target_element_; }
  /// 0 when the failure is not inside an operation.
  std::size_t operation_index() const noexcept { return operation_index_; }
  const std::string& primitive() const noexcept { return primitive_; }

 private:
  std::string dataset_;
  std::size_t row_;
  std::string source_element_;
  std::string target_element_;
  std::size_t operation_index_;
  std::string primitive_;
};

}  // namespace harmonize
