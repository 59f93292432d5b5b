#include "harmonize/error.hpp"

#include <fmt/format.h>

namespace harmonize {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::CastError: return "CastError";
    case Errc::UnmappedCode: return "UnmappedCode";
    case Errc::UnbinnedValue: return "UnbinnedValue";
    case Errc::BadVector: return "BadVector";
    case Errc::DateParseError: return "DateParseError";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::TypeMismatch: return "TypeMismatch";
    case Errc::InvalidParams: return "InvalidParams";
    case Errc::NotFound: return "NotFound";
    case Errc::ParseError: return "ParseError";
    case Errc::UnknownPrimitive: return "UnknownPrimitive";
    case Errc::SchemaError: return "SchemaError";
    case Errc::StorageFailure: return "StorageFailure";
    case Errc::HeaderMismatch: return "HeaderMismatch";
    case Errc::CellParseError: return "CellParseError";
    case Errc::JobConfigError: return "JobConfigError";
    case Errc::ConformanceError: return "ConformanceError";
    case Errc::MissingOriginal: return "MissingOriginal";
  }
  return "Error";
}

OperationError::OperationError(Errc code, std::size_t operation_index,
                               std::string primitive, const std::string& detail)
    : Error(code, fmt::format("operation {} ({}): {}: {}", operation_index, primitive,
                              errc_name(code), detail)),
      operation_index_(operation_index),
      primitive_(std::move(primitive)),
      detail_(detail) {}

CellError::CellError(const OperationError& cause, std::string dataset, std::size_t row,
                     std::string source_element, std::string target_element)
    : Error(cause.code(),
            fmt::format("dataset '{}' row {} column '{}' -> '{}': {}", dataset, row,
                        source_element, target_element, cause.what())),
      dataset_(std::move(dataset)),
      row_(row),
      source_element_(std::move(source_element)),
      target_element_(std::move(target_element)),
      operation_index_(cause.operation_index()),
      primitive_(cause.primitive()) {}

CellError::CellError(Errc code, const std::string& detail, std::string dataset, std::size_t row,
                     std::string source_element, std::string target_element)
    : Error(code, fmt::format("dataset '{}' row {} column '{}' -> '{}': {}: {}", dataset, row,
                              source_element, target_element, errc_name(code), detail)),
      dataset_(std::move(dataset)),
      row_(row),
      source_element_(std::move(source_element)),
      target_element_(std::move(target_element)),
      operation_index_(0) {}

}  // namespace harmonize
