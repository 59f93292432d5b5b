#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

#include "harmonize/value.hpp"

namespace harmonize {

enum class PrimitiveKind {
  ConvertUnits,
  Truncate,
  Cast,
  EnumToEnum,
  Bin,
  Reduce,
  ConvertDate,
  Round,
  Threshold,
};

inline constexpr PrimitiveKind kAllPrimitiveKinds[] = {
    PrimitiveKind::ConvertUnits, PrimitiveKind::Truncate,    PrimitiveKind::Cast,
    PrimitiveKind::EnumToEnum,   PrimitiveKind::Bin,         PrimitiveKind::Reduce,
    PrimitiveKind::ConvertDate,  PrimitiveKind::Round,       PrimitiveKind::Threshold,
};

std::string_view primitive_name(PrimitiveKind kind) noexcept;
std::optional<PrimitiveKind> parse_primitive_name(std::string_view name) noexcept;

/// A literal number from a rule file; integers stay integers so that
/// serialization is lossless.
using Number = std::variant<std::int64_t, double>;

double to_double(const Number& n) noexcept;

struct ConvertUnitsParams {
  std::string source;
  std::string target;
  bool operator==(const ConvertUnitsParams&) const = default;
};

struct TruncateParams {
  std::int64_t length = 0;
  bool operator==(const TruncateParams&) const = default;
};

/// Type spellings: "string", "integer", "decimal", "boolean".
struct CastParams {
  std::string source;
  std::string target;
  bool operator==(const CastParams&) const = default;
};

struct CodeMapping {
  std::int64_t from = 0;
  std::int64_t to = 0;
  bool operator==(const CodeMapping&) const = default;
};

struct EnumToEnumParams {
  std::vector<CodeMapping> mapping;
  bool operator==(const EnumToEnumParams&) const = default;
};

/// One closed interval bound. MIN/MAX are open-ended sentinels.
struct BinBound {
  enum class Kind { Min, Max, Finite };
  Kind kind = Kind::Finite;
  Number value = std::int64_t{0};

  static BinBound min() { return {Kind::Min, std::int64_t{0}}; }
  static BinBound max() { return {Kind::Max, std::int64_t{0}}; }
  static BinBound at(Number n) { return {Kind::Finite, n}; }

  bool operator==(const BinBound&) const = default;
};

struct BinInterval {
  BinBound lower;
  BinBound upper;
  std::string label;
  bool operator==(const BinInterval&) const = default;
};

/// The i-th interval (0-based) produces enum code i labelled with its label.
struct BinParams {
  std::vector<BinInterval> bins;
  bool operator==(const BinParams&) const = default;
};

enum class ReduceOp { Sum, Any, None, All, OneHot };

std::string_view reduce_op_name(ReduceOp op) noexcept;
std::optional<ReduceOp> parse_reduce_op(std::string_view name) noexcept;

struct ReduceParams {
  ReduceOp operation = ReduceOp::Any;
  bool operator==(const ReduceParams&) const = default;
};

/// strftime-style patterns restricted to %Y %m %d %H %M %S and %%.
struct ConvertDateParams {
  std::string source;
  std::string target;
  bool operator==(const ConvertDateParams&) const = default;
};

struct RoundParams {
  int precision = 0;
  bool operator==(const RoundParams&) const = default;
};

struct ThresholdParams {
  Number lower = std::int64_t{0};
  Number upper = std::int64_t{0};
  bool operator==(const ThresholdParams&) const = default;
};

using PrimitiveParams =
    std::variant<ConvertUnitsParams, TruncateParams, CastParams, EnumToEnumParams, BinParams,
                 ReduceParams, ConvertDateParams, RoundParams, ThresholdParams>;

/// A primitive together with its parameterization. Construction validates the
/// parameters, so every PrimitiveSpec in existence is applicable.
class PrimitiveSpec {
 public:
  /// Throws Error(InvalidParams), or Error(DimensionMismatch) for a unit pair
  /// spanning two dimensions.
  explicit PrimitiveSpec(PrimitiveParams params);

  static PrimitiveSpec convert_units(std::string source, std::string target);
  static PrimitiveSpec truncate(std::int64_t length);
  static PrimitiveSpec cast(std::string source, std::string target);
  static PrimitiveSpec enum_to_enum(std::vector<CodeMapping> mapping);
  static PrimitiveSpec bin(std::vector<BinInterval> bins);
  static PrimitiveSpec reduce(ReduceOp op);
  static PrimitiveSpec convert_date(std::string source, std::string target);
  static PrimitiveSpec round(int precision);
  static PrimitiveSpec threshold(Number lower, Number upper);

  PrimitiveKind kind() const noexcept { return static_cast<PrimitiveKind>(params_.index()); }
  std::string_view name() const noexcept { return primitive_name(kind()); }
  const PrimitiveParams& params() const noexcept { return params_; }

  template <class P>
  const P& as() const {
    return std::get<P>(params_);
  }

  bool operator==(const PrimitiveSpec&) const = default;

 private:
  PrimitiveParams params_;
};

struct Signature {
  ValueType input;
  ValueType output;
};

/// Declared input and output types. The input may be a signature-only type
/// (numeric, vector<scalar>, ...); see result_type for the concrete output.
Signature io_types(const PrimitiveSpec& spec);

/// Concrete output type for a concrete input type accepted by the spec.
/// Returns Unknown if `input` is not accepted.
ValueType result_type(const PrimitiveSpec& spec, const ValueType& input);

/// g(x | R). Missing propagates unchanged. Throws Error with one of
/// CastError, UnmappedCode, UnbinnedValue, BadVector, DateParseError,
/// TypeMismatch.
Value apply_primitive(const PrimitiveSpec& spec, const Value& x);

/// {"primitive": "<Kind>", "params": {...}}
nlohmann::ordered_json primitive_to_json(const PrimitiveSpec& spec);

/// Throws Error(UnknownPrimitive) or Error(InvalidParams).
PrimitiveSpec primitive_from_json(const nlohmann::ordered_json& j);

}  // namespace harmonize
