#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace harmonize {

/// One (code, label) entry of a categorical response.
struct CodedValue {
  std::int64_t code = 0;
  std::string label;

  bool operator==(const CodedValue&) const = default;
};

/// Finite set of integer codes. Sets built from a dictionary carry labels;
/// sets derived from a recoding map (EnumToEnum) only know their codes.
class CodedValueSet {
 public:
  CodedValueSet() = default;

  /// Throws Error(SchemaError) on duplicate codes or labels.
  explicit CodedValueSet(std::vector<CodedValue> entries);

  static CodedValueSet codes_only(std::vector<std::int64_t> codes);

  const std::vector<CodedValue>& entries() const noexcept { return entries_; }
  bool labelled() const noexcept { return labelled_; }
  bool empty() const noexcept { return entries_.empty(); }
  std::size_t size() const noexcept { return entries_.size(); }

  bool contains(std::int64_t code) const noexcept;
  std::optional<std::string> label_of(std::int64_t code) const;
  std::optional<std::int64_t> code_of(const std::string& label) const;

  /// Every code here is in `other`; when both sides are labelled the labels
  /// must agree as well.
  bool subset_of(const CodedValueSet& other) const noexcept;

  bool operator==(const CodedValueSet&) const = default;

 private:
  std::vector<CodedValue> entries_;
  bool labelled_ = true;
};

enum class Kind {
  Unknown,
  String,
  Integer,
  Decimal,
  Boolean,
  Date,
  Enum,
  Vector,
  // Signature-only kinds used by primitive input types.
  Numeric,  // Integer or Decimal
  Binary,   // Integer or Boolean
  Scalar,   // any non-vector kind
};

std::string_view kind_name(Kind kind) noexcept;

class ValueType {
 public:
  ValueType() = default;

  static ValueType unknown() { return ValueType{}; }
  static ValueType string() { return ValueType{Kind::String}; }
  static ValueType integer() { return ValueType{Kind::Integer}; }
  static ValueType decimal() { return ValueType{Kind::Decimal}; }
  static ValueType boolean() { return ValueType{Kind::Boolean}; }
  static ValueType date() { return ValueType{Kind::Date}; }
  static ValueType numeric() { return ValueType{Kind::Numeric}; }
  static ValueType binary() { return ValueType{Kind::Binary}; }
  static ValueType scalar() { return ValueType{Kind::Scalar}; }
  static ValueType enumeration(CodedValueSet codes);
  static ValueType enumeration(std::shared_ptr<const CodedValueSet> codes);
  /// Throws Error(SchemaError) when `element` is itself a vector or an enum.
  static ValueType vector(Kind element);

  Kind kind() const noexcept { return kind_; }
  /// Element kind of a Vector; Unknown otherwise.
  Kind element() const noexcept { return element_; }
  /// Coded set of an Enum; null otherwise.
  const std::shared_ptr<const CodedValueSet>& codes() const noexcept { return codes_; }

  bool is_signature_only() const noexcept;

  /// "integer", "enum", "vector<decimal>", ...
  std::string name() const;

  /// Deep equality: for Enum the coded sets are compared by value.
  friend bool operator==(const ValueType& a, const ValueType& b) noexcept;

 private:
  explicit ValueType(Kind kind) : kind_(kind) {}

  Kind kind_ = Kind::Unknown;
  Kind element_ = Kind::Unknown;
  std::shared_ptr<const CodedValueSet> codes_;
};

/// Parses the dictionary spelling of a non-enum type ("string", "vector<integer>", ...).
std::optional<ValueType> parse_type_name(std::string_view name);

/// Whether a value of type `actual` may flow into a slot declared as `expected`.
/// Integer widens to Decimal; Enum only checks the kind (code membership is a
/// run-time property of the data).
bool accepts(const ValueType& expected, const ValueType& actual) noexcept;

struct Missing {
  bool operator==(const Missing&) const = default;
};

/// A 64-bit binary decimal. `places` is set only by Round and fixes how many
/// fractional digits the canonical writer emits; it does not take part in
/// value comparison.
struct Decimal {
  double value = 0.0;
  std::optional<int> places;

  friend bool operator==(const Decimal& a, const Decimal& b) noexcept;
};

struct Date {
  std::string text;
  bool operator==(const Date&) const = default;
};

struct EnumCode {
  std::int64_t code = 0;
  bool operator==(const EnumCode&) const = default;
};

class Value;
using ValueVector = std::vector<Value>;

class Value {
 public:
  using Storage = std::variant<Missing, std::string, std::int64_t, Decimal, bool,
                               Date, EnumCode, ValueVector>;

  Value() = default;
  Value(Missing) {}
  Value(std::string text) : data_(std::move(text)) {}
  Value(const char* text) : data_(std::string(text)) {}
  Value(std::int64_t n) : data_(n) {}
  Value(int n) : data_(static_cast<std::int64_t>(n)) {}
  Value(Decimal d) : data_(d) {}
  Value(double d) : data_(Decimal{d, std::nullopt}) {}
  Value(bool b) : data_(b) {}
  Value(Date d) : data_(std::move(d)) {}
  Value(EnumCode c) : data_(c) {}
  Value(ValueVector items) : data_(std::move(items)) {}

  static Value missing() { return Value{}; }

  const Storage& storage() const noexcept { return data_; }

  bool is_missing() const noexcept { return std::holds_alternative<Missing>(data_); }
  bool is_text() const noexcept { return std::holds_alternative<std::string>(data_); }
  bool is_integer() const noexcept { return std::holds_alternative<std::int64_t>(data_); }
  bool is_decimal() const noexcept { return std::holds_alternative<Decimal>(data_); }
  bool is_boolean() const noexcept { return std::holds_alternative<bool>(data_); }
  bool is_date() const noexcept { return std::holds_alternative<Date>(data_); }
  bool is_enum() const noexcept { return std::holds_alternative<EnumCode>(data_); }
  bool is_vector() const noexcept { return std::holds_alternative<ValueVector>(data_); }

  const std::string& text() const { return std::get<std::string>(data_); }
  std::int64_t integer() const { return std::get<std::int64_t>(data_); }
  const Decimal& decimal() const { return std::get<Decimal>(data_); }
  bool boolean() const { return std::get<bool>(data_); }
  const Date& date() const { return std::get<Date>(data_); }
  std::int64_t code() const { return std::get<EnumCode>(data_).code; }
  const ValueVector& items() const { return std::get<ValueVector>(data_); }

  /// Exact structural equality. Decimals compare by value (bitwise-equal or
  /// both NaN); the `places` rendering hint is ignored.
  friend bool operator==(const Value& a, const Value& b) noexcept;

 private:
  Storage data_;
};

/// Debug rendering, e.g. `integer 23`, `vector [0, 0, 1, 0]`, `missing`.
std::string describe(const Value& v);

ValueType type_of(const Value& v);

/// For Enum, `codes` overrides the set carried by `t`; with neither, no code
/// conforms. Missing conforms to every type. Never throws.
bool conforms(const Value& v, const ValueType& t,
              const CodedValueSet* codes = nullptr) noexcept;

/// Equality with relative tolerance on decimals (used to compare data files).
bool approx_equal(const Value& a, const Value& b, double rel_tol = 1e-9) noexcept;

}  // namespace harmonize
