#include "harmonize/value.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "harmonize/error.hpp"
#include "text_form.hpp"

namespace harmonize {

CodedValueSet::CodedValueSet(std::vector<CodedValue> entries) : entries_(std::move(entries)) {
  std::set<std::int64_t> codes;
  std::set<std::string> labels;
  for (const auto& e : entries_) {
    if (!codes.insert(e.code).second) {
      throw Error(Errc::SchemaError, fmt::format("duplicate code {} in coded value set", e.code));
    }
    if (!labels.insert(e.label).second) {
      throw Error(Errc::SchemaError,
                  fmt::format("duplicate label '{}' in coded value set", e.label));
    }
  }
}

CodedValueSet CodedValueSet::codes_only(std::vector<std::int64_t> codes) {
  CodedValueSet set;
  std::sort(codes.begin(), codes.end());
  codes.erase(std::unique(codes.begin(), codes.end()), codes.end());
  for (auto c : codes) set.entries_.push_back({c, {}});
  set.labelled_ = false;
  return set;
}

bool CodedValueSet::contains(std::int64_t code) const noexcept {
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const CodedValue& e) { return e.code == code; });
}

std::optional<std::string> CodedValueSet::label_of(std::int64_t code) const {
  if (!labelled_) return std::nullopt;
  for (const auto& e : entries_) {
    if (e.code == code) return e.label;
  }
  return std::nullopt;
}

std::optional<std::int64_t> CodedValueSet::code_of(const std::string& label) const {
  if (!labelled_) return std::nullopt;
  for (const auto& e : entries_) {
    if (e.label == label) return e.code;
  }
  return std::nullopt;
}

bool CodedValueSet::subset_of(const CodedValueSet& other) const noexcept {
  for (const auto& e : entries_) {
    auto it = std::find_if(other.entries_.begin(), other.entries_.end(),
                           [&](const CodedValue& o) { return o.code == e.code; });
    if (it == other.entries_.end()) return false;
    if (labelled_ && other.labelled_ && it->label != e.label) return false;
  }
  return true;
}

std::string_view kind_name(Kind kind) noexcept {
  switch (kind) {
    case Kind::Unknown: return "unknown";
    case Kind::String: return "string";
    case Kind::Integer: return "integer";
    case Kind::Decimal: return "decimal";
    case Kind::Boolean: return "boolean";
    case Kind::Date: return "date";
    case Kind::Enum: return "enum";
    case Kind::Vector: return "vector";
    case Kind::Numeric: return "numeric";
    case Kind::Binary: return "integer|boolean";
    case Kind::Scalar: return "scalar";
  }
  return "unknown";
}

ValueType ValueType::enumeration(CodedValueSet codes) {
  return enumeration(std::make_shared<const CodedValueSet>(std::move(codes)));
}

ValueType ValueType::enumeration(std::shared_ptr<const CodedValueSet> codes) {
  ValueType t{Kind::Enum};
  t.codes_ = std::move(codes);
  return t;
}

ValueType ValueType::vector(Kind element) {
  if (element == Kind::Vector || element == Kind::Enum) {
    throw Error(Errc::SchemaError,
                fmt::format("vectors of {} are not supported", kind_name(element)));
  }
  ValueType t{Kind::Vector};
  t.element_ = element;
  return t;
}

bool ValueType::is_signature_only() const noexcept {
  auto abstract = [](Kind k) {
    return k == Kind::Numeric || k == Kind::Binary || k == Kind::Scalar;
  };
  return abstract(kind_) || (kind_ == Kind::Vector && abstract(element_));
}

std::string ValueType::name() const {
  if (kind_ == Kind::Vector) return fmt::format("vector<{}>", kind_name(element_));
  return std::string(kind_name(kind_));
}

bool operator==(const ValueType& a, const ValueType& b) noexcept {
  if (a.kind_ != b.kind_ || a.element_ != b.element_) return false;
  if (a.kind_ != Kind::Enum) return true;
  if (a.codes_ == b.codes_) return true;
  if (!a.codes_ || !b.codes_) return false;
  return *a.codes_ == *b.codes_;
}

std::optional<ValueType> parse_type_name(std::string_view name) {
  static constexpr std::pair<std::string_view, Kind> scalars[] = {
      {"string", Kind::String},   {"integer", Kind::Integer}, {"decimal", Kind::Decimal},
      {"boolean", Kind::Boolean}, {"date", Kind::Date},
  };
  auto scalar = [&](std::string_view n) -> std::optional<Kind> {
    for (const auto& [spelling, kind] : scalars) {
      if (spelling == n) return kind;
    }
    return std::nullopt;
  };
  if (auto k = scalar(name)) {
    switch (*k) {
      case Kind::String: return ValueType::string();
      case Kind::Integer: return ValueType::integer();
      case Kind::Decimal: return ValueType::decimal();
      case Kind::Boolean: return ValueType::boolean();
      default: return ValueType::date();
    }
  }
  constexpr std::string_view prefix = "vector<";
  if (name.size() > prefix.size() + 1 && name.substr(0, prefix.size()) == prefix &&
      name.back() == '>') {
    if (auto k = scalar(name.substr(prefix.size(), name.size() - prefix.size() - 1))) {
      return ValueType::vector(*k);
    }
  }
  return std::nullopt;
}

namespace {

bool kind_accepts(Kind expected, Kind actual) noexcept {
  if (actual == Kind::Unknown) return expected != Kind::Vector;
  switch (expected) {
    case Kind::Numeric: return actual == Kind::Integer || actual == Kind::Decimal;
    case Kind::Binary: return actual == Kind::Integer || actual == Kind::Boolean;
    case Kind::Scalar:
      return actual != Kind::Vector && actual != Kind::Numeric && actual != Kind::Binary &&
             actual != Kind::Scalar;
    case Kind::Decimal: return actual == Kind::Decimal || actual == Kind::Integer;
    default: return expected == actual;
  }
}

}  // namespace

bool accepts(const ValueType& expected, const ValueType& actual) noexcept {
  if (expected.kind() == Kind::Vector) {
    return actual.kind() == Kind::Vector && kind_accepts(expected.element(), actual.element());
  }
  if (actual.kind() == Kind::Vector) return false;
  return kind_accepts(expected.kind(), actual.kind());
}

bool operator==(const Decimal& a, const Decimal& b) noexcept {
  return a.value == b.value || (std::isnan(a.value) && std::isnan(b.value));
}

bool operator==(const Value& a, const Value& b) noexcept { return a.data_ == b.data_; }

std::string describe(const Value& v) {
  if (v.is_missing()) return "missing";
  if (v.is_vector()) {
    std::string out = "vector [";
    bool first = true;
    for (const auto& item : v.items()) {
      if (!first) out += ", ";
      first = false;
      out += detail::format_scalar(item);
    }
    return out + "]";
  }
  return fmt::format("{} {}", type_of(v).name(), detail::format_scalar(v));
}

ValueType type_of(const Value& v) {
  struct Visitor {
    ValueType operator()(const Missing&) const { return ValueType::unknown(); }
    ValueType operator()(const std::string&) const { return ValueType::string(); }
    ValueType operator()(std::int64_t) const { return ValueType::integer(); }
    ValueType operator()(const Decimal&) const { return ValueType::decimal(); }
    ValueType operator()(bool) const { return ValueType::boolean(); }
    ValueType operator()(const Date&) const { return ValueType::date(); }
    ValueType operator()(const EnumCode& c) const {
      return ValueType::enumeration(CodedValueSet::codes_only({c.code}));
    }
    ValueType operator()(const ValueVector& items) const {
      Kind element = Kind::Unknown;
      for (const auto& item : items) {
        Kind k = type_of(item).kind();
        if (k == Kind::Unknown || k == Kind::Vector || k == Kind::Enum) return vec(Kind::Unknown);
        if (element == Kind::Unknown) {
          element = k;
        } else if (element != k) {
          return vec(Kind::Unknown);
        }
      }
      return vec(element);
    }
    // Empty and heterogeneous vectors have an Unknown element kind.
    static ValueType vec(Kind element) { return ValueType::vector(element); }
  };
  return std::visit(Visitor{}, v.storage());
}

namespace {

bool scalar_conforms(const Value& v, Kind kind) noexcept {
  switch (kind) {
    case Kind::String: return v.is_text();
    case Kind::Integer: return v.is_integer();
    case Kind::Decimal: return v.is_decimal();
    case Kind::Boolean: return v.is_boolean();
    case Kind::Date: return v.is_date();
    default: return false;
  }
}

}  // namespace

bool conforms(const Value& v, const ValueType& t, const CodedValueSet* codes) noexcept {
  if (v.is_missing()) return true;
  switch (t.kind()) {
    case Kind::Enum: {
      if (!v.is_enum()) return false;
      const CodedValueSet* set = codes ? codes : t.codes().get();
      return set != nullptr && set->contains(v.code());
    }
    case Kind::Vector: {
      if (!v.is_vector()) return false;
      return std::all_of(v.items().begin(), v.items().end(), [&](const Value& item) {
        return !item.is_missing() && scalar_conforms(item, t.element());
      });
    }
    default: return scalar_conforms(v, t.kind());
  }
}

bool approx_equal(const Value& a, const Value& b, double rel_tol) noexcept {
  if (a.is_decimal() && b.is_decimal()) {
    double x = a.decimal().value, y = b.decimal().value;
    if (x == y || (std::isnan(x) && std::isnan(y))) return true;
    return std::abs(x - y) <= rel_tol * std::max(std::abs(x), std::abs(y));
  }
  if (a.is_vector() && b.is_vector()) {
    const auto& xs = a.items();
    const auto& ys = b.items();
    if (xs.size() != ys.size()) return false;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (!approx_equal(xs[i], ys[i], rel_tol)) return false;
    }
    return true;
  }
  return a == b;
}

}  // namespace harmonize
