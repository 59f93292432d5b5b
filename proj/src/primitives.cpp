#include "harmonize/primitives.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "harmonize/error.hpp"
#include "harmonize/units.hpp"
#include "text_form.hpp"

namespace harmonize {

std::string_view primitive_name(PrimitiveKind kind) noexcept {
  switch (kind) {
    case PrimitiveKind::ConvertUnits: return "ConvertUnits";
    case PrimitiveKind::Truncate: return "Truncate";
    case PrimitiveKind::Cast: return "Cast";
    case PrimitiveKind::EnumToEnum: return "EnumToEnum";
    case PrimitiveKind::Bin: return "Bin";
    case PrimitiveKind::Reduce: return "Reduce";
    case PrimitiveKind::ConvertDate: return "ConvertDate";
    case PrimitiveKind::Round: return "Round";
    case PrimitiveKind::Threshold: return "Threshold";
  }
  return "?";
}

std::optional<PrimitiveKind> parse_primitive_name(std::string_view name) noexcept {
  for (auto k : kAllPrimitiveKinds) {
    if (primitive_name(k) == name) return k;
  }
  return std::nullopt;
}

double to_double(const Number& n) noexcept {
  return std::visit([](auto v) { return static_cast<double>(v); }, n);
}

std::string_view reduce_op_name(ReduceOp op) noexcept {
  switch (op) {
    case ReduceOp::Sum: return "sum";
    case ReduceOp::Any: return "any";
    case ReduceOp::None: return "none";
    case ReduceOp::All: return "all";
    case ReduceOp::OneHot: return "one-hot";
  }
  return "?";
}

std::optional<ReduceOp> parse_reduce_op(std::string_view name) noexcept {
  for (auto op : {ReduceOp::Sum, ReduceOp::Any, ReduceOp::None, ReduceOp::All, ReduceOp::OneHot}) {
    if (reduce_op_name(op) == name) return op;
  }
  return std::nullopt;
}

namespace {

[[noreturn]] void invalid(const std::string& message) {
  throw Error(Errc::InvalidParams, message);
}

// ---------------------------------------------------------------------------
// Date patterns

enum Field { kYear, kMonth, kDay, kHour, kMinute, kSecond, kFieldCount };

struct DateToken {
  bool literal = true;
  char ch = 0;
  Field field = kYear;
};

using DatePattern = std::vector<DateToken>;
using DateFields = std::array<std::optional<int>, kFieldCount>;

DatePattern compile_pattern(std::string_view pattern) {
  DatePattern out;
  std::array<bool, kFieldCount> seen{};
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    char c = pattern[i];
    if (c != '%') {
      out.push_back({true, c, kYear});
      continue;
    }
    if (++i == pattern.size()) invalid(fmt::format("date pattern '{}' ends with '%'", pattern));
    Field f;
    switch (pattern[i]) {
      case '%': out.push_back({true, '%', kYear}); continue;
      case 'Y': f = kYear; break;
      case 'm': f = kMonth; break;
      case 'd': f = kDay; break;
      case 'H': f = kHour; break;
      case 'M': f = kMinute; break;
      case 'S': f = kSecond; break;
      default:
        invalid(fmt::format("unsupported token '%{}' in date pattern '{}'", pattern[i], pattern));
    }
    if (seen[f]) invalid(fmt::format("repeated token '%{}' in date pattern '{}'", pattern[i], pattern));
    seen[f] = true;
    out.push_back({false, 0, f});
  }
  return out;
}

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(std::optional<int> year, int month) {
  static constexpr int days[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (month == 2) return (!year || is_leap(*year)) ? 29 : 28;
  return days[month - 1];
}

DateFields parse_date(std::string_view text, const DatePattern& pattern, std::string_view spelled) {
  auto fail = [&]() -> DateFields {
    throw Error(Errc::DateParseError,
                fmt::format("'{}' does not match date pattern '{}'", text, spelled));
  };
  DateFields fields;
  std::size_t pos = 0;
  for (const auto& tok : pattern) {
    if (tok.literal) {
      if (pos >= text.size() || text[pos] != tok.ch) return fail();
      ++pos;
      continue;
    }
    std::size_t max_digits = tok.field == kYear ? 4 : 2;
    std::size_t min_digits = tok.field == kYear ? 4 : 1;
    std::size_t n = 0;
    int value = 0;
    while (n < max_digits && pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      value = value * 10 + (text[pos] - '0');
      ++pos;
      ++n;
    }
    if (n < min_digits) return fail();
    fields[tok.field] = value;
  }
  if (pos != text.size()) return fail();

  auto out_of_range = [&](const char* what) -> DateFields {
    throw Error(Errc::DateParseError, fmt::format("'{}' has an invalid {}", text, what));
  };
  if (fields[kMonth] && (*fields[kMonth] < 1 || *fields[kMonth] > 12)) return out_of_range("month");
  if (fields[kDay]) {
    int limit = fields[kMonth] ? days_in_month(fields[kYear], *fields[kMonth]) : 31;
    if (*fields[kDay] < 1 || *fields[kDay] > limit) return out_of_range("day");
  }
  if (fields[kHour] && *fields[kHour] > 23) return out_of_range("hour");
  if (fields[kMinute] && *fields[kMinute] > 59) return out_of_range("minute");
  if (fields[kSecond] && *fields[kSecond] > 59) return out_of_range("second");
  return fields;
}

std::string format_date(const DateFields& fields, const DatePattern& pattern) {
  std::string out;
  for (const auto& tok : pattern) {
    if (tok.literal) {
      out += tok.ch;
    } else {
      int v = fields[tok.field].value_or(0);
      out += tok.field == kYear ? fmt::format("{:04d}", v) : fmt::format("{:02d}", v);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cast

enum class CastType { String, Integer, Decimal, Boolean };

std::optional<CastType> parse_cast_type(std::string_view s) {
  if (s == "string") return CastType::String;
  if (s == "integer") return CastType::Integer;
  if (s == "decimal") return CastType::Decimal;
  if (s == "boolean") return CastType::Boolean;
  return std::nullopt;
}

ValueType cast_value_type(CastType t) {
  switch (t) {
    case CastType::String: return ValueType::string();
    case CastType::Integer: return ValueType::integer();
    case CastType::Decimal: return ValueType::decimal();
    case CastType::Boolean: return ValueType::boolean();
  }
  return ValueType::unknown();
}

bool cast_supported(CastType from, CastType to) {
  using C = CastType;
  switch (from) {
    case C::String: return to != C::String;
    case C::Integer: return to != C::Integer;
    case C::Decimal: return to == C::String;
    case C::Boolean: return to == C::Integer || to == C::String;
  }
  return false;
}

// ---------------------------------------------------------------------------

long double bound_value(const BinBound& b) {
  switch (b.kind) {
    case BinBound::Kind::Min: return -std::numeric_limits<long double>::infinity();
    case BinBound::Kind::Max: return std::numeric_limits<long double>::infinity();
    case BinBound::Kind::Finite:
      return std::visit([](auto v) { return static_cast<long double>(v); }, b.value);
  }
  return 0;
}

bool finite_number(const Number& n) {
  return std::holds_alternative<std::int64_t>(n) || std::isfinite(std::get<double>(n));
}

std::string number_text(const Number& n) {
  return std::visit(
      [](auto v) -> std::string {
        if constexpr (std::is_same_v<decltype(v), double>) {
          return detail::format_decimal(v);
        } else {
          return std::to_string(v);
        }
      },
      n);
}

std::string bound_text(const BinBound& b) {
  if (b.kind == BinBound::Kind::Min) return "MIN";
  if (b.kind == BinBound::Kind::Max) return "MAX";
  return number_text(b.value);
}

std::string utf8_prefix(const std::string& s, std::size_t chars) {
  std::size_t seen = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) {
      if (seen == chars) return s.substr(0, i);
      ++seen;
    }
  }
  return s;
}

bool truthy(const Value& v) {
  struct Visitor {
    bool operator()(const Missing&) const { return false; }
    bool operator()(const std::string& s) const { return !s.empty(); }
    bool operator()(std::int64_t n) const { return n != 0; }
    bool operator()(const Decimal& d) const { return d.value != 0.0 && !std::isnan(d.value); }
    bool operator()(bool b) const { return b; }
    bool operator()(const Date& d) const { return !d.text.empty(); }
    bool operator()(const EnumCode& c) const { return c.code != 0; }
    bool operator()(const ValueVector& items) const { return !items.empty(); }
  };
  return std::visit(Visitor{}, v.storage());
}

double numeric_value(const Value& v) {
  if (v.is_integer()) return static_cast<double>(v.integer());
  return v.decimal().value;
}

/// Half-away-from-zero on the shortest decimal representation of `x`, so that
/// 2.675 rounds to 2.68 at two places even though its binary value is below.
double round_half_away(double x, int precision) {
  if (!std::isfinite(x) || x == 0.0) return x;
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), std::abs(x),
                           std::chars_format::scientific);
  std::string_view sci(buf.data(), static_cast<std::size_t>(res.ptr - buf.data()));
  auto e_pos = sci.find('e');
  std::string digits;
  for (char c : sci.substr(0, e_pos)) {
    if (c != '.') digits += c;
  }
  int exponent = std::stoi(std::string(sci.substr(e_pos + 1)));
  // digits[k] has weight 10^(exponent - k); keep k <= exponent + precision.
  long keep = static_cast<long>(exponent) + precision + 1;
  if (keep >= static_cast<long>(digits.size())) return x;
  std::string kept;
  bool round_up;
  if (keep < 0) {
    kept = "0";
    round_up = false;
  } else {
    kept = keep == 0 ? std::string("0") : digits.substr(0, static_cast<std::size_t>(keep));
    round_up = digits[static_cast<std::size_t>(keep)] >= '5';
  }
  if (round_up) {
    int i = static_cast<int>(kept.size()) - 1;
    while (i >= 0 && kept[static_cast<std::size_t>(i)] == '9') kept[static_cast<std::size_t>(i--)] = '0';
    if (i < 0) {
      kept.insert(kept.begin(), '1');
    } else {
      ++kept[static_cast<std::size_t>(i)];
    }
  }
  std::string literal = fmt::format("{}e{}", kept, -precision);
  double out = 0.0;
  std::from_chars(literal.data(), literal.data() + literal.size(), out);
  return x < 0 ? -out : out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Construction

namespace {

void validate(const ConvertUnitsParams& p) {
  const auto* from = units::find(p.source);
  const auto* to = units::find(p.target);
  if (!from) invalid(fmt::format("unknown unit '{}'", p.source));
  if (!to) invalid(fmt::format("unknown unit '{}'", p.target));
  if (from->dimension != to->dimension) {
    throw Error(Errc::DimensionMismatch,
                fmt::format("cannot convert {} ({}) to {} ({})", p.source,
                            units::dimension_name(from->dimension), p.target,
                            units::dimension_name(to->dimension)));
  }
}

void validate(const TruncateParams& p) {
  if (p.length < 0) invalid(fmt::format("Truncate length must be >= 0, got {}", p.length));
}

void validate(const CastParams& p) {
  auto from = parse_cast_type(p.source);
  auto to = parse_cast_type(p.target);
  if (!from) invalid(fmt::format("unknown Cast source type '{}'", p.source));
  if (!to) invalid(fmt::format("unknown Cast target type '{}'", p.target));
  if (!cast_supported(*from, *to)) {
    invalid(fmt::format("Cast from {} to {} is not supported", p.source, p.target));
  }
}

void validate(const EnumToEnumParams& p) {
  if (p.mapping.empty()) invalid("EnumToEnum mapping must not be empty");
  for (std::size_t i = 0; i < p.mapping.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (p.mapping[i].from == p.mapping[j].from) {
        invalid(fmt::format("EnumToEnum maps code {} more than once", p.mapping[i].from));
      }
    }
  }
}

void validate(const BinParams& p) {
  if (p.bins.empty()) invalid("Bin requires at least one interval");
  for (std::size_t i = 0; i < p.bins.size(); ++i) {
    const auto& b = p.bins[i];
    if (b.label.empty()) invalid(fmt::format("Bin interval {} has an empty label", i + 1));
    if (b.lower.kind == BinBound::Kind::Max || b.upper.kind == BinBound::Kind::Min) {
      invalid(fmt::format("Bin interval '{}' uses MIN/MAX on the wrong side", b.label));
    }
    if ((b.lower.kind == BinBound::Kind::Finite && !finite_number(b.lower.value)) ||
        (b.upper.kind == BinBound::Kind::Finite && !finite_number(b.upper.value))) {
      invalid(fmt::format("Bin interval '{}' has a non-finite bound", b.label));
    }
    if (bound_value(b.lower) > bound_value(b.upper)) {
      invalid(fmt::format("Bin interval '{}' has lower > upper", b.label));
    }
    for (std::size_t j = 0; j < i; ++j) {
      const auto& o = p.bins[j];
      if (o.label == b.label) invalid(fmt::format("duplicate Bin label '{}'", b.label));
      if (bound_value(b.lower) <= bound_value(o.upper) &&
          bound_value(o.lower) <= bound_value(b.upper)) {
        invalid(fmt::format("Bin intervals '{}' [{}, {}] and '{}' [{}, {}] overlap", o.label,
                            bound_text(o.lower), bound_text(o.upper), b.label,
                            bound_text(b.lower), bound_text(b.upper)));
      }
    }
  }
}

void validate(const ReduceParams&) {}

void validate(const ConvertDateParams& p) {
  auto source = compile_pattern(p.source);
  auto target = compile_pattern(p.target);
  std::array<bool, kFieldCount> have{};
  for (const auto& t : source) {
    if (!t.literal) have[t.field] = true;
  }
  for (const auto& t : target) {
    if (!t.literal && !have[t.field]) {
      invalid(fmt::format("date pattern '{}' needs a field that '{}' does not provide", p.target,
                          p.source));
    }
  }
}

void validate(const RoundParams& p) {
  if (p.precision < -15 || p.precision > 17) {
    invalid(fmt::format("Round precision {} is outside [-15, 17]", p.precision));
  }
}

void validate(const ThresholdParams& p) {
  if (!finite_number(p.lower) || !finite_number(p.upper)) invalid("Threshold bounds must be finite");
  long double lo = std::visit([](auto v) { return static_cast<long double>(v); }, p.lower);
  long double hi = std::visit([](auto v) { return static_cast<long double>(v); }, p.upper);
  if (lo > hi) {
    invalid(fmt::format("Threshold lower {} exceeds upper {}", number_text(p.lower),
                        number_text(p.upper)));
  }
}

}  // namespace

PrimitiveSpec::PrimitiveSpec(PrimitiveParams params) : params_(std::move(params)) {
  std::visit([](const auto& p) { validate(p); }, params_);
}

PrimitiveSpec PrimitiveSpec::convert_units(std::string source, std::string target) {
  return PrimitiveSpec(ConvertUnitsParams{std::move(source), std::move(target)});
}
PrimitiveSpec PrimitiveSpec::truncate(std::int64_t length) {
  return PrimitiveSpec(TruncateParams{length});
}
PrimitiveSpec PrimitiveSpec::cast(std::string source, std::string target) {
  return PrimitiveSpec(CastParams{std::move(source), std::move(target)});
}
PrimitiveSpec PrimitiveSpec::enum_to_enum(std::vector<CodeMapping> mapping) {
  return PrimitiveSpec(EnumToEnumParams{std::move(mapping)});
}
PrimitiveSpec PrimitiveSpec::bin(std::vector<BinInterval> bins) {
  return PrimitiveSpec(BinParams{std::move(bins)});
}
PrimitiveSpec PrimitiveSpec::reduce(ReduceOp op) { return PrimitiveSpec(ReduceParams{op}); }
PrimitiveSpec PrimitiveSpec::convert_date(std::string source, std::string target) {
  return PrimitiveSpec(ConvertDateParams{std::move(source), std::move(target)});
}
PrimitiveSpec PrimitiveSpec::round(int precision) { return PrimitiveSpec(RoundParams{precision}); }
PrimitiveSpec PrimitiveSpec::threshold(Number lower, Number upper) {
  return PrimitiveSpec(ThresholdParams{lower, upper});
}

// ---------------------------------------------------------------------------
// Typing

namespace {

ValueType bin_output_type(const BinParams& p) {
  std::vector<CodedValue> entries;
  entries.reserve(p.bins.size());
  for (std::size_t i = 0; i < p.bins.size(); ++i) {
    entries.push_back({static_cast<std::int64_t>(i), p.bins[i].label});
  }
  return ValueType::enumeration(CodedValueSet(std::move(entries)));
}

struct SignatureOf {
  Signature operator()(const ConvertUnitsParams&) const {
    return {ValueType::numeric(), ValueType::decimal()};
  }
  Signature operator()(const TruncateParams&) const {
    return {ValueType::string(), ValueType::string()};
  }
  Signature operator()(const CastParams& p) const {
    return {cast_value_type(*parse_cast_type(p.source)),
            cast_value_type(*parse_cast_type(p.target))};
  }
  Signature operator()(const EnumToEnumParams& p) const {
    std::vector<std::int64_t> from, to;
    for (const auto& m : p.mapping) {
      from.push_back(m.from);
      to.push_back(m.to);
    }
    return {ValueType::enumeration(CodedValueSet::codes_only(std::move(from))),
            ValueType::enumeration(CodedValueSet::codes_only(std::move(to)))};
  }
  Signature operator()(const BinParams& p) const {
    return {ValueType::numeric(), bin_output_type(p)};
  }
  Signature operator()(const ReduceParams& p) const {
    switch (p.operation) {
      case ReduceOp::Sum: return {ValueType::vector(Kind::Numeric), ValueType::decimal()};
      case ReduceOp::OneHot: return {ValueType::vector(Kind::Binary), ValueType::integer()};
      default: return {ValueType::vector(Kind::Scalar), ValueType::boolean()};
    }
  }
  Signature operator()(const ConvertDateParams&) const {
    return {ValueType::date(), ValueType::date()};
  }
  Signature operator()(const RoundParams&) const {
    return {ValueType::decimal(), ValueType::decimal()};
  }
  Signature operator()(const ThresholdParams&) const {
    return {ValueType::numeric(), ValueType::numeric()};
  }
};

bool integral_bounds(const ThresholdParams& p) {
  return std::holds_alternative<std::int64_t>(p.lower) &&
         std::holds_alternative<std::int64_t>(p.upper);
}

}  // namespace

Signature io_types(const PrimitiveSpec& spec) { return std::visit(SignatureOf{}, spec.params()); }

ValueType result_type(const PrimitiveSpec& spec, const ValueType& input) {
  auto sig = io_types(spec);
  if (!accepts(sig.input, input)) return ValueType::unknown();
  if (spec.kind() == PrimitiveKind::Threshold) {
    bool keep_integer =
        input.kind() == Kind::Integer && integral_bounds(spec.as<ThresholdParams>());
    return keep_integer ? ValueType::integer() : ValueType::decimal();
  }
  return sig.output;
}

// ---------------------------------------------------------------------------
// Application

namespace {

[[noreturn]] void fail(Errc code, const std::string& message) { throw Error(code, message); }

struct Apply {
  const Value& x;

  Value operator()(const ConvertUnitsParams& p) const {
    return Value(units::convert(numeric_value(x), *units::find(p.source), *units::find(p.target)));
  }

  Value operator()(const TruncateParams& p) const {
    return Value(utf8_prefix(x.text(), static_cast<std::size_t>(p.length)));
  }

  Value operator()(const CastParams& p) const {
    auto from = *parse_cast_type(p.source);
    auto to = *parse_cast_type(p.target);
    auto cast_error = [&](const std::string& why) -> Value {
      fail(Errc::CastError, fmt::format("cannot cast {} to {}: {}", describe(x), p.target, why));
    };
    switch (from) {
      case CastType::String: {
        auto text = detail::trim(x.text());
        switch (to) {
          case CastType::Integer:
            if (auto n = detail::parse_integer(text)) return Value(*n);
            return cast_error("not an integer literal");
          case CastType::Decimal: {
            auto d = detail::parse_decimal(text);
            if (d && std::isfinite(*d)) return Value(*d);
            return cast_error("not a decimal literal");
          }
          case CastType::Boolean:
            if (auto b = detail::parse_boolean(text)) return Value(*b);
            return cast_error("expected true or false");
          default: break;
        }
        break;
      }
      case CastType::Integer: {
        auto n = x.integer();
        switch (to) {
          case CastType::Decimal: return Value(static_cast<double>(n));
          case CastType::String: return Value(std::to_string(n));
          case CastType::Boolean:
            if (n == 0 || n == 1) return Value(n == 1);
            return cast_error("only 0 and 1 map to booleans");
          default: break;
        }
        break;
      }
      case CastType::Decimal: {
        const auto& d = x.is_integer() ? Decimal{static_cast<double>(x.integer()), std::nullopt}
                                       : x.decimal();
        return Value(detail::format_decimal(d.value, d.places));
      }
      case CastType::Boolean:
        if (to == CastType::Integer) return Value(std::int64_t{x.boolean() ? 1 : 0});
        return Value(std::string(x.boolean() ? "true" : "false"));
    }
    return cast_error("unsupported conversion");
  }

  Value operator()(const EnumToEnumParams& p) const {
    for (const auto& m : p.mapping) {
      if (m.from == x.code()) return Value(EnumCode{m.to});
    }
    fail(Errc::UnmappedCode, fmt::format("code {} has no mapping", x.code()));
  }

  Value operator()(const BinParams& p) const {
    long double v = x.is_integer() ? static_cast<long double>(x.integer())
                                   : static_cast<long double>(x.decimal().value);
    for (std::size_t i = 0; i < p.bins.size(); ++i) {
      if (bound_value(p.bins[i].lower) <= v && v <= bound_value(p.bins[i].upper)) {
        return Value(EnumCode{static_cast<std::int64_t>(i)});
      }
    }
    fail(Errc::UnbinnedValue, fmt::format("{} falls in no bin", describe(x)));
  }

  Value operator()(const ReduceParams& p) const {
    const auto& items = x.items();
    switch (p.operation) {
      case ReduceOp::Sum: {
        double total = 0.0;
        for (const auto& item : items) {
          if (!item.is_integer() && !item.is_decimal()) {
            fail(Errc::BadVector, fmt::format("sum over non-numeric element {}", describe(item)));
          }
          total += numeric_value(item);
        }
        return Value(total);
      }
      case ReduceOp::Any:
        return Value(std::any_of(items.begin(), items.end(), truthy));
      case ReduceOp::None:
        return Value(std::none_of(items.begin(), items.end(), truthy));
      case ReduceOp::All:
        return Value(std::all_of(items.begin(), items.end(), truthy));
      case ReduceOp::OneHot: {
        std::optional<std::int64_t> hot;
        for (std::size_t i = 0; i < items.size(); ++i) {
          const auto& item = items[i];
          bool on;
          if (item.is_boolean()) {
            on = item.boolean();
          } else if (item.is_integer() && (item.integer() == 0 || item.integer() == 1)) {
            on = item.integer() == 1;
          } else {
            fail(Errc::BadVector, fmt::format("one-hot element {} is not 0/1", describe(item)));
          }
          if (on) {
            if (hot) fail(Errc::BadVector, "one-hot vector has more than one set element");
            hot = static_cast<std::int64_t>(i);
          }
        }
        if (!hot) fail(Errc::BadVector, "one-hot vector has no set element");
        return Value(*hot);
      }
    }
    fail(Errc::BadVector, "unknown reduction");
  }

  Value operator()(const ConvertDateParams& p) const {
    auto fields = parse_date(x.date().text, compile_pattern(p.source), p.source);
    return Value(Date{format_date(fields, compile_pattern(p.target))});
  }

  Value operator()(const RoundParams& p) const {
    double v = numeric_value(x);
    return Value(Decimal{round_half_away(v, p.precision), std::max(p.precision, 0)});
  }

  Value operator()(const ThresholdParams& p) const {
    if (x.is_integer() && integral_bounds(p)) {
      return Value(std::clamp(x.integer(), std::get<std::int64_t>(p.lower),
                              std::get<std::int64_t>(p.upper)));
    }
    double v = numeric_value(x);
    if (std::isnan(v)) return Value(v);
    return Value(std::clamp(v, to_double(p.lower), to_double(p.upper)));
  }
};

}  // namespace

Value apply_primitive(const PrimitiveSpec& spec, const Value& x) {
  if (x.is_missing()) return x;
  auto sig = io_types(spec);
  if (!accepts(sig.input, type_of(x))) {
    fail(Errc::TypeMismatch, fmt::format("{} expects {}, got {}", spec.name(), sig.input.name(),
                                         describe(x)));
  }
  return std::visit(Apply{x}, spec.params());
}

}  // namespace harmonize
