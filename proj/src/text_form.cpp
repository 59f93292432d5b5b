#include "text_form.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace harmonize::detail {

std::string_view trim(std::string_view s) noexcept {
  constexpr std::string_view ws = " \t\r\n";
  auto begin = s.find_first_not_of(ws);
  if (begin == std::string_view::npos) return {};
  auto end = s.find_last_not_of(ws);
  return s.substr(begin, end - begin + 1);
}

std::string format_decimal(double value, std::optional<int> places) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value < 0 ? "-inf" : "inf";
  std::array<char, 512> buf{};
  std::to_chars_result res;
  if (places) {
    res = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::fixed,
                        *places);
  } else {
    res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  }
  std::string out(buf.data(), res.ptr);
  if (out == "-0" || (places && out.find_first_not_of("-0.") == std::string::npos &&
                      out.front() == '-')) {
    out.erase(0, 1);  // no negative zero in canonical output
  }
  return out;
}

std::string format_scalar(const Value& v) {
  struct Visitor {
    std::string operator()(const Missing&) const { return {}; }
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(std::int64_t n) const { return std::to_string(n); }
    std::string operator()(const Decimal& d) const { return format_decimal(d.value, d.places); }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(const Date& d) const { return d.text; }
    std::string operator()(const EnumCode& c) const { return std::to_string(c.code); }
    std::string operator()(const ValueVector&) const { return "[...]"; }
  };
  return std::visit(Visitor{}, v.storage());
}

std::optional<std::int64_t> parse_integer(std::string_view s) noexcept {
  if (s.empty()) return std::nullopt;
  bool negative = false;
  if (s.front() == '+' || s.front() == '-') {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (s.empty()) return std::nullopt;
  for (char c : s) {
    if (c < '0' || c > '9') return std::nullopt;
  }
  // Parse as unsigned magnitude so INT64_MIN round-trips.
  std::uint64_t magnitude = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), magnitude);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  constexpr std::uint64_t max_pos = static_cast<std::uint64_t>(INT64_MAX);
  if (negative) {
    if (magnitude > max_pos + 1) return std::nullopt;
    if (magnitude == max_pos + 1) return INT64_MIN;
    return -static_cast<std::int64_t>(magnitude);
  }
  if (magnitude > max_pos) return std::nullopt;
  return static_cast<std::int64_t>(magnitude);
}

std::optional<double> parse_decimal(std::string_view s) noexcept {
  if (s == "nan") return std::nan("");
  if (s == "inf") return HUGE_VAL;
  if (s == "-inf") return -HUGE_VAL;
  std::string_view body = s;
  bool plus = false;
  if (!body.empty() && body.front() == '+') {
    plus = true;
    body.remove_prefix(1);
  }
  // Grammar: [-]digits[.digits][(e|E)[+-]digits] or [-].digits
  std::size_t i = 0;
  if (i < body.size() && body[i] == '-') {
    if (plus) return std::nullopt;
    ++i;
  }
  std::size_t int_digits = 0, frac_digits = 0;
  while (i < body.size() && body[i] >= '0' && body[i] <= '9') ++i, ++int_digits;
  if (i < body.size() && body[i] == '.') {
    ++i;
    while (i < body.size() && body[i] >= '0' && body[i] <= '9') ++i, ++frac_digits;
  }
  if (int_digits + frac_digits == 0) return std::nullopt;
  if (i < body.size() && (body[i] == 'e' || body[i] == 'E')) {
    ++i;
    if (i < body.size() && (body[i] == '+' || body[i] == '-')) ++i;
    std::size_t exp_digits = 0;
    while (i < body.size() && body[i] >= '0' && body[i] <= '9') ++i, ++exp_digits;
    if (exp_digits == 0) return std::nullopt;
  }
  if (i != body.size()) return std::nullopt;
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), out);
  if (ptr != body.data() + body.size()) return std::nullopt;
  if (ec != std::errc{}) return std::nullopt;  // includes out-of-range literals
  return out;
}

std::optional<bool> parse_boolean(std::string_view s) noexcept {
  auto lower_eq = [](std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      char c = a[i];
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
      if (c != b[i]) return false;
    }
    return true;
  };
  if (lower_eq(s, "true")) return true;
  if (lower_eq(s, "false")) return false;
  return std::nullopt;
}

}  // namespace harmonize::detail
