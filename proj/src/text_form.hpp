#pragma once

// Canonical scalar text forms shared by the primitives (Cast) and the CSV
// reader/writer. All routines are locale-independent.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "harmonize/value.hpp"

namespace harmonize::detail {

std::string_view trim(std::string_view s) noexcept;

/// Shortest round-trip form, or fixed notation with exactly `places` digits.
std::string format_decimal(double value, std::optional<int> places = std::nullopt);

/// Canonical text of a non-vector value. Missing renders as "".
std::string format_scalar(const Value& v);

/// Optional leading sign followed by ASCII digits; nothing else.
std::optional<std::int64_t> parse_integer(std::string_view s) noexcept;

/// Optional sign, digits with an optional fraction, optional exponent; also
/// "inf", "-inf" and "nan" as written by format_decimal.
std::optional<double> parse_decimal(std::string_view s) noexcept;

/// Case-insensitive "true" / "false".
std::optional<bool> parse_boolean(std::string_view s) noexcept;

}  // namespace harmonize::detail
