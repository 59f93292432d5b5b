#include "harmonize/units.hpp"

#include <array>
#include <utility>

#include <fmt/format.h>

#include "harmonize/error.hpp"

namespace harmonize::units {

namespace {

using D = Dimension;

constexpr std::array<Unit, 19> kUnits{{
    {"mm", D::Length, 0.001, 0.0},
    {"cm", D::Length, 0.01, 0.0},
    {"m", D::Length, 1.0, 0.0},
    {"km", D::Length, 1000.0, 0.0},
    {"inch", D::Length, 0.0254, 0.0},
    {"foot", D::Length, 0.3048, 0.0},
    {"yard", D::Length, 0.9144, 0.0},
    {"mile", D::Length, 1609.344, 0.0},
    {"g", D::Mass, 0.001, 0.0},
    {"kg", D::Mass, 1.0, 0.0},
    {"lb", D::Mass, 0.45359237, 0.0},
    {"oz", D::Mass, 0.028349523125, 0.0},
    {"s", D::Time, 1.0, 0.0},
    {"min", D::Time, 60.0, 0.0},
    {"h", D::Time, 3600.0, 0.0},
    {"day", D::Time, 86400.0, 0.0},
    {"celsius", D::Temperature, 1.0, 273.15},
    {"fahrenheit", D::Temperature, 5.0 / 9.0, 273.15 - 32.0 * 5.0 / 9.0},
    {"kelvin", D::Temperature, 1.0, 0.0},
}};

constexpr std::array<std::pair<std::string_view, std::string_view>, 41> kAliases{{
    {"millimeter", "mm"}, {"millimeters", "mm"}, {"centimeter", "cm"}, {"centimeters", "cm"},
    {"meter", "m"},       {"meters", "m"},       {"metre", "m"},       {"metres", "m"},
    {"kilometer", "km"},  {"kilometers", "km"},  {"kilometre", "km"},  {"kilometres", "km"},
    {"in", "inch"},       {"inches", "inch"},    {"ft", "foot"},       {"feet", "foot"},
    {"yd", "yard"},       {"yards", "yard"},     {"mi", "mile"},       {"miles", "mile"},
    {"gram", "g"},        {"grams", "g"},        {"kilogram", "kg"},   {"kilograms", "kg"},
    {"pound", "lb"},      {"pounds", "lb"},      {"lbs", "lb"},        {"ounce", "oz"},
    {"ounces", "oz"},     {"second", "s"},       {"seconds", "s"},     {"minute", "min"},
    {"minutes", "min"},   {"hour", "h"},         {"hours", "h"},       {"days", "day"},
    {"degC", "celsius"},  {"degF", "fahrenheit"}, {"K", "kelvin"},     {"C", "celsius"},
    {"F", "fahrenheit"},
}};

}  // namespace

std::string_view dimension_name(Dimension d) noexcept {
  switch (d) {
    case D::Length: return "length";
    case D::Mass: return "mass";
    case D::Time: return "time";
    case D::Temperature: return "temperature";
  }
  return "unknown";
}

std::span<const Unit> catalog() noexcept { return kUnits; }

const Unit* find(std::string_view name) noexcept {
  for (const auto& [alias, canonical] : kAliases) {
    if (alias == name) {
      name = canonical;
      break;
    }
  }
  for (const auto& u : kUnits) {
    if (u.name == name) return &u;
  }
  return nullptr;
}

double convert(double x, const Unit& from, const Unit& to) {
  if (from.dimension != to.dimension) {
    throw Error(Errc::DimensionMismatch,
                fmt::format("cannot convert {} ({}) to {} ({})", from.name,
                            dimension_name(from.dimension), to.name,
                            dimension_name(to.dimension)));
  }
  if (&from == &to) return x;
  return (from.scale * x + from.offset - to.offset) / to.scale;
}

}  // namespace harmonize::units
