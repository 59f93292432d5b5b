#pragma once

#include <span>
#include <string_view>

namespace harmonize::units {

enum class Dimension { Length, Mass, Time, Temperature };

std::string_view dimension_name(Dimension d) noexcept;

/// Affine map to the dimension's base unit (m, kg, s, K): base = scale * x + offset.
struct Unit {
  std::string_view name;
  Dimension dimension;
  double scale;
  double offset;
};

/// The fixed catalog, canonical names only.
std::span<const Unit> catalog() noexcept;

/// Looks up a canonical name ("km") or an accepted spelling ("kilometers",
/// "meters", "degF", ...). Returns null for anything else.
const Unit* find(std::string_view name) noexcept;

/// Throws Error(DimensionMismatch) when the units measure different dimensions.
double convert(double x, const Unit& from, const Unit& to);

}  // namespace harmonize::units
