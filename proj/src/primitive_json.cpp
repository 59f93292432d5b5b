#include <set>

#include <fmt/format.h>

#include "harmonize/error.hpp"
#include "harmonize/primitives.hpp"

namespace harmonize {

using nlohmann::ordered_json;

namespace {

ordered_json number_json(const Number& n) {
  return std::visit([](auto v) { return ordered_json(v); }, n);
}

ordered_json bound_json(const BinBound& b) {
  switch (b.kind) {
    case BinBound::Kind::Min: return "MIN";
    case BinBound::Kind::Max: return "MAX";
    case BinBound::Kind::Finite: return number_json(b.value);
  }
  return nullptr;
}

struct ParamsJson {
  ordered_json operator()(const ConvertUnitsParams& p) const {
    return {{"source", p.source}, {"target", p.target}};
  }
  ordered_json operator()(const TruncateParams& p) const { return {{"length", p.length}}; }
  ordered_json operator()(const CastParams& p) const {
    return {{"source", p.source}, {"target", p.target}};
  }
  ordered_json operator()(const EnumToEnumParams& p) const {
    auto mapping = ordered_json::array();
    for (const auto& m : p.mapping) mapping.push_back({{"from", m.from}, {"to", m.to}});
    return {{"mapping", std::move(mapping)}};
  }
  ordered_json operator()(const BinParams& p) const {
    auto bins = ordered_json::array();
    for (const auto& b : p.bins) {
      bins.push_back({{"lower", bound_json(b.lower)}, {"upper", bound_json(b.upper)},
                      {"label", b.label}});
    }
    return {{"bins", std::move(bins)}};
  }
  ordered_json operator()(const ReduceParams& p) const {
    return {{"operation", std::string(reduce_op_name(p.operation))}};
  }
  ordered_json operator()(const ConvertDateParams& p) const {
    return {{"source", p.source}, {"target", p.target}};
  }
  ordered_json operator()(const RoundParams& p) const { return {{"precision", p.precision}}; }
  ordered_json operator()(const ThresholdParams& p) const {
    return {{"lower", number_json(p.lower)}, {"upper", number_json(p.upper)}};
  }
};

// Strict reader for one params object: every expected key present, no others.
class Reader {
 public:
  Reader(const ordered_json& obj, std::string_view primitive, std::set<std::string> keys)
      : obj_(obj), primitive_(primitive) {
    if (!obj.is_object()) fail("params must be an object");
    for (const auto& [key, value] : obj.items()) {
      if (!keys.count(key)) fail(fmt::format("unexpected parameter '{}'", key));
    }
    for (const auto& key : keys) {
      if (!obj.contains(key)) fail(fmt::format("missing parameter '{}'", key));
    }
  }

  std::string string(const char* key) const {
    const auto& v = obj_.at(key);
    if (!v.is_string()) fail(fmt::format("parameter '{}' must be a string", key));
    return v.get<std::string>();
  }

  std::int64_t integer(const char* key) const { return as_integer(obj_.at(key), key); }

  const ordered_json& at(const char* key) const { return obj_.at(key); }

  [[noreturn]] void fail(const std::string& message) const {
    throw Error(Errc::InvalidParams, fmt::format("{}: {}", primitive_, message));
  }

  std::int64_t as_integer(const ordered_json& v, std::string_view what) const {
    if (v.is_number_unsigned()) {
      auto u = v.get<std::uint64_t>();
      if (u > static_cast<std::uint64_t>(INT64_MAX)) fail(fmt::format("'{}' is out of range", what));
      return static_cast<std::int64_t>(u);
    }
    if (v.is_number_integer()) return v.get<std::int64_t>();
    fail(fmt::format("'{}' must be an integer", what));
  }

  Number as_number(const ordered_json& v, std::string_view what) const {
    if (v.is_number_float()) return v.get<double>();
    if (v.is_number_integer()) return as_integer(v, what);
    fail(fmt::format("'{}' must be a number", what));
  }

 private:
  const ordered_json& obj_;
  std::string_view primitive_;
};

BinBound read_bound(const Reader& r, const ordered_json& v, const char* sentinel) {
  if (v.is_string()) {
    if (v.get<std::string>() != sentinel) {
      r.fail(fmt::format("bin bound must be a number or \"{}\"", sentinel));
    }
    return std::string_view(sentinel) == "MIN" ? BinBound::min() : BinBound::max();
  }
  return BinBound::at(r.as_number(v, "bound"));
}

PrimitiveParams read_params(PrimitiveKind kind, const ordered_json& params) {
  auto name = primitive_name(kind);
  switch (kind) {
    case PrimitiveKind::ConvertUnits: {
      Reader r(params, name, {"source", "target"});
      return ConvertUnitsParams{r.string("source"), r.string("target")};
    }
    case PrimitiveKind::Truncate: {
      Reader r(params, name, {"length"});
      return TruncateParams{r.integer("length")};
    }
    case PrimitiveKind::Cast: {
      Reader r(params, name, {"source", "target"});
      return CastParams{r.string("source"), r.string("target")};
    }
    case PrimitiveKind::EnumToEnum: {
      Reader r(params, name, {"mapping"});
      const auto& list = r.at("mapping");
      if (!list.is_array()) r.fail("'mapping' must be an array");
      EnumToEnumParams p;
      for (const auto& entry : list) {
        Reader e(entry, name, {"from", "to"});
        p.mapping.push_back({e.integer("from"), e.integer("to")});
      }
      return p;
    }
    case PrimitiveKind::Bin: {
      Reader r(params, name, {"bins"});
      const auto& list = r.at("bins");
      if (!list.is_array()) r.fail("'bins' must be an array");
      BinParams p;
      for (const auto& entry : list) {
        Reader e(entry, name, {"lower", "upper", "label"});
        p.bins.push_back({read_bound(e, e.at("lower"), "MIN"), read_bound(e, e.at("upper"), "MAX"),
                          e.string("label")});
      }
      return p;
    }
    case PrimitiveKind::Reduce: {
      Reader r(params, name, {"operation"});
      auto op = parse_reduce_op(r.string("operation"));
      if (!op) r.fail(fmt::format("unknown operation '{}'", r.string("operation")));
      return ReduceParams{*op};
    }
    case PrimitiveKind::ConvertDate: {
      Reader r(params, name, {"source", "target"});
      return ConvertDateParams{r.string("source"), r.string("target")};
    }
    case PrimitiveKind::Round: {
      Reader r(params, name, {"precision"});
      auto p = r.integer("precision");
      if (p < -1000 || p > 1000) r.fail("'precision' is out of range");
      return RoundParams{static_cast<int>(p)};
    }
    case PrimitiveKind::Threshold: {
      Reader r(params, name, {"lower", "upper"});
      return ThresholdParams{r.as_number(r.at("lower"), "lower"),
                             r.as_number(r.at("upper"), "upper")};
    }
  }
  throw Error(Errc::UnknownPrimitive, "unknown primitive");
}

}  // namespace

ordered_json primitive_to_json(const PrimitiveSpec& spec) {
  ordered_json j;
  j["primitive"] = std::string(spec.name());
  j["params"] = std::visit(ParamsJson{}, spec.params());
  return j;
}

PrimitiveSpec primitive_from_json(const ordered_json& j) {
  if (!j.is_object()) throw Error(Errc::InvalidParams, "operation must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key != "primitive" && key != "params") {
      throw Error(Errc::InvalidParams, fmt::format("unexpected operation key '{}'", key));
    }
  }
  if (!j.contains("primitive") || !j["primitive"].is_string()) {
    throw Error(Errc::InvalidParams, "operation requires a string 'primitive'");
  }
  auto name = j["primitive"].get<std::string>();
  auto kind = parse_primitive_name(name);
  if (!kind) throw Error(Errc::UnknownPrimitive, fmt::format("unknown primitive '{}'", name));
  if (!j.contains("params")) {
    throw Error(Errc::InvalidParams, fmt::format("{}: missing 'params'", name));
  }
  return PrimitiveSpec(read_params(*kind, j["params"]));
}

}  // namespace harmonize
