#include "random_jobs.hpp"

#include <functional>
#include <limits>

#include <fmt/format.h>

#include "harmonize/io.hpp"
#include "harmonize/units.hpp"

namespace harmonize::testing {

namespace {

using Gen = std::function<Value(Draw&, bool bad)>;

/// Source type, operations, and a generator of source cells the operations accept.
struct Chain {
  ValueType source;
  std::vector<PrimitiveSpec> ops;
  Gen gen;
};

// ---------------------------------------------------------------------------
// Cell data

double random_decimal(Draw& d) {
  switch (d.below(6)) {
    case 0: return static_cast<double>(d.between(-1000, 1000));
    case 1: return static_cast<double>(d.between(-100000, 100000)) / 1000.0;
    case 2: return static_cast<double>(d.between(0, 99999)) * 1e-7;
    case 3: return static_cast<double>(d.between(1, 9)) * 1e15 + 0.5;
    case 4: return d.pick(std::vector<double>{2.675, 0.125, -0.5, 1.005, 13.226, 0.1 + 0.2});
    default: return (d.unit() - 0.5) * 2.0e4;
  }
}

std::string random_text(Draw& d) {
  static const std::vector<std::string> pieces = {
      "a", "Z", "q", "7", " ", ",", "\"", "\n", "-", "é", "日本", "😀", "=", "x y", "''", "\\"};
  std::string s;
  auto n = d.below(12);
  for (std::int64_t i = 0; i < n; ++i) s += d.pick(pieces);
  return s;
}

std::int64_t days_in(std::int64_t year, std::int64_t month) {
  static const int days[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
  return month == 2 && leap ? 29 : days[month - 1];
}

std::string format_date(const std::string& pattern, std::int64_t Y, std::int64_t m, std::int64_t d,
                        std::int64_t H, std::int64_t M, std::int64_t S) {
  std::string out;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (pattern[i] != '%' || i + 1 == pattern.size()) {
      out += pattern[i];
      continue;
    }
    switch (pattern[++i]) {
      case 'Y': out += fmt::format("{:04}", Y); break;
      case 'm': out += fmt::format("{:02}", m); break;
      case 'd': out += fmt::format("{:02}", d); break;
      case 'H': out += fmt::format("{:02}", H); break;
      case 'M': out += fmt::format("{:02}", M); break;
      case 'S': out += fmt::format("{:02}", S); break;
      default: out += pattern[i];
    }
  }
  return out;
}

Value random_date(Draw& d, const std::string& pattern) {
  auto Y = d.between(1900, 2099);
  auto m = d.between(1, 12);
  auto day = d.between(1, days_in(Y, m));
  return Value(Date{format_date(pattern, Y, m, day, d.between(0, 23), d.between(0, 59), d.between(0, 59))});
}

Value maybe_missing(Draw& d, Value v) { return d.chance(5) ? Value() : v; }

ValueVector bits(Draw& d, std::size_t n, bool as_bool) {
  ValueVector out;
  for (std::size_t i = 0; i < n; ++i) {
    bool b = d.chance(40);
    out.push_back(as_bool ? Value(b) : Value(std::int64_t{b}));
  }
  return out;
}

Value random_of_type(Draw& d, const ValueType& t) {
  switch (t.kind()) {
    case Kind::String: return Value(random_text(d));
    case Kind::Integer: return Value(d.between(-1000000, 1000000));
    case Kind::Decimal: {
      if (d.chance(3)) {
        return Value(d.pick(std::vector<double>{std::numeric_limits<double>::quiet_NaN(),
                                                std::numeric_limits<double>::infinity(),
                                                -std::numeric_limits<double>::infinity()}));
      }
      return Value(random_decimal(d));
    }
    case Kind::Boolean: return Value(d.chance(50));
    case Kind::Date: return random_date(d, "%Y-%m-%d");
    case Kind::Enum: return Value(EnumCode{d.pick(t.codes()->entries()).code});
    case Kind::Vector: {
      ValueVector items;
      auto n = d.below(5);
      for (std::int64_t i = 0; i < n; ++i) {
        switch (t.element()) {
          case Kind::Integer: items.emplace_back(d.between(-50, 50)); break;
          case Kind::Decimal: items.emplace_back(random_decimal(d)); break;
          case Kind::Boolean: items.emplace_back(d.chance(50)); break;
          default: items.emplace_back(random_text(d)); break;
        }
      }
      return Value(std::move(items));
    }
    default: return Value();
  }
}

// ---------------------------------------------------------------------------
// Chains ending in a given target type

PrimitiveSpec random_units(Draw& d) {
  auto cat = units::catalog();
  for (;;) {
    const auto& a = cat[static_cast<std::size_t>(d.below(static_cast<std::int64_t>(cat.size())))];
    const auto& b = cat[static_cast<std::size_t>(d.below(static_cast<std::int64_t>(cat.size())))];
    if (a.dimension == b.dimension) return PrimitiveSpec::convert_units(std::string(a.name), std::string(b.name));
  }
}

PrimitiveSpec random_round(Draw& d) { return PrimitiveSpec::round(static_cast<int>(d.between(-2, 6))); }

PrimitiveSpec decimal_threshold(Draw& d) {
  double lo = random_decimal(d);
  double hi = lo + std::abs(random_decimal(d));
  return PrimitiveSpec::threshold(lo, hi);
}

PrimitiveSpec integer_threshold(Draw& d) {
  auto lo = d.between(-500, 100);
  return PrimitiveSpec::threshold(lo, lo + d.between(0, 600));
}

std::string digits_text(Draw& d, std::int64_t lo, std::int64_t hi) {
  auto v = d.between(lo, hi);
  switch (d.below(4)) {
    case 0: return fmt::format(" {} ", v);
    case 1: return v >= 0 ? fmt::format("+{}", v) : fmt::format("{}", v);
    default: return fmt::format("{}", v);
  }
}

/// Contiguous integer bins over the whole line, labelled like the target.
PrimitiveSpec covering_bins(Draw& d, const CodedValueSet& target) {
  std::vector<BinInterval> bins;
  auto n = static_cast<std::int64_t>(target.size());
  std::int64_t edge = d.between(-200, 0);
  for (std::int64_t i = 0; i < n; ++i) {
    auto lower = i == 0 ? BinBound::min() : BinBound::at(edge + 1);
    if (i > 0) ++edge;
    edge += d.between(0, 60);
    auto upper = i + 1 == n ? BinBound::max() : BinBound::at(edge);
    bins.push_back({lower, upper, target.entries()[static_cast<std::size_t>(i)].label});
  }
  return PrimitiveSpec::bin(std::move(bins));
}

Chain decimal_chain(Draw& d) {
  switch (d.below(5)) {
    case 0: {
      std::vector<PrimitiveSpec> ops{random_units(d)};
      if (d.chance(60)) ops.push_back(random_round(d));
      if (d.chance(40)) ops.push_back(decimal_threshold(d));
      if (d.chance(30)) ops.push_back(random_round(d));
      return {ValueType::decimal(), ops, [](Draw& g, bool) { return maybe_missing(g, Value(random_decimal(g))); }};
    }
    case 1: {
      std::vector<PrimitiveSpec> ops{PrimitiveSpec::cast("string", "decimal"), random_round(d)};
      if (d.chance(50)) ops.push_back(random_units(d));
      return {ValueType::string(), ops, [](Draw& g, bool bad) {
                if (bad && g.chance(10)) return Value("n/a");
                return maybe_missing(g, Value(fmt::format("{:.{}f}", random_decimal(g), g.below(5))));
              }};
    }
    case 2: {
      bool ints = d.chance(50);
      std::vector<PrimitiveSpec> ops{PrimitiveSpec::reduce(ReduceOp::Sum)};
      if (d.chance(50)) ops.push_back(random_round(d));
      return {ValueType::vector(ints ? Kind::Integer : Kind::Decimal), ops, [ints](Draw& g, bool) {
                ValueVector items;
                auto n = g.below(6);
                for (std::int64_t i = 0; i < n; ++i) {
                  items.push_back(ints ? Value(g.between(-100, 100)) : Value(random_decimal(g)));
                }
                return maybe_missing(g, Value(std::move(items)));
              }};
    }
    case 3: {
      std::vector<PrimitiveSpec> ops{PrimitiveSpec::cast("integer", "decimal")};
      if (d.chance(50)) ops.push_back(decimal_threshold(d));
      ops.push_back(random_round(d));
      return {ValueType::integer(), ops, [](Draw& g, bool) { return maybe_missing(g, Value(g.between(-100000, 100000))); }};
    }
    default:
      return {ValueType::integer(), {decimal_threshold(d)},
              [](Draw& g, bool) { return maybe_missing(g, Value(g.between(-1000, 1000))); }};
  }
}

Chain integer_chain(Draw& d) {
  switch (d.below(4)) {
    case 0: {
      std::vector<PrimitiveSpec> ops{PrimitiveSpec::cast("string", "integer")};
      if (d.chance(60)) ops.push_back(integer_threshold(d));
      return {ValueType::string(), ops, [](Draw& g, bool bad) {
                if (bad && g.chance(10)) return Value("12x");
                return maybe_missing(g, Value(digits_text(g, -1000, 1000)));
              }};
    }
    case 1: {
      std::vector<PrimitiveSpec> ops{integer_threshold(d)};
      if (d.chance(40)) ops.push_back(integer_threshold(d));
      return {ValueType::integer(), ops, [](Draw& g, bool) { return maybe_missing(g, Value(g.between(-1000, 1000))); }};
    }
    case 2:
      return {ValueType::boolean(), {PrimitiveSpec::cast("boolean", "integer")},
              [](Draw& g, bool) { return maybe_missing(g, Value(g.chance(50))); }};
    default:
      return {ValueType::vector(Kind::Integer), {PrimitiveSpec::reduce(ReduceOp::OneHot)},
              [](Draw& g, bool bad) {
                auto n = static_cast<std::size_t>(g.between(1, 6));
                ValueVector items(n, Value(std::int64_t{0}));
                items[static_cast<std::size_t>(g.below(static_cast<std::int64_t>(n)))] = Value(std::int64_t{1});
                if (bad && g.chance(10)) items.assign(n, Value(std::int64_t{1}));
                return maybe_missing(g, Value(std::move(items)));
              }};
  }
}

Chain string_chain(Draw& d) {
  auto length = d.between(0, 8);
  switch (d.below(4)) {
    case 0: {
      std::vector<PrimitiveSpec> ops{PrimitiveSpec::truncate(length)};
      if (d.chance(30)) ops.push_back(PrimitiveSpec::truncate(d.between(0, 8)));
      return {ValueType::string(), ops, [](Draw& g, bool) { return maybe_missing(g, Value(random_text(g))); }};
    }
    case 1:
      return {ValueType::integer(),
              {PrimitiveSpec::cast("integer", "string"), PrimitiveSpec::truncate(length)},
              [](Draw& g, bool) { return maybe_missing(g, Value(g.between(-100000, 100000))); }};
    case 2:
      return {ValueType::decimal(), {random_round(d), PrimitiveSpec::cast("decimal", "string")},
              [](Draw& g, bool) { return maybe_missing(g, Value(random_decimal(g))); }};
    default:
      return {ValueType::boolean(), {PrimitiveSpec::cast("boolean", "string")},
              [](Draw& g, bool) { return maybe_missing(g, Value(g.chance(50))); }};
  }
}

Chain boolean_chain(Draw& d) {
  switch (d.below(3)) {
    case 0: {
      bool as_bool = d.chance(50);
      auto op = d.pick(std::vector<ReduceOp>{ReduceOp::Any, ReduceOp::None, ReduceOp::All});
      return {ValueType::vector(as_bool ? Kind::Boolean : Kind::Integer), {PrimitiveSpec::reduce(op)},
              [as_bool](Draw& g, bool) {
                return maybe_missing(g, Value(bits(g, static_cast<std::size_t>(g.below(6)), as_bool)));
              }};
    }
    case 1:
      return {ValueType::string(), {PrimitiveSpec::cast("string", "boolean")}, [](Draw& g, bool bad) {
                if (bad && g.chance(10)) return Value("maybe");
                return maybe_missing(g, Value(g.pick(std::vector<std::string>{"true", "false", "TRUE", " False "})));
              }};
    default:
      return {ValueType::integer(), {PrimitiveSpec::cast("integer", "boolean")}, [](Draw& g, bool bad) {
                if (bad && g.chance(10)) return Value(std::int64_t{7});
                return maybe_missing(g, Value(g.below(2)));
              }};
  }
}

Chain enum_chain(Draw& d, const CodedValueSet& target) {
  switch (d.below(4)) {
    case 0: {
      std::vector<CodedValue> codes;
      std::vector<CodeMapping> mapping;
      auto k = d.between(1, 6);
      auto base = d.between(0, 20);
      for (std::int64_t i = 0; i < k; ++i) {
        codes.push_back({base + 3 * i, fmt::format("answer {}", i)});
        mapping.push_back({base + 3 * i, d.pick(target.entries()).code});
      }
      auto type = ValueType::enumeration(CodedValueSet(codes));
      return {type, {PrimitiveSpec::enum_to_enum(mapping)}, [codes](Draw& g, bool) {
                return maybe_missing(g, Value(EnumCode{g.pick(codes).code}));
              }};
    }
    case 1: {
      std::vector<PrimitiveSpec> ops;
      if (d.chance(40)) ops.push_back(integer_threshold(d));
      ops.push_back(covering_bins(d, target));
      return {ValueType::integer(), ops, [](Draw& g, bool) { return maybe_missing(g, Value(g.between(-300, 400))); }};
    }
    case 2:
      return {ValueType::string(), {PrimitiveSpec::cast("string", "integer"), covering_bins(d, target)},
              [](Draw& g, bool bad) {
                if (bad && g.chance(10)) return Value("");
                return maybe_missing(g, Value(digits_text(g, -300, 400)));
              }};
    default:
      return {ValueType::decimal(), {PrimitiveSpec::round(0), covering_bins(d, target)},
              [](Draw& g, bool) { return maybe_missing(g, Value(static_cast<double>(g.between(-3000, 4000)) / 10.0)); }};
  }
}

const std::vector<std::pair<std::string, std::string>> kDatePatterns = {
    {"%Y-%m-%d", "%m/%d/%Y"},
    {"%m/%d/%Y", "%Y-%m-%d"},
    {"%d.%m.%Y %H:%M", "%Y-%m-%dT%H:%M"},
    {"%Y%m%d%H%M%S", "%Y-%m-%d %H:%M:%S"},
    {"%Y-%m-%d %H:%M:%S", "%d/%m/%Y"},
    {"%Y-%m-%d", "%Y"},
    {"%m/%d/%Y", "%d %% %m"},
};

Chain date_chain(Draw& d) {
  auto [from, to] = d.pick(kDatePatterns);
  return {ValueType::date(), {PrimitiveSpec::convert_date(from, to)}, [from = from](Draw& g, bool bad) {
            if (bad && g.chance(10)) return Value(Date{"13/45/2025"});
            return maybe_missing(g, random_date(g, from));
          }};
}

Chain chain_for(Draw& d, const ValueType& target) {
  switch (target.kind()) {
    case Kind::Decimal: return decimal_chain(d);
    case Kind::Integer: return integer_chain(d);
    case Kind::String: return string_chain(d);
    case Kind::Boolean: return boolean_chain(d);
    case Kind::Enum: return enum_chain(d, *target.codes());
    default: return date_chain(d);
  }
}

ValueType random_target_type(Draw& d, bool rule_capable) {
  auto n = rule_capable ? 6 : 9;
  switch (d.below(n)) {
    case 0: return ValueType::decimal();
    case 1: return ValueType::integer();
    case 2: return ValueType::string();
    case 3: return ValueType::boolean();
    case 4: {
      std::vector<CodedValue> codes;
      auto m = d.between(1, 6);
      for (std::int64_t i = 0; i < m; ++i) codes.push_back({i, fmt::format("level {}", i)});
      return ValueType::enumeration(CodedValueSet(std::move(codes)));
    }
    case 5: return ValueType::date();
    case 6: return ValueType::vector(Kind::Integer);
    case 7: return ValueType::vector(Kind::Decimal);
    default: return ValueType::vector(Kind::Boolean);
  }
}

std::string random_name(Draw& d, const std::string& prefix) {
  static const std::vector<std::string> tails = {"", "_x", " with space", "-é", "\"q\"", "日本", "a:b"};
  return fmt::format("{}{}{}", prefix, d.below(1000), d.pick(tails));
}

}  // namespace

HarmonizationRule random_rule(Draw& draw) {
  auto target = random_target_type(draw, true);
  auto chain = chain_for(draw, target);
  ElementRef source{random_name(draw, "dict"), random_name(draw, "el")};
  ElementRef dest{random_name(draw, "dict"), random_name(draw, "el")};
  return HarmonizationRule(source, dest, chain.ops);
}

RandomJob random_job(Draw& draw, std::size_t max_rows) {
  RandomJob out;
  bool collect = draw.chance(33);
  out.job.options.policy = collect ? ErrorPolicy::Collect : ErrorPolicy::FailFast;
  out.job.options.workers = static_cast<unsigned>(draw.between(1, 4));

  std::vector<DataElement> target_elements;
  auto width = draw.between(1, 6);
  for (std::int64_t i = 0; i < width; ++i) {
    auto name = fmt::format("t{}", i);
    target_elements.emplace_back(name, Variable{name}, fmt::format("target {}", i),
                                 random_target_type(draw, false));
  }
  auto target = std::make_shared<const DataDictionary>("target", target_elements);
  out.job.target = target;

  auto inputs = draw.between(1, 3);
  for (std::int64_t n = 0; n < inputs; ++n) {
    auto dict_name = fmt::format("source{}", n);
    std::vector<DataElement> elements;
    std::vector<Gen> gens;
    std::vector<HarmonizationRule> rules;
    for (const auto& t : target_elements) {
      bool vector_target = t.type().kind() == Kind::Vector;
      if (vector_target || draw.chance(30)) {
        elements.push_back(t);
        auto type = t.type();
        gens.push_back([type](Draw& g, bool) { return maybe_missing(g, random_of_type(g, type)); });
        continue;
      }
      auto chain = chain_for(draw, t.type());
      auto source_name = fmt::format("{}_src", t.name());
      elements.emplace_back(source_name, Variable{t.name()}, "source", chain.source);
      gens.push_back(chain.gen);
      rules.emplace_back(ElementRef{dict_name, source_name}, ElementRef{"target", t.name()}, chain.ops);
    }
    auto extras = draw.below(3);
    for (std::int64_t i = 0; i < extras; ++i) {
      auto type = random_target_type(draw, false);
      elements.emplace_back(fmt::format("unused{}", i), Variable{"unused"}, "unused", type);
      gens.push_back([type](Draw& g, bool) { return maybe_missing(g, random_of_type(g, type)); });
    }
    // Column order of a source file is independent of the target's.
    for (std::size_t i = elements.size(); i > 1; --i) {
      auto j = static_cast<std::size_t>(draw.below(static_cast<std::int64_t>(i)));
      std::swap(elements[i - 1], elements[j]);
      std::swap(gens[i - 1], gens[j]);
    }
    auto dictionary = std::make_shared<const DataDictionary>(dict_name, elements);
    DataFile file(fmt::format("dataset{}", n), dictionary);
    auto rows = draw.between(0, static_cast<std::int64_t>(max_rows));
    for (std::int64_t r = 0; r < rows; ++r) {
      Row row;
      for (auto& gen : gens) row.push_back(gen(draw, collect));
      file.append(std::move(row));
    }
    auto csv = io::to_csv(file);
    out.job.inputs.push_back({io::parse_csv(csv, file.name(), dictionary), std::move(rules)});
    out.input_csv.push_back(std::move(csv));
  }
  return out;
}

}  // namespace harmonize::testing
