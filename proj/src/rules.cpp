#include "harmonize/rules.hpp"

#include <fmt/format.h>

#include "harmonize/error.hpp"

namespace harmonize {

using nlohmann::ordered_json;

HarmonizationRule::HarmonizationRule(ElementRef source, ElementRef target,
                                     std::vector<PrimitiveSpec> operations)
    : source_(std::move(source)), target_(std::move(target)), operations_(std::move(operations)) {
  auto check_ref = [](const ElementRef& ref, const char* role) {
    if (ref.dictionary.empty() || ref.element.empty()) {
      throw Error(Errc::InvalidParams,
                  fmt::format("{} reference needs both a dictionary and an element", role));
    }
  };
  check_ref(source_, "source");
  check_ref(target_, "target");
  if (operations_.empty()) {
    throw Error(Errc::InvalidParams,
                fmt::format("rule {} -> {} has no operations", source_.str(), target_.str()));
  }
}

Value compose_apply(const HarmonizationRule& rule, const Value& x) {
  Value current = x;
  const auto& ops = rule.operations();
  for (std::size_t i = 0; i < ops.size(); ++i) {
    try {
      current = apply_primitive(ops[i], current);
    } catch (const OperationError&) {
      throw;
    } catch (const Error& e) {
      throw OperationError(e.code(), i + 1, std::string(ops[i].name()), e.what());
    }
  }
  return current;
}

namespace {

/// Whether a produced type satisfies the target element's declared type.
bool satisfies(const ValueType& produced, const ValueType& target) {
  if (target.kind() == Kind::Enum) {
    return produced.kind() == Kind::Enum && produced.codes() && target.codes() &&
           produced.codes()->subset_of(*target.codes());
  }
  if (target.kind() == Kind::Vector) {
    return produced.kind() == Kind::Vector && produced.element() == target.element();
  }
  if (target.kind() == Kind::Decimal) {
    return produced.kind() == Kind::Decimal || produced.kind() == Kind::Integer;
  }
  return produced.kind() == target.kind();
}

std::string codes_text(const CodedValueSet& set) {
  std::string out = "{";
  for (std::size_t i = 0; i < set.entries().size(); ++i) {
    if (i) out += ",";
    const auto& e = set.entries()[i];
    out += set.labelled() ? fmt::format("{}:{}", e.code, e.label) : std::to_string(e.code);
  }
  return out + "}";
}

std::string type_text(const ValueType& t) {
  if (t.kind() == Kind::Enum && t.codes()) return "enum" + codes_text(*t.codes());
  return t.name();
}

}  // namespace

std::vector<RuleIssue> validate_rule(const HarmonizationRule& rule,
                                     const DictionaryCatalog& dictionaries) {
  std::vector<RuleIssue> issues;
  const auto* source = dictionaries.find_element(rule.source().dictionary, rule.source().element);
  const auto* target = dictionaries.find_element(rule.target().dictionary, rule.target().element);
  if (!source) {
    issues.push_back({0, fmt::format("unresolved source {}", rule.source().str()), "", ""});
  }
  if (!target) {
    issues.push_back({0, fmt::format("unresolved target {}", rule.target().str()), "", ""});
  }
  if (!source) return issues;

  ValueType current = source->type();
  std::string provider = fmt::format("source {}", rule.source().str());
  const auto& ops = rule.operations();
  for (std::size_t i = 0; i < ops.size(); ++i) {
    auto sig = io_types(ops[i]);
    if (!accepts(sig.input, current)) {
      issues.push_back({i + 1,
                        fmt::format("operation {} ({}) expects {}, {} provides {}", i + 1,
                                    ops[i].name(), sig.input.name(), provider, current.name()),
                        sig.input.name(), current.name()});
      // Keep checking the rest of the chain from the declared output.
      current = sig.output.is_signature_only() ? ValueType::decimal() : sig.output;
    } else {
      current = result_type(ops[i], current);
    }
    provider = fmt::format("operation {} ({})", i + 1, ops[i].name());
  }
  if (target && !satisfies(current, target->type())) {
    issues.push_back({ops.size(),
                      fmt::format("{} produces {}, target {} requires {}", provider,
                                  type_text(current), rule.target().str(),
                                  type_text(target->type())),
                      type_text(target->type()), type_text(current)});
  }
  return issues;
}

std::string format_issue(const RuleIssue& issue) {
  if (issue.operation == 0) return issue.message;
  return fmt::format("op {}: {}", issue.operation, issue.message);
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

ordered_json ref_json(const ElementRef& ref) {
  return {{"dictionary", ref.dictionary}, {"element", ref.element}};
}

[[noreturn]] void parse_error(const std::string& message) {
  throw Error(Errc::ParseError, message);
}

ElementRef read_ref(const ordered_json& j, const char* role) {
  if (!j.is_object()) parse_error(fmt::format("\"{}\" must be an object", role));
  for (const auto& [key, value] : j.items()) {
    if (key != "dictionary" && key != "element") {
      parse_error(fmt::format("unexpected key '{}' in \"{}\"", key, role));
    }
  }
  for (const char* key : {"dictionary", "element"}) {
    if (!j.contains(key) || !j[key].is_string()) {
      parse_error(fmt::format("\"{}\" requires a string '{}'", role, key));
    }
  }
  return {j["dictionary"].get<std::string>(), j["element"].get<std::string>()};
}

ordered_json parse_json(std::string_view text) {
  try {
    return ordered_json::parse(text.begin(), text.end());
  } catch (const ordered_json::parse_error& e) {
    parse_error(fmt::format("malformed JSON at byte {}: {}", e.byte, e.what()));
  }
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace

ordered_json rule_to_json(const HarmonizationRule& rule) {
  ordered_json j;
  j["Source"] = ref_json(rule.source());
  j["Target"] = ref_json(rule.target());
  auto ops = ordered_json::array();
  for (const auto& op : rule.operations()) ops.push_back(primitive_to_json(op));
  j["Operations"] = std::move(ops);
  return j;
}

HarmonizationRule rule_from_json(const ordered_json& j) {
  if (!j.is_object()) parse_error("rule must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key != "Source" && key != "Target" && key != "Operations") {
      parse_error(fmt::format("unexpected rule key '{}'", key));
    }
  }
  for (const char* key : {"Source", "Target", "Operations"}) {
    if (!j.contains(key)) parse_error(fmt::format("rule is missing \"{}\"", key));
  }
  const auto& ops_json = j["Operations"];
  if (!ops_json.is_array()) parse_error("\"Operations\" must be an array");
  std::vector<PrimitiveSpec> ops;
  ops.reserve(ops_json.size());
  for (const auto& op : ops_json) ops.push_back(primitive_from_json(op));
  return HarmonizationRule(read_ref(j["Source"], "Source"), read_ref(j["Target"], "Target"),
                           std::move(ops));
}

std::string serialize_rule(const HarmonizationRule& rule) { return dump(rule_to_json(rule)); }

HarmonizationRule deserialize_rule(std::string_view text) {
  return rule_from_json(parse_json(text));
}

std::string serialize_rules(std::span<const HarmonizationRule> rules) {
  auto list = ordered_json::array();
  for (const auto& r : rules) list.push_back(rule_to_json(r));
  ordered_json j;
  j["rules"] = std::move(list);
  return dump(j);
}

std::vector<HarmonizationRule> deserialize_rules(std::string_view text) {
  auto j = parse_json(text);
  if (j.is_object() && j.contains("rules")) {
    if (j.size() != 1 || !j["rules"].is_array()) {
      parse_error("batch document must be exactly {\"rules\": [...]}");
    }
    std::vector<HarmonizationRule> out;
    for (const auto& r : j["rules"]) out.push_back(rule_from_json(r));
    return out;
  }
  return {rule_from_json(j)};
}

}  // namespace harmonize
