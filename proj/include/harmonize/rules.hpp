#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "harmonize/model.hpp"
#include "harmonize/primitives.hpp"
#include "harmonize/value.hpp"

namespace harmonize {

/// A data element addressed through its dictionary.
struct ElementRef {
  std::string dictionary;
  std::string element;

  /// "dictionary:element"
  std::string str() const { return dictionary + ":" + element; }

  auto operator<=>(const ElementRef&) const = default;
  bool operator==(const ElementRef&) const = default;
};

/// Source element, target element, and the mapping function
/// h = g_n ∘ ... ∘ g_1 as an ordered list of parameterized primitives.
/// Immutable once constructed.
class HarmonizationRule {
 public:
  /// Throws Error(InvalidParams) on empty references or an empty operation list.
  HarmonizationRule(ElementRef source, ElementRef target, std::vector<PrimitiveSpec> operations);

  const ElementRef& source() const noexcept { return source_; }
  const ElementRef& target() const noexcept { return target_; }
  const std::vector<PrimitiveSpec>& operations() const noexcept { return operations_; }

  bool operator==(const HarmonizationRule&) const = default;

 private:
  ElementRef source_;
  ElementRef target_;
  std::vector<PrimitiveSpec> operations_;
};

/// Applies the operations left to right. Missing propagates. A primitive
/// failure is rethrown as OperationError carrying the 1-based operation index.
Value compose_apply(const HarmonizationRule& rule, const Value& x);

struct RuleIssue {
  std::size_t operation = 0;  // 1-based; 0 for rule-level problems
  std::string message;
  std::string expected;
  std::string actual;

  bool operator==(const RuleIssue&) const = default;
};

/// Empty iff both references resolve in `dictionaries` and the type chain
/// source -> op_1 -> ... -> op_n -> target holds.
std::vector<RuleIssue> validate_rule(const HarmonizationRule& rule,
                                     const DictionaryCatalog& dictionaries);

std::string format_issue(const RuleIssue& issue);

nlohmann::ordered_json rule_to_json(const HarmonizationRule& rule);
/// Throws Error(ParseError) on structural problems, plus whatever
/// primitive_from_json raises.
HarmonizationRule rule_from_json(const nlohmann::ordered_json& j);

/// Canonical text: keys "Source", "Target", "Operations" in that order,
/// two-space indentation, trailing newline.
std::string serialize_rule(const HarmonizationRule& rule);

/// Throws Error(ParseError), Error(UnknownPrimitive) or Error(InvalidParams).
HarmonizationRule deserialize_rule(std::string_view text);

/// A batch document {"rules": [...]}, canonical like serialize_rule.
std::string serialize_rules(std::span<const HarmonizationRule> rules);

/// Accepts either a single rule document or a batch document.
std::vector<HarmonizationRule> deserialize_rules(std::string_view text);

}  // namespace harmonize
