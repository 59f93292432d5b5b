#include <fmt/format.h>

#include "harmonize/error.hpp"
#include "harmonize/io.hpp"
#include "json.hpp"

namespace harmonize::io {

using nlohmann::ordered_json;

namespace {

[[noreturn]] void schema_error(const std::string& pointer, const std::string& message) {
  throw Error(Errc::SchemaError, fmt::format("{}: {}", pointer.empty() ? "/" : pointer, message));
}

const std::string& require_string(const ordered_json& obj, const char* key,
                                  const std::string& pointer) {
  if (!obj.contains(key)) schema_error(pointer, fmt::format("missing \"{}\"", key));
  const auto& v = obj[key];
  if (!v.is_string()) schema_error(pointer + "/" + key, "must be a string");
  return v.get_ref<const std::string&>();
}

void allow_keys(const ordered_json& obj, std::initializer_list<std::string_view> keys,
                const std::string& pointer) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (auto k : keys) ok = ok || k == key;
    if (!ok) schema_error(pointer, fmt::format("unexpected key \"{}\"", key));
  }
}

CodedValueSet read_codes(const ordered_json& list, const std::string& pointer) {
  if (!list.is_array()) schema_error(pointer, "must be an array");
  std::vector<CodedValue> entries;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto& entry = list[i];
    auto here = fmt::format("{}/{}", pointer, i);
    if (!entry.is_object()) schema_error(here, "must be an object");
    allow_keys(entry, {"code", "label"}, here);
    if (!entry.contains("code") || !entry["code"].is_number_integer()) {
      schema_error(here, "requires an integer \"code\"");
    }
    if (entry["code"].is_number_unsigned() &&
        entry["code"].get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
      schema_error(here + "/code", "out of range");
    }
    entries.push_back({entry["code"].get<std::int64_t>(), require_string(entry, "label", here)});
  }
  try {
    return CodedValueSet(std::move(entries));
  } catch (const Error& e) {
    schema_error(pointer, e.what());
  }
}

DataElement read_element(const ordered_json& j, const std::string& pointer) {
  if (!j.is_object()) schema_error(pointer, "must be an object");
  allow_keys(j, {"name", "variable", "prompt", "type", "codes"}, pointer);
  const auto& name = require_string(j, "name", pointer);
  const auto& variable = require_string(j, "variable", pointer);
  const auto& prompt = require_string(j, "prompt", pointer);
  const auto& type_name = require_string(j, "type", pointer);
  ValueType type;
  if (type_name == "enum") {
    if (!j.contains("codes")) schema_error(pointer, "enum element requires \"codes\"");
    type = ValueType::enumeration(read_codes(j["codes"], pointer + "/codes"));
  } else {
    auto parsed = parse_type_name(type_name);
    if (!parsed) schema_error(pointer + "/type", fmt::format("unknown type \"{}\"", type_name));
    if (j.contains("codes")) schema_error(pointer, "\"codes\" is only allowed on enum elements");
    type = *parsed;
  }
  try {
    return DataElement(name, Variable{variable}, prompt, std::move(type));
  } catch (const Error& e) {
    schema_error(pointer, e.what());
  }
}

}  // namespace

std::string dictionary_to_json(const DataDictionary& dictionary) {
  ordered_json j;
  j["name"] = dictionary.name();
  auto elements = ordered_json::array();
  for (const auto& e : dictionary.elements()) {
    ordered_json el;
    el["name"] = e.name();
    el["variable"] = e.variable().name;
    el["prompt"] = e.prompt();
    el["type"] = e.type().name();
    if (const auto* codes = e.codes()) {
      auto list = ordered_json::array();
      for (const auto& c : codes->entries()) list.push_back({{"code", c.code}, {"label", c.label}});
      el["codes"] = std::move(list);
    }
    elements.push_back(std::move(el));
  }
  j["elements"] = std::move(elements);
  return j.dump(2) + "\n";
}

DataDictionary parse_dictionary(std::string_view text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text.begin(), text.end());
  } catch (const ordered_json::parse_error& e) {
    throw Error(Errc::ParseError, fmt::format("malformed JSON at byte {}: {}", e.byte, e.what()));
  }
  if (!j.is_object()) schema_error("", "dictionary must be an object");
  allow_keys(j, {"name", "elements"}, "");
  const auto& name = require_string(j, "name", "");
  if (!j.contains("elements") || !j["elements"].is_array()) {
    schema_error("/elements", "must be an array");
  }
  std::vector<DataElement> elements;
  const auto& list = j["elements"];
  for (std::size_t i = 0; i < list.size(); ++i) {
    elements.push_back(read_element(list[i], fmt::format("/elements/{}", i)));
  }
  try {
    return DataDictionary(name, std::move(elements));
  } catch (const Error& e) {
    schema_error("/elements", e.what());
  }
}

DataDictionary read_dictionary(const std::filesystem::path& path) {
  auto text = read_text_file(path);
  try {
    return parse_dictionary(text);
  } catch (const Error& e) {
    throw Error(e.code(), fmt::format("{}: {}", path.string(), e.what()));
  }
}

void write_dictionary(const DataDictionary& dictionary, const std::filesystem::path& path) {
  write_text_file(path, dictionary_to_json(dictionary));
}

}  // namespace harmonize::io
