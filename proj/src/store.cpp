#include "harmonize/store.hpp"

#include <algorithm>
#include <system_error>

#include <fmt/format.h>

#include "harmonize/error.hpp"
#include "harmonize/io.hpp"
#include "json.hpp"

namespace harmonize {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr std::string_view kRuleSuffix = ".rule.json";

[[noreturn]] void storage_error(const fs::path& path, const std::string& message) {
  throw Error(Errc::StorageFailure, fmt::format("{}: {}", path.string(), message));
}

ordered_json ref_json(const ElementRef& ref) {
  return {{"dictionary", ref.dictionary}, {"element", ref.element}};
}

ElementRef ref_from(const ordered_json& j) {
  if (!j.is_object() || !j.contains("dictionary") || !j.contains("element") ||
      !j["dictionary"].is_string() || !j["element"].is_string()) {
    throw std::invalid_argument("malformed element reference");
  }
  return {j["dictionary"].get<std::string>(), j["element"].get<std::string>()};
}

bool is_hash(std::string_view s) {
  return s.size() == 64 && s.find_first_not_of("0123456789abcdef") == std::string_view::npos;
}

}  // namespace

bool ref_matches(const ElementRef& pattern, const ElementRef& ref) noexcept {
  return pattern.element == ref.element &&
         (pattern.dictionary.empty() || pattern.dictionary == ref.dictionary);
}

FileRuleStore::FileRuleStore(fs::path root) : root_(std::move(root)) {
  auto index_path = root_ / "index.json";
  std::error_code ec;
  if (fs::exists(index_path, ec)) {
    auto text = io::read_text_file(index_path);
    try {
      auto j = ordered_json::parse(text);
      for (const auto& entry : j.at("rules")) {
        auto hash = entry.at("hash").get<std::string>();
        if (!is_hash(hash)) throw std::invalid_argument("bad hash");
        index_[{ref_from(entry.at("source")), ref_from(entry.at("target"))}] = hash;
      }
    } catch (const std::exception& e) {
      storage_error(index_path, fmt::format("corrupt index: {}", e.what()));
    }
  } else {
    index_ = scan();
  }
}

fs::path FileRuleStore::rule_path(const std::string& hash) const {
  return root_ / "rules" / (hash + std::string(kRuleSuffix));
}

HarmonizationRule FileRuleStore::load(const std::string& hash) const {
  auto path = rule_path(hash);
  auto text = io::read_text_file(path);
  if (io::sha256_hex(text) != hash) storage_error(path, "content does not match its hash");
  try {
    return deserialize_rule(text);
  } catch (const Error& e) {
    storage_error(path, fmt::format("corrupt rule: {}", e.what()));
  }
}

void FileRuleStore::save_index() const {
  ordered_json list = ordered_json::array();
  for (const auto& [key, hash] : index_) {
    list.push_back({{"source", ref_json(key.first)}, {"target", ref_json(key.second)}, {"hash", hash}});
  }
  ordered_json doc;
  doc["rules"] = std::move(list);
  io::write_text_file(root_ / "index.json", doc.dump(2) + "\n");
}

PutResult FileRuleStore::put(const HarmonizationRule& rule) {
  std::error_code ec;
  fs::create_directories(root_ / "rules", ec);
  if (ec) storage_error(root_, fmt::format("cannot create store: {}", ec.message()));

  auto text = serialize_rule(rule);
  auto hash = io::sha256_hex(text);
  Key key{rule.source(), rule.target()};
  auto it = index_.find(key);
  PutResult result{hash, it != index_.end()};

  auto path = rule_path(hash);
  if (!fs::exists(path, ec)) io::write_text_file(path, text);
  std::string previous = result.overwritten ? it->second : std::string();
  index_[key] = hash;
  save_index();
  if (!previous.empty() && previous != hash) fs::remove(rule_path(previous), ec);
  return result;
}

std::optional<HarmonizationRule> FileRuleStore::get(const ElementRef& source,
                                                    const ElementRef& target) const {
  auto it = index_.find({source, target});
  if (it == index_.end()) return std::nullopt;
  auto rule = load(it->second);
  if (rule.source() != source || rule.target() != target) {
    storage_error(rule_path(it->second), "rule does not match its index entry");
  }
  return rule;
}

std::vector<HarmonizationRule> FileRuleStore::query(const std::optional<ElementRef>& source,
                                                    const std::optional<ElementRef>& target) const {
  std::vector<HarmonizationRule> out;
  for (const auto& [key, hash] : index_) {
    if (source && !ref_matches(*source, key.first)) continue;
    if (target && !ref_matches(*target, key.second)) continue;
    out.push_back(load(hash));
  }
  return out;
}

std::map<FileRuleStore::Key, std::string> FileRuleStore::scan() const {
  std::map<Key, std::string> rebuilt;
  auto dir = root_ / "rules";
  std::error_code ec;
  if (fs::is_directory(dir, ec)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
      auto name = entry.path().filename().string();
      if (name.size() > kRuleSuffix.size() && name.ends_with(kRuleSuffix)) files.push_back(entry.path());
    }
    if (ec) storage_error(dir, ec.message());
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
      auto name = file.filename().string();
      auto hash = name.substr(0, name.size() - kRuleSuffix.size());
      if (!is_hash(hash)) continue;
      auto rule = load(hash);
      auto [it, inserted] = rebuilt.emplace(Key{rule.source(), rule.target()}, hash);
      if (!inserted) {
        storage_error(file, fmt::format("second rule for {} -> {}", rule.source().str(),
                                        rule.target().str()));
      }
    }
  }
  return rebuilt;
}

void FileRuleStore::reindex() {
  index_ = scan();
  save_index();
}

}  // namespace harmonize
