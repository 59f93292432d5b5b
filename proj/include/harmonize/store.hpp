#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "harmonize/rules.hpp"

namespace harmonize {

struct PutResult {
  std::string hash;          // identity of the stored rule
  bool overwritten = false;  // a rule for the same (source, target) existed
};

/// Rule storage keyed by (source, target). At most one rule per pair.
class RuleStore {
 public:
  virtual ~RuleStore() = default;

  virtual PutResult put(const HarmonizationRule& rule) = 0;
  virtual std::optional<HarmonizationRule> get(const ElementRef& source,
                                               const ElementRef& target) const = 0;
  /// Rules matching every given constraint, ordered by (source, target).
  /// With neither constraint, every stored rule.
  virtual std::vector<HarmonizationRule> query(const std::optional<ElementRef>& source,
                                               const std::optional<ElementRef>& target) const = 0;
};

/// Directory-backed store:
///   <root>/rules/<sha256 of canonical text>.rule.json
///   <root>/index.json   {"rules": [{"source", "target", "hash"}...]} sorted by pair
/// The index can always be rebuilt from rules/. Single writer, many readers.
class FileRuleStore final : public RuleStore {
 public:
  /// Opens (without creating) the store at `root`. A missing index with a
  /// present rules/ directory is rebuilt by scanning. Throws Error(StorageFailure).
  explicit FileRuleStore(std::filesystem::path root);

  const std::filesystem::path& root() const noexcept { return root_; }

  /// Throws Error(StorageFailure).
  PutResult put(const HarmonizationRule& rule) override;
  /// Throws Error(StorageFailure) naming the file when it is unreadable,
  /// corrupt, or does not match its recorded hash.
  std::optional<HarmonizationRule> get(const ElementRef& source,
                                       const ElementRef& target) const override;
  std::vector<HarmonizationRule> query(const std::optional<ElementRef>& source,
                                       const std::optional<ElementRef>& target) const override;

  /// Rebuilds index.json from the rule files on disk.
  void reindex();

  std::size_t size() const noexcept { return index_.size(); }

 private:
  using Key = std::pair<ElementRef, ElementRef>;

  std::filesystem::path rule_path(const std::string& hash) const;
  HarmonizationRule load(const std::string& hash) const;
  std::map<Key, std::string> scan() const;
  void save_index() const;

  std::filesystem::path root_;
  std::map<Key, std::string> index_;
};

/// Whether `ref` matches a query pattern: an empty dictionary matches any.
bool ref_matches(const ElementRef& pattern, const ElementRef& ref) noexcept;

}  // namespace harmonize
