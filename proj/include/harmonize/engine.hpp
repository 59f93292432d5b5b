#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "harmonize/error.hpp"
#include "harmonize/model.hpp"
#include "harmonize/rules.hpp"

namespace harmonize {

inline constexpr std::string_view kSourceDatasetColumn = "source_dataset";
inline constexpr std::string_view kOriginalIdColumn = "original_id";

enum class ErrorPolicy {
  FailFast,  // abort on the first bad cell, with row/column/operation context
  Collect,   // substitute missing and keep going; failures land in the report
};

std::string_view error_policy_name(ErrorPolicy p) noexcept;
std::optional<ErrorPolicy> parse_error_policy(std::string_view name) noexcept;

struct HarmonizeOptions {
  ErrorPolicy policy = ErrorPolicy::FailFast;
  /// Row-parallel workers per file. Output and logs do not depend on this.
  unsigned workers = 1;
};

/// One applied rule: the full rule ("action") and the dataset it ran on.
struct LogEntry {
  HarmonizationRule action;
  std::string dataset;

  bool operator==(const LogEntry&) const = default;
};

/// Ordered record of rule applications, serialized as newline-delimited JSON
/// with exactly the keys "action" and "dataset".
class ReplayLog {
 public:
  void append(LogEntry entry) { entries_.push_back(std::move(entry)); }
  const std::vector<LogEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  std::string to_ndjson() const;
  /// Throws Error(ParseError) naming the offending line, or rule errors.
  static ReplayLog parse(std::string_view ndjson);

  bool operator==(const ReplayLog&) const = default;

 private:
  std::vector<LogEntry> entries_;
};

std::string format_log_line(const LogEntry& entry);
LogEntry parse_log_line(std::string_view line);

ReplayLog read_log(const std::filesystem::path& path);
void write_log(const ReplayLog& log, const std::filesystem::path& path);

struct CellIssue {
  std::string dataset;
  std::size_t row = 0;  // 1-based
  std::string source_element;
  std::string target_element;
  std::size_t operation = 0;  // 1-based; 0 outside any operation
  std::string primitive;
  Errc code = Errc::CastError;
  std::string message;
};

struct FileReport {
  std::string dataset;
  std::size_t rows = 0;
  std::size_t rules_applied = 0;
  std::vector<std::string> passed_through;
  std::vector<std::string> dropped_columns;  // source columns the target does not use
  std::vector<CellIssue> errors;             // collect mode only
};

struct HarmonizedFile {
  DataFile output;
  FileReport report;
};

/// Produces a new file conforming to `target`. Each target element comes from
/// exactly one rule, or is passed through when the input has an element with
/// the same name and response type. One LogEntry per rule is appended to
/// `log` in rule order once the file is done. The input is never modified.
/// Throws Error(JobConfigError) for uncovered, ambiguous or mistyped
/// coverage; CellError on bad data under fail-fast.
HarmonizedFile harmonize_file(const DataFile& file, std::span<const HarmonizationRule> rules,
                              const DictionaryPtr& target, ReplayLog& log,
                              const HarmonizeOptions& options = {});

/// `target` followed by the provenance columns source_dataset and original_id.
DictionaryPtr with_provenance(const DataDictionary& target);

/// Row-wise concatenation in input order plus provenance columns. Each input
/// must use `target` and validate cleanly. Throws Error(ConformanceError).
DataFile integrate(std::span<const DataFile> files, const DictionaryPtr& target);

struct JobInput {
  DataFile file;
  std::vector<HarmonizationRule> rules;
};

struct HarmonizationJob {
  std::vector<JobInput> inputs;
  DictionaryPtr target;
  HarmonizeOptions options;
};

struct JobResult {
  std::vector<HarmonizedFile> files;
  DataFile integrated;
  ReplayLog log;
};

JobResult run_job(const HarmonizationJob& job);

struct ReplayResult {
  DataFile integrated;
  ReplayLog log;
  std::vector<FileReport> reports;
};

/// Re-executes the logged actions against the named originals and integrates.
/// Datasets are processed in the order given by `dataset_order`, or in order
/// of first appearance in the log. `dataset_order` may name originals with no
/// logged action (pure pass-through inputs). Throws Error(MissingOriginal).
ReplayResult replay(const ReplayLog& log, std::span<const DataFile> originals,
                    const DictionaryPtr& target, const HarmonizeOptions& options = {},
                    const std::optional<std::vector<std::string>>& dataset_order = std::nullopt);

/// Datasets named by the log, in order of first appearance.
std::vector<std::string> logged_datasets(const ReplayLog& log);

}  // namespace harmonize
