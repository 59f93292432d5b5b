#include "harmonize/engine.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <thread>

#include <fmt/format.h>

#include "harmonize/io.hpp"
#include "json.hpp"

namespace harmonize {

using nlohmann::ordered_json;

std::string_view error_policy_name(ErrorPolicy p) noexcept {
  return p == ErrorPolicy::Collect ? "collect" : "fail-fast";
}

std::optional<ErrorPolicy> parse_error_policy(std::string_view name) noexcept {
  if (name == "fail-fast") return ErrorPolicy::FailFast;
  if (name == "collect") return ErrorPolicy::Collect;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Replay log

std::string format_log_line(const LogEntry& entry) {
  ordered_json j;
  j["action"] = rule_to_json(entry.action);
  j["dataset"] = entry.dataset;
  return j.dump();
}

LogEntry parse_log_line(std::string_view line) {
  ordered_json j;
  try {
    j = ordered_json::parse(line.begin(), line.end());
  } catch (const ordered_json::parse_error& e) {
    throw Error(Errc::ParseError, fmt::format("malformed JSON at byte {}", e.byte));
  }
  if (!j.is_object() || j.size() != 2 || !j.contains("action") || !j.contains("dataset")) {
    throw Error(Errc::ParseError, "log entry must have exactly the keys \"action\" and \"dataset\"");
  }
  if (!j["dataset"].is_string() || j["dataset"].get_ref<const std::string&>().empty()) {
    throw Error(Errc::ParseError, "\"dataset\" must be a non-empty string");
  }
  return LogEntry{rule_from_json(j["action"]), j["dataset"].get<std::string>()};
}

std::string ReplayLog::to_ndjson() const {
  std::string out;
  for (const auto& entry : entries_) {
    out += format_log_line(entry);
    out += '\n';
  }
  return out;
}

ReplayLog ReplayLog::parse(std::string_view ndjson) {
  ReplayLog log;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < ndjson.size()) {
    auto end = ndjson.find('\n', pos);
    if (end == std::string_view::npos) end = ndjson.size();
    auto line = ndjson.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    try {
      log.append(parse_log_line(line));
    } catch (const Error& e) {
      throw Error(e.code(), fmt::format("log line {}: {}", line_no, e.what()));
    }
  }
  return log;
}

ReplayLog read_log(const std::filesystem::path& path) {
  auto text = io::read_text_file(path);
  try {
    return ReplayLog::parse(text);
  } catch (const Error& e) {
    throw Error(e.code(), fmt::format("{}: {}", path.string(), e.what()));
  }
}

void write_log(const ReplayLog& log, const std::filesystem::path& path) {
  io::write_text_file(path, log.to_ndjson());
}

// ---------------------------------------------------------------------------
// Harmonization

namespace {

[[noreturn]] void config_error(const std::string& message) {
  throw Error(Errc::JobConfigError, message);
}

/// How one target column is produced.
struct ColumnPlan {
  std::size_t source_column = 0;
  const HarmonizationRule* rule = nullptr;  // null: identity pass-through
};

std::vector<ColumnPlan> plan_file(const DataFile& file, std::span<const HarmonizationRule> rules,
                                  const DataDictionary& target, FileReport& report) {
  const auto& source = file.dictionary();
  DictionaryCatalog catalog;
  catalog.add(file.dictionary_ptr());
  if (target.name() != source.name()) {
    catalog.add(std::make_shared<const DataDictionary>(target));
  }

  std::map<std::string, const HarmonizationRule*> by_target;
  for (const auto& rule : rules) {
    if (rule.source().dictionary != source.name()) {
      config_error(fmt::format("rule {} -> {} does not apply to dataset '{}' (dictionary '{}')",
                               rule.source().str(), rule.target().str(), file.name(),
                               source.name()));
    }
    if (rule.target().dictionary != target.name()) {
      config_error(fmt::format("rule {} -> {} targets a dictionary other than '{}'",
                               rule.source().str(), rule.target().str(), target.name()));
    }
    auto issues = validate_rule(rule, catalog);
    if (!issues.empty()) {
      config_error(fmt::format("rule {} -> {} is invalid: {}", rule.source().str(),
                               rule.target().str(), format_issue(issues.front())));
    }
    auto [it, inserted] = by_target.emplace(rule.target().element, &rule);
    if (!inserted) {
      config_error(fmt::format("target element '{}' is covered by more than one rule for dataset '{}'",
                               rule.target().element, file.name()));
    }
  }

  std::vector<ColumnPlan> plan;
  std::vector<bool> used(source.size(), false);
  for (const auto& element : target.elements()) {
    if (auto it = by_target.find(element.name()); it != by_target.end()) {
      auto column = *source.index_of(it->second->source().element);
      used[column] = true;
      plan.push_back({column, it->second});
      continue;
    }
    auto column = source.index_of(element.name());
    if (!column) {
      config_error(fmt::format("target element '{}' is not covered for dataset '{}'",
                               element.name(), file.name()));
    }
    const auto& candidate = source.elements()[*column];
    if (!(candidate.type() == element.type())) {
      config_error(fmt::format(
          "target element '{}' is not covered for dataset '{}': same-named source element has type {}, target needs {}",
          element.name(), file.name(), candidate.type().name(), element.type().name()));
    }
    used[*column] = true;
    report.passed_through.push_back(element.name());
    plan.push_back({*column, nullptr});
  }
  for (std::size_t i = 0; i < used.size(); ++i) {
    if (!used[i]) report.dropped_columns.push_back(source.elements()[i].name());
  }
  return plan;
}

/// Integers stored in decimal columns are widened so the output conforms.
Value widen(Value v, const ValueType& type) {
  if (type.kind() == Kind::Decimal && v.is_integer()) {
    return Value(static_cast<double>(v.integer()));
  }
  if (type.kind() == Kind::Vector && type.element() == Kind::Decimal && v.is_vector()) {
    ValueVector items = v.items();
    for (auto& item : items) {
      if (item.is_integer()) item = Value(static_cast<double>(item.integer()));
    }
    return Value(std::move(items));
  }
  return v;
}

struct ChunkResult {
  std::vector<CellIssue> issues;
  std::optional<CellError> failure;
};

void run_chunk(const DataFile& file, const std::vector<ColumnPlan>& plan,
               const DataDictionary& target, ErrorPolicy policy, std::size_t begin,
               std::size_t end, std::vector<Row>& out, ChunkResult& result) {
  const auto& source = file.dictionary();
  for (std::size_t r = begin; r < end; ++r) {
    Row row;
    row.reserve(plan.size());
    for (std::size_t c = 0; c < plan.size(); ++c) {
      const auto& element = target.elements()[c];
      const auto& source_name = source.elements()[plan[c].source_column].name();
      const Value& input = file.rows()[r][plan[c].source_column];
      std::optional<CellError> error;
      Value produced;
      try {
        produced = plan[c].rule ? compose_apply(*plan[c].rule, input) : input;
        produced = widen(std::move(produced), element.type());
        if (!conforms(produced, element.type())) {
          error.emplace(Errc::ConformanceError,
                        fmt::format("{} does not conform to {}", describe(produced),
                                    element.type().name()),
                        file.name(), r + 1, source_name, element.name());
        }
      } catch (const OperationError& e) {
        error.emplace(e, file.name(), r + 1, source_name, element.name());
      }
      if (error) {
        if (policy == ErrorPolicy::FailFast) {
          result.failure = std::move(error);
          return;
        }
        result.issues.push_back({error->dataset(), error->row(), error->source_element(),
                                 error->target_element(), error->operation_index(),
                                 error->primitive(), error->code(), error->what()});
        produced = Value();
      }
      row.push_back(std::move(produced));
    }
    out[r] = std::move(row);
  }
}

}  // namespace

HarmonizedFile harmonize_file(const DataFile& file, std::span<const HarmonizationRule> rules,
                              const DictionaryPtr& target, ReplayLog& log,
                              const HarmonizeOptions& options) {
  if (!target) config_error("no target dictionary");
  FileReport report;
  report.dataset = file.name();
  report.rows = file.row_count();
  auto plan = plan_file(file, rules, *target, report);

  const std::size_t rows = file.row_count();
  std::size_t workers = std::max<std::size_t>(1, options.workers);
  workers = std::min(workers, std::max<std::size_t>(1, rows / 256));
  const std::size_t chunk = workers == 0 ? rows : (rows + workers - 1) / workers;

  std::vector<Row> out(rows);
  std::vector<ChunkResult> results(workers);
  if (workers == 1) {
    run_chunk(file, plan, *target, options.policy, 0, rows, out, results[0]);
  } else {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      std::size_t begin = std::min(rows, w * chunk);
      std::size_t end = std::min(rows, begin + chunk);
      threads.emplace_back([&, w, begin, end] {
        run_chunk(file, plan, *target, options.policy, begin, end, out, results[w]);
      });
    }
  }
  // Chunks cover ascending row ranges, so the first failing chunk holds the
  // lowest failing (row, column).
  for (auto& result : results) {
    if (result.failure) throw *result.failure;
    for (auto& issue : result.issues) report.errors.push_back(std::move(issue));
  }

  report.rules_applied = rules.size();
  for (const auto& rule : rules) log.append(LogEntry{rule, file.name()});
  return HarmonizedFile{DataFile(file.name(), target, std::move(out)), std::move(report)};
}

DictionaryPtr with_provenance(const DataDictionary& target) {
  auto elements = target.elements();
  elements.emplace_back(std::string(kSourceDatasetColumn), Variable{std::string(kSourceDatasetColumn)},
                        "Name of the dataset the record came from", ValueType::string());
  elements.emplace_back(std::string(kOriginalIdColumn), Variable{std::string(kOriginalIdColumn)},
                        "1-based record number in the original dataset", ValueType::integer());
  try {
    return std::make_shared<const DataDictionary>(target.name(), std::move(elements));
  } catch (const Error& e) {
    throw Error(Errc::ConformanceError,
                fmt::format("target '{}' cannot take provenance columns: {}", target.name(), e.what()));
  }
}

DataFile integrate(std::span<const DataFile> files, const DictionaryPtr& target) {
  if (!target) throw Error(Errc::ConformanceError, "no target dictionary");
  auto dictionary = with_provenance(*target);
  std::size_t total = 0;
  for (const auto& file : files) {
    if (!(file.dictionary() == *target)) {
      throw Error(Errc::ConformanceError,
                  fmt::format("dataset '{}' uses dictionary '{}', not the target '{}'", file.name(),
                              file.dictionary().name(), target->name()));
    }
    auto violations = validate_file(file);
    if (!violations.empty()) {
      const auto& v = violations.front();
      throw Error(Errc::ConformanceError,
                  fmt::format("dataset '{}' row {} element '{}': {}", file.name(), v.row,
                              v.element, v.reason));
    }
    total += file.row_count();
  }
  std::vector<Row> rows;
  rows.reserve(total);
  for (const auto& file : files) {
    std::int64_t original_id = 0;
    for (const auto& source_row : file.rows()) {
      Row row = source_row;
      row.emplace_back(file.name());
      row.emplace_back(++original_id);
      rows.push_back(std::move(row));
    }
  }
  return DataFile(target->name(), std::move(dictionary), std::move(rows));
}

JobResult run_job(const HarmonizationJob& job) {
  if (!job.target) config_error("no target dictionary");
  std::set<std::string> names;
  for (const auto& input : job.inputs) {
    if (!names.insert(input.file.name()).second) {
      config_error(fmt::format("dataset name '{}' is used by more than one input", input.file.name()));
    }
  }
  JobResult result{{}, DataFile(job.target->name(), with_provenance(*job.target)), {}};
  std::vector<DataFile> outputs;
  for (const auto& input : job.inputs) {
    auto harmonized = harmonize_file(input.file, input.rules, job.target, result.log, job.options);
    outputs.push_back(harmonized.output);
    result.files.push_back(std::move(harmonized));
  }
  result.integrated = integrate(outputs, job.target);
  return result;
}

std::vector<std::string> logged_datasets(const ReplayLog& log) {
  std::vector<std::string> order;
  std::set<std::string> seen;
  for (const auto& entry : log.entries()) {
    if (seen.insert(entry.dataset).second) order.push_back(entry.dataset);
  }
  return order;
}

ReplayResult replay(const ReplayLog& log, std::span<const DataFile> originals,
                    const DictionaryPtr& target, const HarmonizeOptions& options,
                    const std::optional<std::vector<std::string>>& dataset_order) {
  if (!target) config_error("no target dictionary");
  std::map<std::string, std::vector<HarmonizationRule>> actions;
  for (const auto& entry : log.entries()) actions[entry.dataset].push_back(entry.action);

  auto order = dataset_order ? *dataset_order : logged_datasets(log);
  std::set<std::string> listed(order.begin(), order.end());
  if (listed.size() != order.size()) config_error("dataset order names a dataset twice");
  for (const auto& [name, rules] : actions) {
    if (!listed.contains(name)) {
      config_error(fmt::format("log names dataset '{}' which the dataset order omits", name));
    }
  }

  ReplayResult result{DataFile(target->name(), with_provenance(*target)), {}, {}};
  std::vector<DataFile> outputs;
  for (const auto& name : order) {
    auto original = std::find_if(originals.begin(), originals.end(),
                                 [&](const DataFile& f) { return f.name() == name; });
    if (original == originals.end()) {
      throw Error(Errc::MissingOriginal, fmt::format("original dataset '{}' not found", name));
    }
    static const std::vector<HarmonizationRule> kNone;
    auto it = actions.find(name);
    const auto& rules = it == actions.end() ? kNone : it->second;
    auto harmonized = harmonize_file(*original, rules, target, result.log, options);
    outputs.push_back(std::move(harmonized.output));
    result.reports.push_back(std::move(harmonized.report));
  }
  result.integrated = integrate(outputs, target);
  return result;
}

}  // namespace harmonize
