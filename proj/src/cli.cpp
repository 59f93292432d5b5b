#include "harmonize/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <iterator>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "harmonize/engine.hpp"
#include "harmonize/io.hpp"
#include "harmonize/store.hpp"
#include "json.hpp"

namespace harmonize::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::StorageFailure:
    case Errc::ParseError:
    case Errc::UnknownPrimitive:
    case Errc::SchemaError:
    case Errc::HeaderMismatch:
    case Errc::CellParseError:
    case Errc::MissingOriginal:
    case Errc::NotFound:
      return kExitEnvironment;
    default:
      return kExitDomain;
  }
}

/// Shared state of one invocation.
struct Context {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
  bool json = false;
  bool verbose = false;

  int fail(const Error& e) const {
    err << fmt::format("error: {}: {}\n", errc_name(e.code()), e.what());
    if (json) {
      ordered_json j;
      j["ok"] = false;
      j["error"] = {{"code", errc_name(e.code())}, {"message", e.what()}};
      out << j.dump(2) << "\n";
    }
    return exit_code_for(e.code());
  }
};

ElementRef parse_ref(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos) return {"", text};
  return {text.substr(0, colon), text.substr(colon + 1)};
}

ordered_json ref_json(const ElementRef& ref) {
  return {{"dictionary", ref.dictionary}, {"element", ref.element}};
}

DictionaryCatalog load_dictionaries(const std::vector<std::string>& paths) {
  DictionaryCatalog catalog;
  for (const auto& path : paths) {
    catalog.add(std::make_shared<const DataDictionary>(io::read_dictionary(path)));
  }
  return catalog;
}

std::vector<HarmonizationRule> load_rules(const std::vector<std::string>& paths) {
  std::vector<HarmonizationRule> rules;
  for (const auto& path : paths) {
    auto text = io::read_text_file(path);
    try {
      for (auto& rule : deserialize_rules(text)) rules.push_back(std::move(rule));
    } catch (const Error& e) {
      throw Error(e.code(), fmt::format("{}: {}", path, e.what()));
    }
  }
  return rules;
}

std::string store_path(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("HARMONIZE_STORE")) return env;
  return {};
}

/// The dictionary whose element names equal the CSV header, excluding none.
DictionaryPtr detect_dictionary(const DictionaryCatalog& catalog, std::string_view text,
                                const std::string& what) {
  auto header = io::parse_csv_header(text);
  std::set<std::string> names(header.begin(), header.end());
  std::vector<DictionaryPtr> matches;
  for (const auto& d : catalog.all()) {
    std::set<std::string> elements;
    for (const auto& e : d->elements()) elements.insert(e.name());
    if (elements == names) matches.push_back(d);
  }
  if (matches.size() == 1) return matches.front();
  if (matches.empty()) {
    throw Error(Errc::HeaderMismatch,
                fmt::format("{}: header matches no loaded dictionary; name one with PATH@DICT", what));
  }
  throw Error(Errc::HeaderMismatch,
              fmt::format("{}: header matches several dictionaries; name one with PATH@DICT", what));
}

DictionaryPtr require_dictionary(const DictionaryCatalog& catalog, const std::string& name) {
  auto d = catalog.find(name);
  if (!d) throw Error(Errc::NotFound, fmt::format("dictionary '{}' was not loaded (use --dict)", name));
  return d;
}

DataFile read_input(const DictionaryCatalog& catalog, std::string spec, std::istream& in) {
  std::optional<std::string> dict_name;
  if (auto at = spec.rfind('@'); at != std::string::npos && catalog.find(spec.substr(at + 1))) {
    dict_name = spec.substr(at + 1);
    spec.resize(at);
  }
  std::string text;
  std::string name;
  if (spec == "-") {
    text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    name = "stdin";
  } else {
    text = io::read_text_file(spec);
    name = fs::path(spec).stem().string();
  }
  auto dictionary = dict_name ? require_dictionary(catalog, *dict_name)
                              : detect_dictionary(catalog, text, spec);
  try {
    return io::parse_csv(text, name, dictionary);
  } catch (const Error& e) {
    throw Error(e.code(), fmt::format("{}: {}", spec, e.what()));
  }
}

ordered_json report_json(const FileReport& r) {
  ordered_json j;
  j["dataset"] = r.dataset;
  j["rows"] = r.rows;
  j["rules_applied"] = r.rules_applied;
  j["passed_through"] = r.passed_through;
  j["dropped_columns"] = r.dropped_columns;
  auto errors = ordered_json::array();
  for (const auto& e : r.errors) {
    errors.push_back({{"row", e.row},
                      {"source_element", e.source_element},
                      {"target_element", e.target_element},
                      {"operation", e.operation},
                      {"primitive", e.primitive},
                      {"code", errc_name(e.code)},
                      {"message", e.message}});
  }
  j["errors"] = std::move(errors);
  return j;
}

void print_report_text(const FileReport& r, std::ostream& os, bool verbose) {
  os << fmt::format("{}: {} rows, rules applied: {}", r.dataset, r.rows, r.rules_applied);
  if (!r.errors.empty()) os << fmt::format(", {} cell errors", r.errors.size());
  os << "\n";
  if (!r.dropped_columns.empty()) {
    os << fmt::format("  warning: dropped columns not in target: {}\n",
                      fmt::join(r.dropped_columns, ", "));
  }
  if (verbose) {
    if (!r.passed_through.empty()) {
      os << fmt::format("  passed through: {}\n", fmt::join(r.passed_through, ", "));
    }
    for (const auto& e : r.errors) os << "  " << e.message << "\n";
  }
}

void write_output(const DataFile& file, const std::string& path, bool labels, std::ostream& out) {
  io::CanonicalWriterConfig config{labels};
  if (path == "-") {
    out << io::to_csv(file, config);
  } else {
    io::write_data_file(file, config, path);
  }
}

// ---------------------------------------------------------------------------

struct ValidateArgs {
  std::vector<std::string> rules;
  std::vector<std::string> dicts;
};

int cmd_validate(const ValidateArgs& a, Context& ctx) {
  auto catalog = load_dictionaries(a.dicts);
  auto rules = load_rules(a.rules);
  bool all_valid = true;
  auto list = ordered_json::array();
  for (const auto& rule : rules) {
    auto issues = validate_rule(rule, catalog);
    all_valid = all_valid && issues.empty();
    if (ctx.json) {
      auto items = ordered_json::array();
      for (const auto& i : issues) {
        items.push_back({{"operation", i.operation},
                         {"message", i.message},
                         {"expected", i.expected},
                         {"actual", i.actual}});
      }
      list.push_back({{"source", ref_json(rule.source())},
                      {"target", ref_json(rule.target())},
                      {"valid", issues.empty()},
                      {"issues", std::move(items)}});
    } else {
      ctx.out << fmt::format("{} {} -> {}\n", issues.empty() ? "VALID" : "INVALID",
                             rule.source().str(), rule.target().str());
      for (const auto& i : issues) ctx.out << "  " << format_issue(i) << "\n";
    }
  }
  if (ctx.json) {
    ordered_json j;
    j["ok"] = all_valid;
    j["rules"] = std::move(list);
    ctx.out << j.dump(2) << "\n";
  }
  return all_valid ? kExitOk : kExitDomain;
}

struct HarmonizeArgs {
  std::vector<std::string> inputs;
  std::vector<std::string> dicts;
  std::vector<std::string> rules;
  std::string store;
  std::string target;
  std::string output = "-";
  std::string log;
  std::string report;
  std::string policy = "fail-fast";
  bool labels = false;
  unsigned workers = 1;
};

/// Rules applicable to `file`: source in its dictionary, target in `target`.
std::vector<HarmonizationRule> rules_for(const DataFile& file, const DataDictionary& target,
                                         const std::vector<HarmonizationRule>& from_files,
                                         const FileRuleStore* store) {
  std::vector<HarmonizationRule> out;
  const auto& dict = file.dictionary().name();
  for (const auto& rule : from_files) {
    if (rule.source().dictionary == dict && rule.target().dictionary == target.name()) {
      out.push_back(rule);
    }
  }
  if (store) {
    for (const auto& element : file.dictionary().elements()) {
      for (auto& rule : store->query(ElementRef{dict, element.name()}, std::nullopt)) {
        if (rule.target().dictionary == target.name()) out.push_back(std::move(rule));
      }
    }
  }
  return out;
}

int cmd_harmonize(const HarmonizeArgs& a, Context& ctx) {
  auto policy = parse_error_policy(a.policy);
  if (!policy) throw Error(Errc::ParseError, fmt::format("unknown error policy '{}'", a.policy));
  auto catalog = load_dictionaries(a.dicts);
  auto target = require_dictionary(catalog, a.target);
  auto rule_files = load_rules(a.rules);
  std::optional<FileRuleStore> store;
  if (auto path = store_path(a.store); !path.empty() && a.rules.empty()) store.emplace(path);

  HarmonizationJob job;
  job.target = target;
  job.options = {*policy, a.workers};
  for (const auto& spec : a.inputs) {
    auto file = read_input(catalog, spec, ctx.in);
    auto rules = rules_for(file, *target, rule_files, store ? &*store : nullptr);
    job.inputs.push_back({std::move(file), std::move(rules)});
  }
  auto result = run_job(job);

  write_output(result.integrated, a.output, a.labels, ctx.out);
  if (!a.log.empty()) write_log(result.log, a.log);

  ordered_json summary;
  summary["ok"] = true;
  summary["rows"] = result.integrated.row_count();
  summary["log_entries"] = result.log.size();
  auto files = ordered_json::array();
  for (const auto& f : result.files) files.push_back(report_json(f.report));
  summary["datasets"] = std::move(files);
  if (!a.report.empty()) io::write_text_file(a.report, summary.dump(2) + "\n");

  std::ostream& info = a.output == "-" ? ctx.err : ctx.out;
  if (ctx.json) {
    info << summary.dump(2) << "\n";
  } else {
    for (const auto& f : result.files) print_report_text(f.report, info, ctx.verbose);
    info << fmt::format("integrated {} rows; {} log entries\n", result.integrated.row_count(),
                        result.log.size());
  }
  return kExitOk;
}

struct ReplayArgs {
  std::string log;
  std::string originals;
  std::vector<std::string> dicts;
  std::string target;
  std::string output;
  std::string verify;
  std::vector<std::string> order;
  std::string policy = "fail-fast";
  bool labels = false;
  unsigned workers = 1;
};

int cmd_replay(const ReplayArgs& a, Context& ctx) {
  auto policy = parse_error_policy(a.policy);
  if (!policy) throw Error(Errc::ParseError, fmt::format("unknown error policy '{}'", a.policy));
  auto catalog = load_dictionaries(a.dicts);
  auto target = require_dictionary(catalog, a.target);
  auto log = read_log(a.log);

  std::map<std::string, std::string> logged_dictionary;
  for (const auto& e : log.entries()) logged_dictionary.emplace(e.dataset, e.action.source().dictionary);
  auto order = a.order.empty() ? logged_datasets(log) : a.order;

  std::vector<DataFile> originals;
  for (const auto& name : order) {
    auto path = fs::path(a.originals) / (name + ".csv");
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) {
      throw Error(Errc::MissingOriginal,
                  fmt::format("original dataset '{}' not found at {}", name, path.string()));
    }
    auto text = io::read_text_file(path);
    auto it = logged_dictionary.find(name);
    auto dictionary = it != logged_dictionary.end() ? require_dictionary(catalog, it->second)
                                                    : detect_dictionary(catalog, text, path.string());
    originals.push_back(io::parse_csv(text, name, dictionary));
  }
  auto result = replay(log, originals, target, {*policy, a.workers}, order);

  if (!a.output.empty()) write_output(result.integrated, a.output, a.labels, ctx.out);
  std::optional<bool> match;
  if (!a.verify.empty()) {
    auto prior = io::read_text_file(a.verify);
    match = prior == io::to_csv(result.integrated);
  }
  std::ostream& info = a.output == "-" ? ctx.err : ctx.out;
  if (ctx.json) {
    ordered_json j;
    j["ok"] = !match || *match;
    j["rows"] = result.integrated.row_count();
    j["log_entries"] = log.size();
    if (match) j["verify"] = *match ? "MATCH" : "MISMATCH";
    info << j.dump(2) << "\n";
  } else {
    info << fmt::format("replayed {} log entries over {} datasets; {} rows\n", log.size(),
                        order.size(), result.integrated.row_count());
    if (match) info << (*match ? "MATCH" : "MISMATCH") << "\n";
  }
  return match && !*match ? kExitDomain : kExitOk;
}

struct RulesArgs {
  std::string store;
  std::string source;
  std::string target;
  std::vector<std::string> rules;
  std::vector<std::string> dicts;
};

std::optional<ElementRef> optional_ref(const std::string& text) {
  if (text.empty()) return std::nullopt;
  return parse_ref(text);
}

FileRuleStore open_store(const RulesArgs& a) {
  auto path = store_path(a.store);
  if (path.empty()) throw Error(Errc::NotFound, "no store given (use --store or HARMONIZE_STORE)");
  return FileRuleStore(path);
}

int cmd_rules_list(const RulesArgs& a, Context& ctx) {
  auto store = open_store(a);
  auto rules = store.query(optional_ref(a.source), optional_ref(a.target));
  if (ctx.json) {
    auto list = ordered_json::array();
    for (const auto& r : rules) {
      list.push_back({{"source", ref_json(r.source())}, {"target", ref_json(r.target())}});
    }
    ctx.out << list.dump(2) << "\n";
  } else {
    for (const auto& r : rules) {
      ctx.out << fmt::format("{} -> {} ({} operations)\n", r.source().str(), r.target().str(),
                             r.operations().size());
    }
  }
  return kExitOk;
}

int cmd_rules_show(const RulesArgs& a, Context& ctx) {
  auto store = open_store(a);
  auto rules = store.query(optional_ref(a.source), optional_ref(a.target));
  if (ctx.json) {
    auto list = ordered_json::array();
    for (const auto& r : rules) list.push_back(rule_to_json(r));
    ctx.out << list.dump(2) << "\n";
  } else {
    for (const auto& r : rules) ctx.out << serialize_rule(r);
  }
  return kExitOk;
}

int cmd_rules_put(const RulesArgs& a, Context& ctx) {
  auto store = open_store(a);
  auto rules = load_rules(a.rules);
  if (!a.dicts.empty()) {
    auto catalog = load_dictionaries(a.dicts);
    for (const auto& rule : rules) {
      auto issues = validate_rule(rule, catalog);
      if (!issues.empty()) {
        ctx.err << fmt::format("error: rule {} -> {} is invalid: {}\n", rule.source().str(),
                               rule.target().str(), format_issue(issues.front()));
        return kExitDomain;
      }
    }
  }
  auto list = ordered_json::array();
  for (const auto& rule : rules) {
    auto put = store.put(rule);
    if (ctx.json) {
      list.push_back({{"source", ref_json(rule.source())},
                      {"target", ref_json(rule.target())},
                      {"hash", put.hash},
                      {"overwritten", put.overwritten}});
    } else {
      ctx.out << fmt::format("{} {} -> {} {}\n", put.overwritten ? "overwrote" : "stored",
                             rule.source().str(), rule.target().str(), put.hash);
    }
  }
  if (ctx.json) ctx.out << list.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err) {
  Context ctx{in, out, err};
  CLI::App app{"Harmonize tabular data files with composable, replayable rules", "harmonize"};
  app.require_subcommand(1);
  std::string format = "text";
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));
    sub->add_flag("-v,--verbose", ctx.verbose, "More detail in reports");
  };

  ValidateArgs va;
  auto* validate = app.add_subcommand("validate", "Type-check rules against dictionaries");
  validate->add_option("--rule", va.rules, "Rule file (single or batch)")->required();
  validate->add_option("--dict", va.dicts, "Dictionary JSON file")->required();
  add_common(validate);

  HarmonizeArgs ha;
  auto* harmonize = app.add_subcommand("harmonize", "Harmonize and integrate data files");
  harmonize->add_option("--input", ha.inputs, "Input CSV as PATH or PATH@DICTIONARY; - for stdin")
      ->required();
  harmonize->add_option("--dict", ha.dicts, "Dictionary JSON file")->required();
  harmonize->add_option("--rule", ha.rules, "Rule file (single or batch)");
  harmonize->add_option("--store", ha.store, "Rule store directory (default $HARMONIZE_STORE)");
  harmonize->add_option("--target", ha.target, "Target dictionary name")->required();
  harmonize->add_option("--output", ha.output, "Integrated CSV; - for stdout");
  harmonize->add_option("--log", ha.log, "Replay log to write");
  harmonize->add_option("--report", ha.report, "Sidecar JSON run report");
  harmonize->add_option("--error-policy", ha.policy, "fail-fast or collect")
      ->check(CLI::IsMember({"fail-fast", "collect"}));
  harmonize->add_flag("--labels", ha.labels, "Write enum labels instead of codes");
  harmonize->add_option("--workers", ha.workers, "Row-parallel workers per file")
      ->check(CLI::Range(1u, 256u));
  add_common(harmonize);

  ReplayArgs ra;
  auto* replay_cmd = app.add_subcommand("replay", "Re-run a replay log against original files");
  replay_cmd->add_option("--log", ra.log, "Replay log")->required();
  replay_cmd->add_option("--originals", ra.originals, "Directory holding <dataset>.csv files")
      ->required();
  replay_cmd->add_option("--dict", ra.dicts, "Dictionary JSON file")->required();
  replay_cmd->add_option("--target", ra.target, "Target dictionary name")->required();
  replay_cmd->add_option("--output", ra.output, "Replayed CSV; - for stdout");
  replay_cmd->add_option("--verify", ra.verify, "Prior output to compare byte-for-byte");
  replay_cmd->add_option("--input-order", ra.order, "Dataset order, including rule-free inputs")
      ->delimiter(',');
  replay_cmd->add_option("--error-policy", ra.policy, "fail-fast or collect")
      ->check(CLI::IsMember({"fail-fast", "collect"}));
  replay_cmd->add_flag("--labels", ra.labels, "Write enum labels instead of codes");
  replay_cmd->add_option("--workers", ra.workers, "Row-parallel workers per file")
      ->check(CLI::Range(1u, 256u));
  add_common(replay_cmd);

  RulesArgs rua;
  auto* rules = app.add_subcommand("rules", "Query and update a rule store");
  rules->require_subcommand(1);
  auto add_store = [&](CLI::App* sub) {
    sub->add_option("--store", rua.store, "Rule store directory (default $HARMONIZE_STORE)");
    add_common(sub);
  };
  auto* list = rules->add_subcommand("list", "List stored rules");
  auto* show = rules->add_subcommand("show", "Print stored rules in canonical form");
  for (auto* sub : {list, show}) {
    add_store(sub);
    sub->add_option("--source", rua.source, "Source element as DICT:ELEMENT or ELEMENT");
    sub->add_option("--target", rua.target, "Target element as DICT:ELEMENT or ELEMENT");
  }
  auto* put = rules->add_subcommand("put", "Store rules");
  add_store(put);
  put->add_option("--rule", rua.rules, "Rule file (single or batch)")->required();
  put->add_option("--dict", rua.dicts, "Validate against these dictionaries first");

  std::vector<const char*> argv{"harmonize"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    return kExitEnvironment;
  }
  ctx.json = format == "json";

  try {
    if (*validate) return cmd_validate(va, ctx);
    if (*harmonize) return cmd_harmonize(ha, ctx);
    if (*replay_cmd) return cmd_replay(ra, ctx);
    if (*list) return cmd_rules_list(rua, ctx);
    if (*show) return cmd_rules_show(rua, ctx);
    if (*put) return cmd_rules_put(rua, ctx);
  } catch (const Error& e) {
    return ctx.fail(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitEnvironment;
  }
  return kExitEnvironment;
}

}  // namespace harmonize::cli
