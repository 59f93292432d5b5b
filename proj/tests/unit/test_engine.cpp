#include <memory>
#include <string>

#include "check_error.hpp"
#include "doctest.h"
#include "harmonize/engine.hpp"
#include "harmonize/io.hpp"
#include "support/random_jobs.hpp"
#include "temp_dir.hpp"

using namespace harmonize;

namespace {

const std::vector<CodedValue> kRanges = {{0, "30 or Under"}, {1, "31-40"}, {2, "41-50"},
                                         {3, "51-60"},       {4, "61-70"}, {5, "Over 70"}};

DictionaryPtr source_dict() {
  return std::make_shared<const DataDictionary>(
      "survey", std::vector<DataElement>{
                    DataElement("record_id", {"id"}, "", ValueType::integer()),
                    DataElement("age_text", {"age"}, "", ValueType::string()),
                    DataElement("notes", {"notes"}, "", ValueType::string())});
}

DictionaryPtr target_dict() {
  return std::make_shared<const DataDictionary>(
      "harmonized", std::vector<DataElement>{
                        DataElement("record_id", {"id"}, "", ValueType::integer()),
                        DataElement("age_range", {"age"}, "", ValueType::enumeration(CodedValueSet(kRanges)))});
}

HarmonizationRule age_rule(const std::string& dataset = "survey") {
  auto b = [](std::int64_t v) { return BinBound::at(v); };
  return HarmonizationRule(
      {dataset, "age_text"}, {"harmonized", "age_range"},
      {PrimitiveSpec::cast("string", "integer"),
       PrimitiveSpec::bin({{BinBound::min(), b(30), "30 or Under"},
                           {b(31), b(40), "31-40"},
                           {b(41), b(50), "41-50"},
                           {b(51), b(60), "51-60"},
                           {b(61), b(70), "61-70"},
                           {b(71), BinBound::max(), "Over 70"}})});
}

// Age range code by decade arithmetic, independent of Bin.
std::int64_t expected_range(std::int64_t age) {
  if (age <= 30) return 0;
  if (age > 70) return 5;
  return (age - 1) / 10 - 2;
}

DataFile survey_file(const std::vector<std::string>& ages) {
  DataFile f("survey", source_dict());
  std::int64_t id = 1;
  for (const auto& a : ages) f.append({Value(id++), Value(a), Value("n")});
  return f;
}

}  // namespace

TEST_CASE("log policy names") {
  CHECK(parse_error_policy("fail-fast") == ErrorPolicy::FailFast);
  CHECK(parse_error_policy("collect") == ErrorPolicy::Collect);
  CHECK_FALSE(parse_error_policy("ignore").has_value());
  CHECK(error_policy_name(ErrorPolicy::Collect) == "collect");
}

TEST_CASE("harmonize_file bins ages and passes ids through") {
  std::vector<std::string> ages;
  for (int a = 0; a <= 110; ++a) ages.push_back(std::to_string(a));
  auto file = survey_file(ages);
  std::vector<HarmonizationRule> rules = {age_rule()};
  ReplayLog log;
  auto out = harmonize_file(file, rules, target_dict(), log);
  REQUIRE(out.output.row_count() == ages.size());
  for (std::size_t r = 0; r < ages.size(); ++r) {
    CHECK(out.output.cell(r, 0) == file.cell(r, 0));
    CHECK(out.output.cell(r, 1) == Value(EnumCode{expected_range(static_cast<std::int64_t>(r))}));
  }
  CHECK(out.report.rules_applied == 1);
  CHECK(out.report.passed_through == std::vector<std::string>{"record_id"});
  CHECK(out.report.dropped_columns == std::vector<std::string>{"notes"});
  CHECK(validate_file(out.output).empty());
  REQUIRE(log.size() == 1);
  CHECK(log.entries()[0] == LogEntry{age_rule(), "survey"});
  CHECK(file.cell(0, 1) == Value("0"));
}

TEST_CASE("identity job with no rules reproduces the input") {
  auto d = source_dict();
  DataFile f("same", d, {{Value(1), Value("x"), Value()}, {Value(), Value(""), Value("y")}});
  ReplayLog log;
  auto out = harmonize_file(f, {}, d, log);
  CHECK(equivalent(out.output, f, 0.0));
  CHECK(log.empty());
  CHECK(out.report.passed_through.size() == 3);
}

TEST_CASE("fail-fast locates the bad cell") {
  auto file = survey_file({"23", "47", "abc", "oops"});
  std::vector<HarmonizationRule> rules = {age_rule()};
  ReplayLog log;
  try {
    harmonize_file(file, rules, target_dict(), log);
    FAIL("expected CellError");
  } catch (const CellError& e) {
    CHECK(e.code() == Errc::CastError);
    CHECK(e.row() == 3);
    CHECK(e.dataset() == "survey");
    CHECK(e.source_element() == "age_text");
    CHECK(e.target_element() == "age_range");
    CHECK(e.operation_index() == 1);
    CHECK(e.primitive() == "Cast");
    CHECK(std::string(e.what()).find("abc") != std::string::npos);
  }
  CHECK(log.empty());

  SUBCASE("the first failing row wins across workers") {
    std::vector<std::string> ages(3000, "40");
    ages[2100] = "x";
    ages[700] = "200.5";
    auto big = survey_file(ages);
    ReplayLog l;
    try {
      harmonize_file(big, rules, target_dict(), l, {ErrorPolicy::FailFast, 4});
      FAIL("expected CellError");
    } catch (const CellError& e) {
      CHECK(e.row() == 701);
    }
  }
}

TEST_CASE("collect substitutes missing and reports every bad cell") {
  auto file = survey_file({"23", "abc", "47", "", "-"});
  std::vector<HarmonizationRule> rules = {age_rule()};
  ReplayLog log;
  auto out = harmonize_file(file, rules, target_dict(), log, {ErrorPolicy::Collect, 1});
  CHECK(out.output.cell(0, 1) == Value(EnumCode{0}));
  CHECK(out.output.cell(1, 1).is_missing());
  CHECK(out.output.cell(2, 1) == Value(EnumCode{2}));
  REQUIRE(out.report.errors.size() == 3);
  CHECK(out.report.errors[0].row == 2);
  CHECK(out.report.errors[0].operation == 1);
  CHECK(out.report.errors[0].primitive == "Cast");
  CHECK(out.report.errors[0].code == Errc::CastError);
  CHECK(out.report.errors[1].row == 4);
  CHECK(out.report.errors[2].row == 5);
  CHECK(log.size() == 1);
}

TEST_CASE("job configuration errors") {
  auto file = survey_file({"23"});
  auto target = target_dict();
  ReplayLog log;

  SUBCASE("uncovered target element") {
    auto msg = error_message([&] { harmonize_file(file, {}, target, log); });
    CHECK(msg.find("age_range") != std::string::npos);
    CHECK_ERRC(harmonize_file(file, {}, target, log), Errc::JobConfigError);
  }
  SUBCASE("two rules for one target element") {
    HarmonizationRule other({"survey", "notes"}, {"harmonized", "age_range"},
                            {PrimitiveSpec::cast("string", "integer"),
                             PrimitiveSpec::bin({{BinBound::min(), BinBound::max(), "30 or Under"}})});
    std::vector<HarmonizationRule> rules = {age_rule(), other};
    CHECK_ERRC(harmonize_file(file, rules, target, log), Errc::JobConfigError);
  }
  SUBCASE("rule written for another dictionary") {
    std::vector<HarmonizationRule> rules = {age_rule("elsewhere")};
    CHECK_ERRC(harmonize_file(file, rules, target, log), Errc::JobConfigError);
  }
  SUBCASE("rule whose chain does not type-check") {
    std::vector<HarmonizationRule> rules = {HarmonizationRule(
        {"survey", "age_text"}, {"harmonized", "age_range"},
        {PrimitiveSpec::bin({{BinBound::min(), BinBound::max(), "30 or Under"}})})};
    CHECK_ERRC(harmonize_file(file, rules, target, log), Errc::JobConfigError);
  }
  SUBCASE("same name but different type is not a pass-through") {
    auto d = std::make_shared<const DataDictionary>(
        "survey", std::vector<DataElement>{DataElement("record_id", {"id"}, "", ValueType::string()),
                                           DataElement("age_text", {"age"}, "", ValueType::string())});
    DataFile f("survey", d, {{Value("1"), Value("23")}});
    std::vector<HarmonizationRule> rules = {age_rule()};
    auto msg = error_message([&] { harmonize_file(f, rules, target, log); });
    CHECK(msg.find("record_id") != std::string::npos);
  }
  SUBCASE("duplicate dataset names in a job") {
    HarmonizationJob job{{{file, {age_rule()}}, {file, {age_rule()}}}, target, {}};
    CHECK_ERRC(run_job(job), Errc::JobConfigError);
  }
  CHECK(log.empty());
}

TEST_CASE("integrate adds provenance") {
  auto target = target_dict();
  DataFile a("a", target, {{Value(1), Value(EnumCode{0})}, {Value(2), Value()}});
  DataFile b("b", target, {{Value(9), Value(EnumCode{5})}});
  std::vector<DataFile> files = {a, b};
  auto all = integrate(files, target);
  REQUIRE(all.row_count() == 3);
  CHECK(all.dictionary().size() == 4);
  CHECK(all.dictionary().elements()[2].name() == kSourceDatasetColumn);
  CHECK(all.dictionary().elements()[3].name() == kOriginalIdColumn);
  CHECK(all.cell(0, 2) == Value("a"));
  CHECK(all.cell(1, 3) == Value(2));
  CHECK(all.cell(2, 2) == Value("b"));
  CHECK(all.cell(2, 3) == Value(1));

  auto none = integrate(std::span<const DataFile>{}, target);
  CHECK(none.row_count() == 0);
  CHECK(none.dictionary() == *with_provenance(*target));

  DataFile bad("bad", target, {{Value(1), Value(EnumCode{42})}});
  std::vector<DataFile> with_bad = {a, bad};
  auto msg = error_message([&] { integrate(with_bad, target); });
  CHECK(msg.find("bad") != std::string::npos);
  CHECK_ERRC(integrate(with_bad, target), Errc::ConformanceError);
  std::vector<DataFile> wrong_dict = {survey_file({"1"})};
  CHECK_ERRC(integrate(wrong_dict, target), Errc::ConformanceError);
}

TEST_CASE("log serialization") {
  ReplayLog log;
  log.append({age_rule(), "survey"});
  log.append({age_rule("other"), "other"});
  auto text = log.to_ndjson();
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);
  CHECK(text.rfind("{\"action\":", 0) == 0);
  CHECK(ReplayLog::parse(text) == log);
  CHECK(parse_log_line(format_log_line(log.entries()[1])) == log.entries()[1]);
  CHECK(ReplayLog::parse("").empty());

  CHECK_ERRC(ReplayLog::parse("{\"dataset\":\"x\"}\n"), Errc::ParseError);
  CHECK_ERRC(ReplayLog::parse(format_log_line(log.entries()[0]) + "\nnot json\n"), Errc::ParseError);
  CHECK(error_message([&] { ReplayLog::parse(format_log_line(log.entries()[0]) + "\nnot json\n"); })
            .find("line 2") != std::string::npos);
  auto extra = nlohmann::ordered_json::parse(format_log_line(log.entries()[0]));
  extra["when"] = "now";
  CHECK_ERRC(ReplayLog::parse(extra.dump()), Errc::ParseError);
  extra.erase("when");
  extra["dataset"] = "";
  CHECK_ERRC(ReplayLog::parse(extra.dump()), Errc::ParseError);

  TempDir tmp;
  write_log(log, tmp.path / "run.log");
  CHECK(read_log(tmp.path / "run.log") == log);
}

TEST_CASE("replay reproduces the integrated file") {
  auto target = target_dict();
  HarmonizationJob job;
  job.target = target;
  auto first = survey_file({"23", "47", "", "93"});
  DataFile survey("survey", first.dictionary_ptr());
  for (const auto& row : first.rows()) {
    survey.append({row[0], row[1] == Value("") ? Value() : row[1], row[2]});
  }
  job.inputs.push_back({survey, {age_rule()}});
  auto clinic_dict = std::make_shared<const DataDictionary>("clinic", source_dict()->elements());
  job.inputs.push_back({DataFile("clinic", clinic_dict, {{Value(5), Value("31"), Value()}}), {age_rule("clinic")}});
  // A rule-free input needs a source dictionary that already matches the target.
  job.inputs.push_back({DataFile("registry", target, {{Value(8), Value(EnumCode{4})}}), {}});
  auto result = run_job(job);
  CHECK(result.integrated.row_count() == 6);
  CHECK(result.log.size() == 2);
  CHECK(logged_datasets(result.log) == std::vector<std::string>{"survey", "clinic"});

  std::vector<DataFile> originals;
  for (const auto& in : job.inputs) originals.push_back(in.file);
  auto again = replay(result.log, originals, target, {}, std::vector<std::string>{"survey", "clinic", "registry"});
  CHECK(io::to_csv(again.integrated) == io::to_csv(result.integrated));
  CHECK(again.log == result.log);

  auto logged_only = replay(result.log, originals, target);
  CHECK(logged_only.integrated.row_count() == 5);

  std::vector<DataFile> missing_one = {originals[0]};
  auto msg = error_message([&] { replay(result.log, missing_one, target); });
  CHECK(msg.find("clinic") != std::string::npos);
  CHECK_ERRC(replay(result.log, missing_one, target), Errc::MissingOriginal);
  CHECK_ERRC(replay(result.log, originals, target, {}, std::vector<std::string>{"survey", "clinic", "ghost"}),
             Errc::MissingOriginal);
  CHECK_ERRC(replay(result.log, originals, target, {}, std::vector<std::string>{"survey"}), Errc::JobConfigError);
  CHECK_ERRC(replay(result.log, originals, target, {}, std::vector<std::string>{"survey", "clinic", "survey"}),
             Errc::JobConfigError);
}

TEST_CASE("output does not depend on the worker count") {
  testing::Draw draw(4242);
  for (int i = 0; i < 25; ++i) {
    auto rj = testing::random_job(draw, 1500);
    auto job = rj.job;
    job.options.workers = 1;
    auto serial = run_job(job);
    job.options.workers = 4;
    auto parallel = run_job(job);
    CHECK(io::to_csv(serial.integrated) == io::to_csv(parallel.integrated));
    CHECK(serial.log == parallel.log);
    REQUIRE(serial.files.size() == parallel.files.size());
    for (std::size_t k = 0; k < serial.files.size(); ++k) {
      const auto& a = serial.files[k].report.errors;
      const auto& b = parallel.files[k].report.errors;
      REQUIRE(a.size() == b.size());
      for (std::size_t e = 0; e < a.size(); ++e) {
        CHECK(a[e].row == b[e].row);
        CHECK(a[e].target_element == b[e].target_element);
      }
    }
  }
}

TEST_CASE("random jobs exercise collect mode and parallel workers") {
  testing::Draw draw(20250314);
  int collect_with_errors = 0, multi_worker = 0, multi_input = 0, pass_through = 0;
  for (int i = 0; i < 100; ++i) {
    auto rj = testing::random_job(draw, 300);
    auto result = run_job(rj.job);
    if (rj.job.options.workers > 1) ++multi_worker;
    if (rj.job.inputs.size() > 1) ++multi_input;
    for (const auto& f : result.files) {
      if (!f.report.errors.empty()) {
        CHECK(rj.job.options.policy == ErrorPolicy::Collect);
        ++collect_with_errors;
      }
      if (!f.report.passed_through.empty()) ++pass_through;
    }
  }
  CHECK(collect_with_errors > 5);
  CHECK(multi_worker > 20);
  CHECK(multi_input > 20);
  CHECK(pass_through > 20);
}
