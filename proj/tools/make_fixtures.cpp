// Writes the fixture tree: dictionaries, rules, and data files for the
// age-binning survey example (age_survey/) and the two-source employment and
// commute example (employment/). Synthetic rows come from a seeded mt19937_64 so
// the output is identical on every platform for a given seed.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "harmonize/io.hpp"
#include "harmonize/rules.hpp"

namespace fs = std::filesystem;
using namespace harmonize;

namespace {

/// Uniform-enough draws from raw engine output. Avoids the
/// implementation-defined std::uniform_*_distribution algorithms.
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : engine_(seed) {}
  std::int64_t below(std::int64_t n) { return static_cast<std::int64_t>(engine_() % static_cast<std::uint64_t>(n)); }
  std::int64_t between(std::int64_t lo, std::int64_t hi) { return lo + below(hi - lo + 1); }

 private:
  std::mt19937_64 engine_;
};

DataElement enum_element(std::string name, std::string prompt, std::vector<CodedValue> codes) {
  return DataElement(name, Variable{name}, std::move(prompt),
                     ValueType::enumeration(CodedValueSet(std::move(codes))));
}

DataElement plain(std::string name, std::string variable, std::string prompt, ValueType type) {
  return DataElement(std::move(name), Variable{std::move(variable)}, std::move(prompt), std::move(type));
}

const std::vector<CodedValue> kAgeRanges = {{0, "30 or Under"}, {1, "31-40"}, {2, "41-50"},
                                            {3, "51-60"},       {4, "61-70"}, {5, "Over 70"}};
const std::vector<CodedValue> kSex = {
    {0, "Female"}, {1, "Male"}, {2, "Intersex"}, {3, "Prefer not to answer"}};
const std::vector<CodedValue> kVaccination = {
    {0, "Yes"}, {1, "No"}, {2, "Do not know"}, {3, "Prefer not to answer"}};

void write_rule(const HarmonizationRule& rule, const fs::path& path) {
  io::write_text_file(path, serialize_rule(rule));
}

void write_age_survey(const fs::path& dir) {
  fs::create_directories(dir);
  auto survey = std::make_shared<const DataDictionary>(
      "survey",
      std::vector<DataElement>{
          plain("record_id", "record identifier", "Record ID", ValueType::integer()),
          plain("age_text", "age", "What is your age?", ValueType::string()),
          enum_element("sex", "What is your sex?", kSex),
          enum_element("cov19_vaccination_status", "Have you received a COVID-19 vaccine?",
                       kVaccination)});
  auto harmonized = std::make_shared<const DataDictionary>(
      "survey_harmonized",
      std::vector<DataElement>{
          plain("record_id", "record identifier", "Record ID", ValueType::integer()),
          DataElement("age_range", Variable{"age"}, "Age range",
                      ValueType::enumeration(CodedValueSet(kAgeRanges))),
          enum_element("sex", "What is your sex?", kSex),
          enum_element("cov19_vaccination_status", "Have you received a COVID-19 vaccine?",
                       kVaccination)});
  io::write_dictionary(*survey, dir / "survey.dict.json");
  io::write_dictionary(*harmonized, dir / "survey_harmonized.dict.json");

  // Ten survey records: record_id, age_text, sex, cov19_vaccination_status.
  const std::vector<std::tuple<int, const char*, int, int>> records = {
      {1, "23", 1, 0}, {2, "47", 1, 0}, {3, "31", 0, 0}, {4, "56", 1, 1}, {5, "23", 0, 0},
      {6, "45", 0, 3}, {7, "68", 3, 0}, {8, "25", 1, 0}, {9, "34", 1, 1}, {10, "93", 0, 0}};
  DataFile file("survey", survey);
  for (const auto& [id, age, sex, cov] : records) {
    file.append({Value(id), Value(age), Value(EnumCode{sex}), Value(EnumCode{cov})});
  }
  io::write_data_file(file, {}, dir / "survey.csv");

  auto b = [](std::int64_t v) { return BinBound::at(v); };
  std::vector<BinInterval> bins = {{BinBound::min(), b(30), "30 or Under"},
                                   {b(31), b(40), "31-40"},
                                   {b(41), b(50), "41-50"},
                                   {b(51), b(60), "51-60"},
                                   {b(61), b(70), "61-70"},
                                   {b(71), BinBound::max(), "Over 70"}};
  HarmonizationRule rule({"survey", "age_text"}, {"survey_harmonized", "age_range"},
                         {PrimitiveSpec::cast("string", "integer"), PrimitiveSpec::bin(bins)});
  write_rule(rule, dir / "age_rule.json");
}

void write_employment(const fs::path& dir, std::uint64_t seed, int up_rows, int rad_rows) {
  fs::create_directories(dir / "rules");
  auto up = std::make_shared<const DataDictionary>(
      "radx_up",
      std::vector<DataElement>{
          enum_element("current_employment_status", "Which best describes your current employment?",
                       {{0, "Working now"},
                        {1, "Temporarily laid off, sick leave, or maternity leave"},
                        {2, "Looking for work, unemployed"},
                        {3, "Retired"},
                        {4, "Disabled, permanently or temporarily"},
                        {5, "Keeping house"},
                        {6, "Student"},
                        {7, "Other"}}),
          plain("commute_distance_miles", "commute distance", "One-way commute distance in miles",
                ValueType::decimal())});
  auto rad = std::make_shared<const DataDictionary>(
      "radx_rad",
      std::vector<DataElement>{
          enum_element("employment", "What is your employment status?",
                       {{1, "Employed full-time"},
                        {2, "Employed part-time"},
                        {3, "Unemployed"},
                        {4, "Retired"},
                        {5, "Student"},
                        {6, "Other"}}),
          plain("commute_distance_km", "commute distance", "One-way commute distance in kilometers",
                ValueType::decimal())});
  auto nih = std::make_shared<const DataDictionary>(
      "nih_harmonized",
      std::vector<DataElement>{
          DataElement("nih_employment", Variable{"employment status"}, "Current employment status",
                      ValueType::enumeration(CodedValueSet(
                          {{0, "Employed"}, {1, "Unemployed"}, {2, "Retired"}, {3, "Student"}, {4, "Other"}}))),
          plain("commute_distance_miles", "commute distance", "One-way commute distance in miles",
                ValueType::decimal())});
  io::write_dictionary(*up, dir / "radx_up.dict.json");
  io::write_dictionary(*rad, dir / "radx_rad.dict.json");
  io::write_dictionary(*nih, dir / "nih_harmonized.dict.json");

  Draw draw(seed);
  // Distances are drawn in tenths of a unit.
  auto distance = [&] { return Value(static_cast<double>(draw.between(0, 800)) / 10.0); };
  DataFile up_file("radx_up", up);
  for (int i = 0; i < up_rows; ++i) {
    Value d = draw.below(20) == 0 ? Value() : distance();
    up_file.append({Value(EnumCode{draw.below(8)}), std::move(d)});
  }
  DataFile rad_file("radx_rad", rad);
  // First record pins the 10 km spot check.
  rad_file.append({Value(EnumCode{1}), Value(10.0)});
  for (int i = 1; i < rad_rows; ++i) {
    Value d = draw.below(20) == 0 ? Value() : distance();
    rad_file.append({Value(EnumCode{draw.between(1, 6)}), std::move(d)});
  }
  io::write_data_file(up_file, {}, dir / "radx_up.csv");
  io::write_data_file(rad_file, {}, dir / "radx_rad.csv");

  HarmonizationRule rule1({"radx_up", "current_employment_status"}, {"nih_harmonized", "nih_employment"},
                          {PrimitiveSpec::enum_to_enum(
                              {{0, 0}, {1, 0}, {2, 1}, {3, 2}, {4, 4}, {5, 4}, {6, 3}, {7, 4}})});
  HarmonizationRule rule2({"radx_rad", "employment"}, {"nih_harmonized", "nih_employment"},
                          {PrimitiveSpec::enum_to_enum({{1, 0}, {2, 0}, {3, 1}, {4, 2}, {5, 3}, {6, 4}})});
  HarmonizationRule rule3({"radx_rad", "commute_distance_km"}, {"nih_harmonized", "commute_distance_miles"},
                          {PrimitiveSpec::convert_units("km", "mile"), PrimitiveSpec::round(2)});
  write_rule(rule1, dir / "rules" / "rule1_up_employment.json");
  write_rule(rule2, dir / "rules" / "rule2_rad_employment.json");
  write_rule(rule3, dir / "rules" / "rule3_rad_commute.json");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regenerate the fixture tree"};
  std::string out = "fixtures";
  std::uint64_t seed = 20250314;
  int up_rows = 40;
  int rad_rows = 35;
  app.add_option("--out", out, "Output directory");
  app.add_option("--seed", seed, "Generator seed");
  app.add_option("--up-rows", up_rows, "Rows in the radx_up file")->check(CLI::Range(1, 1000000));
  app.add_option("--rad-rows", rad_rows, "Rows in the radx_rad file")->check(CLI::Range(1, 1000000));
  CLI11_PARSE(app, argc, argv);
  try {
    write_age_survey(fs::path(out) / "age_survey");
    write_employment(fs::path(out) / "employment", seed, up_rows, rad_rows);
  } catch (const std::exception& e) {
    std::cerr << "make_fixtures: " << e.what() << "\n";
    return 1;
  }
  std::cout << fmt::format("wrote fixtures to {} (seed {})\n", out, seed);
  return 0;
}
