// Python surface of the engine. Rules, dictionaries and data cross the
// boundary as their canonical text forms (rule JSON, dictionary JSON, CSV,
// NDJSON logs); only primitive application converts individual values.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "harmonize/engine.hpp"
#include "harmonize/error.hpp"
#include "harmonize/io.hpp"
#include "harmonize/primitives.hpp"
#include "harmonize/rules.hpp"
#include "harmonize/store.hpp"

namespace py = pybind11;
using namespace harmonize;

namespace {

py::object to_python(const Value& v) {
  struct Visitor {
    py::object operator()(const Missing&) const { return py::none(); }
    py::object operator()(const std::string& s) const { return py::str(s); }
    py::object operator()(std::int64_t n) const { return py::int_(n); }
    py::object operator()(const Decimal& d) const { return py::float_(d.value); }
    py::object operator()(bool b) const { return py::bool_(b); }
    py::object operator()(const Date& d) const { return py::str(d.text); }
    py::object operator()(const EnumCode& c) const { return py::int_(c.code); }
    py::object operator()(const ValueVector& items) const {
      py::list out;
      for (const auto& item : items) out.append(to_python(item));
      return out;
    }
  };
  return std::visit(Visitor{}, v.storage());
}

/// `as` names the kind the receiving primitive expects, which decides
/// whether a str is a date and an int an enum code.
Value from_python(const py::handle& obj, Kind as) {
  if (obj.is_none()) return Value();
  if (py::isinstance<py::bool_>(obj)) return Value(obj.cast<bool>());
  if (py::isinstance<py::int_>(obj)) {
    auto n = obj.cast<std::int64_t>();
    return as == Kind::Enum ? Value(EnumCode{n}) : Value(n);
  }
  if (py::isinstance<py::float_>(obj)) return Value(obj.cast<double>());
  if (py::isinstance<py::str>(obj)) {
    auto s = obj.cast<std::string>();
    return as == Kind::Date ? Value(Date{s}) : Value(s);
  }
  if (py::isinstance<py::list>(obj) || py::isinstance<py::tuple>(obj)) {
    ValueVector items;
    for (const auto& item : obj) items.push_back(from_python(item, Kind::Unknown));
    return Value(std::move(items));
  }
  throw py::type_error("unsupported value type " + py::repr(py::type::handle_of(obj)).cast<std::string>());
}

PrimitiveSpec spec_from(const py::object& spec) {
  auto text = py::isinstance<py::str>(spec) ? spec.cast<std::string>()
                                            : py::module_::import("json").attr("dumps")(spec).cast<std::string>();
  return primitive_from_json(nlohmann::ordered_json::parse(text));
}

py::object apply(const py::object& spec_obj, const py::object& x) {
  auto spec = spec_from(spec_obj);
  return to_python(apply_primitive(spec, from_python(x, io_types(spec).input.kind())));
}

DictionaryCatalog catalog_of(const std::vector<std::string>& dictionaries) {
  DictionaryCatalog catalog;
  for (const auto& text : dictionaries) {
    catalog.add(std::make_shared<const DataDictionary>(io::parse_dictionary(text)));
  }
  return catalog;
}

std::vector<std::string> validate(const std::string& rules, const std::vector<std::string>& dictionaries) {
  auto catalog = catalog_of(dictionaries);
  std::vector<std::string> messages;
  for (const auto& rule : deserialize_rules(rules)) {
    for (const auto& issue : validate_rule(rule, catalog)) messages.push_back(format_issue(issue));
  }
  return messages;
}

std::string canonical_rule(const std::string& text) { return serialize_rule(deserialize_rule(text)); }

ErrorPolicy policy_of(const std::string& name) {
  auto p = parse_error_policy(name);
  if (!p) throw Error(Errc::JobConfigError, "unknown error policy '" + name + "'");
  return *p;
}

py::dict report_dict(const FileReport& r) {
  py::list errors;
  for (const auto& e : r.errors) {
    py::dict d;
    d["row"] = e.row;
    d["source_element"] = e.source_element;
    d["target_element"] = e.target_element;
    d["operation"] = e.operation;
    d["primitive"] = e.primitive;
    d["code"] = std::string(errc_name(e.code));
    d["message"] = e.message;
    errors.append(d);
  }
  py::dict d;
  d["dataset"] = r.dataset;
  d["rows"] = r.rows;
  d["rules_applied"] = r.rules_applied;
  d["passed_through"] = r.passed_through;
  d["dropped_columns"] = r.dropped_columns;
  d["errors"] = errors;
  return d;
}

struct Inputs {
  DictionaryCatalog catalog;
  DictionaryPtr target;
};

Inputs resolve(const std::vector<std::string>& dictionaries, const std::string& target) {
  Inputs in{catalog_of(dictionaries), nullptr};
  in.target = in.catalog.find(target);
  if (!in.target) throw Error(Errc::NotFound, "no dictionary named '" + target + "'");
  return in;
}

/// inputs: [(dataset, dictionary name, csv text)]; rules: rule or batch texts.
py::dict harmonize_job(const std::vector<std::tuple<std::string, std::string, std::string>>& inputs,
                       const std::vector<std::string>& rules, const std::vector<std::string>& dictionaries,
                       const std::string& target, const std::string& error_policy, unsigned workers,
                       bool labels) {
  auto ctx = resolve(dictionaries, target);
  std::vector<HarmonizationRule> all_rules;
  for (const auto& text : rules) {
    for (auto& r : deserialize_rules(text)) all_rules.push_back(std::move(r));
  }
  HarmonizationJob job{{}, ctx.target, {policy_of(error_policy), workers}};
  for (const auto& [dataset, dict_name, csv] : inputs) {
    auto dict = ctx.catalog.find(dict_name);
    if (!dict) throw Error(Errc::NotFound, "no dictionary named '" + dict_name + "'");
    JobInput input{io::parse_csv(csv, dataset, dict), {}};
    for (const auto& r : all_rules) {
      if (r.source().dictionary == dict_name) input.rules.push_back(r);
    }
    job.inputs.push_back(std::move(input));
  }
  std::optional<JobResult> result;
  {
    py::gil_scoped_release release;
    result.emplace(run_job(job));
  }
  py::list reports;
  for (const auto& f : result->files) reports.append(report_dict(f.report));
  py::dict out;
  out["csv"] = io::to_csv(result->integrated, {labels});
  out["log"] = result->log.to_ndjson();
  out["reports"] = reports;
  return out;
}

/// originals: {dataset: (dictionary name, csv text)}.
py::dict replay_log(const std::string& log_text,
                    const std::map<std::string, std::pair<std::string, std::string>>& originals,
                    const std::vector<std::string>& dictionaries, const std::string& target,
                    const std::optional<std::vector<std::string>>& order, const std::string& error_policy,
                    unsigned workers) {
  auto ctx = resolve(dictionaries, target);
  auto log = ReplayLog::parse(log_text);
  std::vector<DataFile> files;
  for (const auto& [dataset, source] : originals) {
    auto dict = ctx.catalog.find(source.first);
    if (!dict) throw Error(Errc::NotFound, "no dictionary named '" + source.first + "'");
    files.push_back(io::parse_csv(source.second, dataset, dict));
  }
  std::optional<ReplayResult> result;
  {
    py::gil_scoped_release release;
    result.emplace(replay(log, files, ctx.target, {policy_of(error_policy), workers}, order));
  }
  py::list reports;
  for (const auto& r : result->reports) reports.append(report_dict(r));
  py::dict out;
  out["csv"] = io::to_csv(result->integrated);
  out["log"] = result->log.to_ndjson();
  out["reports"] = reports;
  return out;
}

std::optional<ElementRef> ref_of(const std::optional<std::string>& text) {
  if (!text) return std::nullopt;
  auto colon = text->find(':');
  if (colon == std::string::npos) return ElementRef{"", *text};
  return ElementRef{text->substr(0, colon), text->substr(colon + 1)};
}

// Owned by the module, which outlives every call that can raise it.
PyObject* g_error_type = nullptr;

}  // namespace

PYBIND11_MODULE(_harmonize, m) {
  m.doc() = "Rule-based harmonization of tabular data files";

  g_error_type = py::exception<Error>(m, "HarmonizeError").ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      auto type = py::reinterpret_borrow<py::object>(g_error_type);
      py::object exc = type(e.what());
      exc.attr("code") = std::string(errc_name(e.code()));
      PyErr_SetObject(g_error_type, exc.ptr());
    }
  });

  m.def("apply_primitive", &apply, py::arg("spec"), py::arg("value"),
        "Apply one primitive given as a dict or JSON text to a Python value.");
  m.def("validate_rules", &validate, py::arg("rules"), py::arg("dictionaries"),
        "Type-check rule text against dictionary JSON texts; returns issue messages.");
  m.def("canonical_rule", &canonical_rule, py::arg("text"), "Canonical serialization of a rule document.");
  m.def("harmonize", &harmonize_job, py::arg("inputs"), py::arg("rules"), py::arg("dictionaries"),
        py::arg("target"), py::arg("error_policy") = "fail-fast", py::arg("workers") = 1,
        py::arg("labels") = false,
        "Harmonize (dataset, dictionary, csv) inputs and integrate them; returns csv, log and reports.");
  m.def("replay", &replay_log, py::arg("log"), py::arg("originals"), py::arg("dictionaries"),
        py::arg("target"), py::arg("order") = std::nullopt, py::arg("error_policy") = "fail-fast",
        py::arg("workers") = 1, "Re-run an NDJSON replay log against original CSV texts.");
  m.def("sha256_hex", &io::sha256_hex, py::arg("data"));

  py::class_<FileRuleStore>(m, "RuleStore")
      .def(py::init([](const std::string& root) { return std::make_unique<FileRuleStore>(root); }),
           py::arg("root"))
      .def(
          "put",
          [](FileRuleStore& s, const std::string& text) {
            auto r = s.put(deserialize_rule(text));
            return py::make_tuple(r.hash, r.overwritten);
          },
          py::arg("rule"), "Store a rule; returns (hash, overwritten).")
      .def(
          "get",
          [](const FileRuleStore& s, const std::string& source, const std::string& target)
              -> std::optional<std::string> {
            auto r = s.get(*ref_of(source), *ref_of(target));
            if (!r) return std::nullopt;
            return serialize_rule(*r);
          },
          py::arg("source"), py::arg("target"))
      .def(
          "query",
          [](const FileRuleStore& s, const std::optional<std::string>& source,
             const std::optional<std::string>& target) {
            std::vector<std::string> out;
            for (const auto& r : s.query(ref_of(source), ref_of(target))) out.push_back(serialize_rule(r));
            return out;
          },
          py::arg("source") = std::nullopt, py::arg("target") = std::nullopt)
      .def("reindex", &FileRuleStore::reindex)
      .def("__len__", &FileRuleStore::size);
}
