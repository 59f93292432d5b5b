#include "harmonize/model.hpp"

#include <set>

#include <fmt/format.h>

#include "harmonize/error.hpp"
#include "text_form.hpp"

namespace harmonize {

DataElement::DataElement(std::string name, Variable variable, std::string prompt, ValueType type)
    : name_(std::move(name)),
      variable_(std::move(variable)),
      prompt_(std::move(prompt)),
      type_(std::move(type)) {
  if (name_.empty()) throw Error(Errc::SchemaError, "data element name must not be empty");
  if (type_.kind() == Kind::Unknown || type_.is_signature_only()) {
    throw Error(Errc::SchemaError,
                fmt::format("data element '{}' has no concrete response type", name_));
  }
  if (type_.kind() == Kind::Vector && type_.element() == Kind::Unknown) {
    throw Error(Errc::SchemaError,
                fmt::format("data element '{}' is a vector without an element type", name_));
  }
  if (type_.kind() == Kind::Enum && (!type_.codes() || !type_.codes()->labelled())) {
    throw Error(Errc::SchemaError,
                fmt::format("enum data element '{}' requires labelled codes", name_));
  }
}

DataDictionary::DataDictionary(std::string name, std::vector<DataElement> elements)
    : name_(std::move(name)), elements_(std::move(elements)) {
  if (name_.empty()) throw Error(Errc::SchemaError, "data dictionary name must not be empty");
  std::set<std::string> seen;
  for (const auto& e : elements_) {
    if (!seen.insert(e.name()).second) {
      throw Error(Errc::SchemaError, fmt::format("duplicate data element '{}' in dictionary '{}'",
                                                 e.name(), name_));
    }
  }
}

const DataElement& DataDictionary::element_by_name(const std::string& name) const {
  if (const auto* e = find(name)) return *e;
  throw Error(Errc::NotFound,
              fmt::format("dictionary '{}' has no data element '{}'", name_, name));
}

const DataElement* DataDictionary::find(const std::string& name) const noexcept {
  for (const auto& e : elements_) {
    if (e.name() == name) return &e;
  }
  return nullptr;
}

std::optional<std::size_t> DataDictionary::index_of(const std::string& name) const noexcept {
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    if (elements_[i].name() == name) return i;
  }
  return std::nullopt;
}

const DataElement& element_by_name(const DataDictionary& d, const std::string& name) {
  return d.element_by_name(name);
}

DataFile::DataFile(std::string name, DictionaryPtr dictionary, std::vector<Row> rows)
    : name_(std::move(name)), dictionary_(std::move(dictionary)) {
  if (!dictionary_) throw Error(Errc::SchemaError, "data file requires a dictionary");
  rows_.reserve(rows.size());
  for (auto& r : rows) append(std::move(r));
}

void DataFile::append(Row row) {
  if (row.size() != dictionary_->size()) {
    throw Error(Errc::SchemaError,
                fmt::format("row {} of '{}' has {} cells, dictionary '{}' has {} elements",
                            rows_.size() + 1, name_, row.size(), dictionary_->name(),
                            dictionary_->size()));
  }
  rows_.push_back(std::move(row));
}

std::vector<Violation> validate_file(const DataFile& file) {
  std::vector<Violation> out;
  const auto& elements = file.dictionary().elements();
  for (std::size_t r = 0; r < file.row_count(); ++r) {
    const auto& row = file.rows()[r];
    for (std::size_t c = 0; c < elements.size(); ++c) {
      const auto& v = row[c];
      const auto& element = elements[c];
      if (conforms(v, element.type())) continue;
      std::string reason;
      if (v.is_enum() && element.type().kind() == Kind::Enum) {
        reason = fmt::format("code {} is not in the coded value set", v.code());
      } else {
        reason = fmt::format("expected {}, found {}", element.type().name(), describe(v));
      }
      out.push_back({r + 1, element.name(), std::move(reason)});
    }
  }
  return out;
}

bool equivalent(const DataFile& a, const DataFile& b, double rel_tol) {
  if (!(a.dictionary() == b.dictionary()) || a.row_count() != b.row_count()) return false;
  for (std::size_t r = 0; r < a.row_count(); ++r) {
    const auto& x = a.rows()[r];
    const auto& y = b.rows()[r];
    for (std::size_t c = 0; c < x.size(); ++c) {
      if (!approx_equal(x[c], y[c], rel_tol)) return false;
    }
  }
  return true;
}

void DictionaryCatalog::add(DictionaryPtr dictionary) {
  auto [it, inserted] = by_name_.emplace(dictionary->name(), dictionary);
  if (!inserted && !(*it->second == *dictionary)) {
    throw Error(Errc::SchemaError,
                fmt::format("conflicting definitions of dictionary '{}'", dictionary->name()));
  }
}

DictionaryPtr DictionaryCatalog::find(const std::string& name) const {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? nullptr : it->second;
}

const DataDictionary& DictionaryCatalog::at(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) {
    throw Error(Errc::NotFound, fmt::format("unknown data dictionary '{}'", name));
  }
  return *it->second;
}

const DataElement* DictionaryCatalog::find_element(const std::string& dictionary,
                                                   const std::string& element) const {
  auto d = find(dictionary);
  return d ? d->find(element) : nullptr;
}

std::vector<DictionaryPtr> DictionaryCatalog::all() const {
  std::vector<DictionaryPtr> out;
  for (const auto& [name, d] : by_name_) out.push_back(d);
  return out;
}

}  // namespace harmonize
