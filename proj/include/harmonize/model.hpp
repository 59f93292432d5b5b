#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "harmonize/value.hpp"

namespace harmonize {

/// An abstract concept (e.g. "age") that data elements implement.
struct Variable {
  std::string name;

  bool operator==(const Variable&) const = default;
};

/// A concrete implementation of a variable: one column of a data file.
class DataElement {
 public:
  /// Throws Error(SchemaError) on an empty name or a signature-only type.
  /// Enum types must carry a labelled coded set.
  DataElement(std::string name, Variable variable, std::string prompt, ValueType type);

  const std::string& name() const noexcept { return name_; }
  const Variable& variable() const noexcept { return variable_; }
  const std::string& prompt() const noexcept { return prompt_; }
  const ValueType& type() const noexcept { return type_; }
  /// Non-null iff the response type is Enum.
  const CodedValueSet* codes() const noexcept { return type_.codes().get(); }

  friend bool operator==(const DataElement&, const DataElement&) = default;

 private:
  std::string name_;
  Variable variable_;
  std::string prompt_;
  ValueType type_;
};

/// Ordered schema of a data file. Element order defines column order.
class DataDictionary {
 public:
  /// Throws Error(SchemaError) on an empty name or duplicate element names.
  DataDictionary(std::string name, std::vector<DataElement> elements);

  const std::string& name() const noexcept { return name_; }
  const std::vector<DataElement>& elements() const noexcept { return elements_; }
  std::size_t size() const noexcept { return elements_.size(); }

  /// Throws Error(NotFound).
  const DataElement& element_by_name(const std::string& name) const;
  const DataElement* find(const std::string& name) const noexcept;
  std::optional<std::size_t> index_of(const std::string& name) const noexcept;

  friend bool operator==(const DataDictionary&, const DataDictionary&) = default;

 private:
  std::string name_;
  std::vector<DataElement> elements_;
};

using DictionaryPtr = std::shared_ptr<const DataDictionary>;
using Row = std::vector<Value>;

/// Free function form of DataDictionary::element_by_name.
const DataElement& element_by_name(const DataDictionary& d, const std::string& name);

/// A table of records bound to exactly one dictionary. Rows always have one
/// cell per element; whether cells conform is checked by validate_file.
class DataFile {
 public:
  /// Throws Error(SchemaError) when a row's width differs from the dictionary.
  DataFile(std::string name, DictionaryPtr dictionary, std::vector<Row> rows = {});

  const std::string& name() const noexcept { return name_; }
  const DataDictionary& dictionary() const noexcept { return *dictionary_; }
  const DictionaryPtr& dictionary_ptr() const noexcept { return dictionary_; }
  const std::vector<Row>& rows() const noexcept { return rows_; }
  std::size_t row_count() const noexcept { return rows_.size(); }

  const Value& cell(std::size_t row, std::size_t column) const { return rows_.at(row).at(column); }

  void append(Row row);

 private:
  std::string name_;
  DictionaryPtr dictionary_;
  std::vector<Row> rows_;
};

struct Violation {
  std::size_t row = 0;  // 1-based record number
  std::string element;
  std::string reason;

  bool operator==(const Violation&) const = default;
};

/// Non-conforming cells, ordered by (row, column). Empty iff the file conforms.
std::vector<Violation> validate_file(const DataFile& file);

/// Same rows and cell values (decimals within `rel_tol`), same dictionary.
bool equivalent(const DataFile& a, const DataFile& b, double rel_tol = 1e-9);

/// Dictionaries keyed by name.
class DictionaryCatalog {
 public:
  DictionaryCatalog() = default;

  /// Throws Error(SchemaError) if a different dictionary with the same name exists.
  void add(DictionaryPtr dictionary);
  DictionaryPtr find(const std::string& name) const;
  /// Throws Error(NotFound).
  const DataDictionary& at(const std::string& name) const;
  const DataElement* find_element(const std::string& dictionary,
                                  const std::string& element) const;

  std::vector<DictionaryPtr> all() const;
  bool empty() const noexcept { return by_name_.empty(); }

 private:
  std::map<std::string, DictionaryPtr> by_name_;
};

}  // namespace harmonize
