#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "harmonize/model.hpp"

namespace harmonize::io {

/// Canonical writer settings. Column order is the dictionary's element order;
/// the CSV dialect (comma, double-quote escaping, LF, UTF-8 without BOM) is
/// fixed. Decimals render in shortest round-trip form unless the value
/// carries a Round precision, in which case exactly that many places are
/// written. Missing renders as an empty unquoted field; an empty string as "".
struct CanonicalWriterConfig {
  /// Render enum cells as labels instead of codes. Human inspection only:
  /// label output is not readable back and is never used for replay checks.
  bool labels = false;
};

/// Canonical CSV bytes of `file`.
std::string to_csv(const DataFile& file, const CanonicalWriterConfig& config = {});

/// Throws Error(StorageFailure).
void write_data_file(const DataFile& file, const CanonicalWriterConfig& config,
                     const std::filesystem::path& path);

/// Parses CSV text against `dictionary`. Header names are matched to element
/// names exactly, in any order. Throws Error(HeaderMismatch) or
/// Error(CellParseError).
DataFile parse_csv(std::string_view text, std::string name, DictionaryPtr dictionary);

/// As parse_csv; the data file is named after the file stem unless `name` is given.
DataFile read_data_file(const std::filesystem::path& path, DictionaryPtr dictionary,
                        std::optional<std::string> name = std::nullopt);

/// Header fields of a CSV document.
std::vector<std::string> parse_csv_header(std::string_view text);

/// Canonical text of a single cell (without CSV quoting).
std::string format_cell(const Value& v, const DataElement& element, bool labels = false);

/// Inverse of format_cell for codes mode. `quoted` distinguishes "" (empty
/// string) from an empty field (missing). Returns nullopt on a malformed cell.
std::optional<Value> parse_cell(std::string_view text, bool quoted, const DataElement& element);

/// Dictionary JSON: {"name", "elements": [{"name", "variable", "prompt", "type", "codes"?}]}.
std::string dictionary_to_json(const DataDictionary& dictionary);

/// Throws Error(ParseError) for malformed JSON and Error(SchemaError) for
/// structural problems; messages carry the byte offset or JSON pointer.
DataDictionary parse_dictionary(std::string_view text);

DataDictionary read_dictionary(const std::filesystem::path& path);
void write_dictionary(const DataDictionary& dictionary, const std::filesystem::path& path);

/// Whole-file helpers. Throw Error(StorageFailure) naming the path.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view bytes);

/// Lower-case hex SHA-256.
std::string sha256_hex(std::string_view bytes);

}  // namespace harmonize::io
