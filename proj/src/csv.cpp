#include <cmath>
#include <set>

#include <fmt/format.h>

#include "harmonize/error.hpp"
#include "harmonize/io.hpp"
#include "json.hpp"
#include "text_form.hpp"

namespace harmonize::io {

namespace {

struct Field {
  std::string text;
  bool quoted = false;
};

using Record = std::vector<Field>;

/// RFC 4180 tokenizer. Accepts LF or CRLF terminators; a final terminator is
/// optional. Each record reports the 1-based line it starts on.
class CsvReader {
 public:
  explicit CsvReader(std::string_view text) : text_(text) {
    if (text_.substr(0, 3) == "\xEF\xBB\xBF") text_.remove_prefix(3);
  }

  bool next(Record& out, std::size_t& line) {
    out.clear();
    if (pos_ >= text_.size()) return false;
    line = line_;
    Field field;
    bool field_started = false;
    while (true) {
      if (pos_ >= text_.size()) {
        out.push_back(std::move(field));
        return true;
      }
      char c = text_[pos_];
      if (c == '"' && !field_started) {
        field.quoted = true;
        field_started = true;
        ++pos_;
        read_quoted(field.text);
        if (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != '\n' &&
            !(text_[pos_] == '\r' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '\n')) {
          throw Error(Errc::CellParseError,
                      fmt::format("line {}: unexpected character after closing quote", line_));
        }
        continue;
      }
      if (c == ',') {
        out.push_back(std::move(field));
        field = {};
        field_started = false;
        ++pos_;
        continue;
      }
      if (c == '\n' || (c == '\r' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '\n')) {
        pos_ += c == '\r' ? 2 : 1;
        ++line_;
        out.push_back(std::move(field));
        return true;
      }
      if (c == '"') {
        throw Error(Errc::CellParseError,
                    fmt::format("line {}: quote inside an unquoted field", line_));
      }
      field.text += c;
      field_started = true;
      ++pos_;
    }
  }

 private:
  void read_quoted(std::string& out) {
    std::size_t start_line = line_;
    while (pos_ < text_.size()) {
      char c = text_[pos_++];
      if (c == '"') {
        if (pos_ < text_.size() && text_[pos_] == '"') {
          out += '"';
          ++pos_;
          continue;
        }
        return;
      }
      if (c == '\n') ++line_;
      out += c;
    }
    throw Error(Errc::CellParseError,
                fmt::format("line {}: unterminated quoted field", start_line));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

bool needs_quotes(std::string_view s) {
  return s.find_first_of(",\"\r\n") != std::string_view::npos;
}

void append_field(std::string& out, std::string_view text, bool force_quotes) {
  if (!force_quotes && !needs_quotes(text)) {
    out += text;
    return;
  }
  out += '"';
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
}

std::string json_string(const std::string& s) { return nlohmann::json(s).dump(); }

std::string format_vector(const ValueVector& items) {
  std::string out = "[";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ",";
    const auto& item = items[i];
    if (item.is_decimal()) {
      double d = item.decimal().value;
      std::string text = detail::format_decimal(d);
      out += std::isfinite(d) ? text : json_string(text);
    } else if (item.is_text()) {
      out += json_string(item.text());
    } else if (item.is_date()) {
      out += json_string(item.date().text);
    } else {
      out += detail::format_scalar(item);
    }
  }
  return out + "]";
}

std::optional<Value> parse_vector(std::string_view text, Kind element) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error&) {
    return std::nullopt;
  }
  if (!j.is_array()) return std::nullopt;
  ValueVector items;
  items.reserve(j.size());
  for (const auto& e : j) {
    switch (element) {
      case Kind::String:
        if (!e.is_string()) return std::nullopt;
        items.emplace_back(e.get<std::string>());
        break;
      case Kind::Date:
        if (!e.is_string()) return std::nullopt;
        items.emplace_back(Date{e.get<std::string>()});
        break;
      case Kind::Integer:
        if (e.is_number_unsigned()) {
          if (e.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) return std::nullopt;
          items.emplace_back(static_cast<std::int64_t>(e.get<std::uint64_t>()));
        } else if (e.is_number_integer()) {
          items.emplace_back(e.get<std::int64_t>());
        } else {
          return std::nullopt;
        }
        break;
      case Kind::Decimal:
        if (e.is_number()) {
          items.emplace_back(e.get<double>());
        } else if (e.is_string()) {
          auto d = detail::parse_decimal(e.get<std::string>());
          if (!d || std::isfinite(*d)) return std::nullopt;
          items.emplace_back(*d);
        } else {
          return std::nullopt;
        }
        break;
      case Kind::Boolean:
        if (!e.is_boolean()) return std::nullopt;
        items.emplace_back(e.get<bool>());
        break;
      default: return std::nullopt;
    }
  }
  return Value(std::move(items));
}

/// Fixed-notation text that the shortest form would not reproduce (e.g.
/// "4.70") keeps its width, so that reading then writing is byte-stable.
std::optional<int> written_places(std::string_view text, double value) {
  if (text.find_first_of("eEnN") != std::string_view::npos) return std::nullopt;
  if (detail::format_decimal(value) == text) return std::nullopt;
  auto dot = text.find('.');
  int places = dot == std::string_view::npos ? 0 : static_cast<int>(text.size() - dot - 1);
  if (detail::format_decimal(value, places) != text) return std::nullopt;
  return places;
}

}  // namespace

std::string format_cell(const Value& v, const DataElement& element, bool labels) {
  if (v.is_vector()) return format_vector(v.items());
  if (labels && v.is_enum() && element.codes()) {
    if (auto label = element.codes()->label_of(v.code())) return *label;
  }
  return detail::format_scalar(v);
}

std::optional<Value> parse_cell(std::string_view text, bool quoted, const DataElement& element) {
  const auto& type = element.type();
  bool text_like = type.kind() == Kind::String || type.kind() == Kind::Date;
  if (text.empty() && !(quoted && text_like)) return Value::missing();
  switch (type.kind()) {
    case Kind::String: return Value(std::string(text));
    case Kind::Date: return Value(Date{std::string(text)});
    case Kind::Integer:
      if (auto n = detail::parse_integer(text)) return Value(*n);
      return std::nullopt;
    case Kind::Decimal:
      if (auto d = detail::parse_decimal(text)) return Value(Decimal{*d, written_places(text, *d)});
      return std::nullopt;
    case Kind::Boolean:
      if (auto b = detail::parse_boolean(text)) return Value(*b);
      return std::nullopt;
    case Kind::Enum:
      if (auto n = detail::parse_integer(text)) return Value(EnumCode{*n});
      return std::nullopt;
    case Kind::Vector: return parse_vector(text, type.element());
    default: return std::nullopt;
  }
}

std::string to_csv(const DataFile& file, const CanonicalWriterConfig& config) {
  const auto& elements = file.dictionary().elements();
  std::string out;
  for (std::size_t c = 0; c < elements.size(); ++c) {
    if (c) out += ',';
    append_field(out, elements[c].name(), false);
  }
  out += '\n';
  for (const auto& row : file.rows()) {
    for (std::size_t c = 0; c < elements.size(); ++c) {
      if (c) out += ',';
      const auto& v = row[c];
      if (v.is_missing()) continue;
      auto text = format_cell(v, elements[c], config.labels);
      bool empty_text = text.empty() && (v.is_text() || v.is_date());
      append_field(out, text, empty_text);
    }
    out += '\n';
  }
  return out;
}

void write_data_file(const DataFile& file, const CanonicalWriterConfig& config,
                     const std::filesystem::path& path) {
  write_text_file(path, to_csv(file, config));
}

std::vector<std::string> parse_csv_header(std::string_view text) {
  CsvReader reader(text);
  Record header;
  std::size_t line = 0;
  if (!reader.next(header, line)) return {};
  std::vector<std::string> names;
  for (auto& f : header) names.push_back(std::move(f.text));
  return names;
}

DataFile parse_csv(std::string_view text, std::string name, DictionaryPtr dictionary) {
  CsvReader reader(text);
  Record header;
  std::size_t line = 0;
  if (!reader.next(header, line)) {
    throw Error(Errc::HeaderMismatch, fmt::format("'{}' has no header row", name));
  }
  const auto& dict = *dictionary;
  // column_of[i] = dictionary index of CSV column i
  std::vector<std::size_t> column_of;
  std::set<std::string> seen;
  std::vector<std::string> unknown, duplicate;
  for (const auto& f : header) {
    if (!seen.insert(f.text).second) duplicate.push_back(f.text);
    if (auto idx = dict.index_of(f.text)) {
      column_of.push_back(*idx);
    } else {
      unknown.push_back(f.text);
    }
  }
  std::vector<std::string> absent;
  for (const auto& e : dict.elements()) {
    if (!seen.count(e.name())) absent.push_back(e.name());
  }
  if (!unknown.empty() || !absent.empty() || !duplicate.empty()) {
    std::string detail;
    if (!unknown.empty()) detail += fmt::format(" unknown columns: {};", fmt::join(unknown, ", "));
    if (!absent.empty()) detail += fmt::format(" missing columns: {};", fmt::join(absent, ", "));
    if (!duplicate.empty()) {
      detail += fmt::format(" duplicate columns: {};", fmt::join(duplicate, ", "));
    }
    detail.pop_back();
    throw Error(Errc::HeaderMismatch, fmt::format("'{}' does not match dictionary '{}':{}", name,
                                                  dict.name(), detail));
  }

  DataFile file(name, dictionary);
  Record record;
  std::size_t row_number = 0;
  while (reader.next(record, line)) {
    ++row_number;
    if (record.size() != header.size()) {
      throw Error(Errc::CellParseError,
                  fmt::format("'{}' row {} (line {}) has {} fields, expected {}", name, row_number,
                              line, record.size(), header.size()));
    }
    Row row(dict.size());
    for (std::size_t i = 0; i < record.size(); ++i) {
      const auto& element = dict.elements()[column_of[i]];
      auto value = parse_cell(record[i].text, record[i].quoted, element);
      if (!value) {
        throw Error(Errc::CellParseError,
                    fmt::format("'{}' row {} column '{}': cannot read '{}' as {}", name, row_number,
                                element.name(), record[i].text, element.type().name()));
      }
      row[column_of[i]] = std::move(*value);
    }
    file.append(std::move(row));
  }
  return file;
}

DataFile read_data_file(const std::filesystem::path& path, DictionaryPtr dictionary,
                        std::optional<std::string> name) {
  auto text = read_text_file(path);
  return parse_csv(text, name ? *name : path.stem().string(), std::move(dictionary));
}

}  // namespace harmonize::io
