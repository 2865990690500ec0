#include "phishlex/csv.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace phishlex::csvio {

namespace {

// Consumes one record starting at `pos`. Returns false with `error` set when
// the record is structurally invalid; `pos` is always left at the start of
// the next record.
bool parse_record(std::string_view text, std::size_t& pos,
                  std::vector<std::string>& fields, std::string& error) {
  fields.clear();
  error.clear();
  std::string field;
  bool in_quotes = false;
  bool quoted_field = false;

  auto resync_to_next_line = [&](std::size_t from) {
    std::size_t nl = text.find('\n', from);
    pos = (nl == std::string_view::npos) ? text.size() : nl + 1;
  };

  std::size_t i = pos;
  while (i < text.size()) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          i += 2;
          continue;
        }
        in_quotes = false;
        ++i;
        // A closing quote must be followed by a separator or end of record.
        if (i < text.size() && text[i] != ',' && text[i] != '\n' && text[i] != '\r') {
          error = "unexpected character after closing quote";
          resync_to_next_line(i);
          return false;
        }
        continue;
      }
      field += c;
      ++i;
      continue;
    }
    switch (c) {
      case '"':
        if (field.empty() && !quoted_field) {
          in_quotes = true;
          quoted_field = true;
        } else {
          field += '"';  // stray quote inside an unquoted field: keep it
        }
        ++i;
        break;
      case ',':
        fields.push_back(std::move(field));
        field.clear();
        quoted_field = false;
        ++i;
        break;
      case '\r':
        ++i;
        break;
      case '\n':
        fields.push_back(std::move(field));
        pos = i + 1;
        return true;
      default:
        field += c;
        ++i;
        break;
    }
  }
  if (in_quotes) {
    error = "unterminated quoted field";
    pos = text.size();
    return false;
  }
  fields.push_back(std::move(field));
  pos = text.size();
  return true;
}

bool record_is_blank(const std::vector<std::string>& fields) {
  return fields.size() == 1 && fields[0].empty();
}

}  // namespace

Table parse(std::string_view text, bool has_header) {
  Table table;
  std::size_t pos = 0;
  std::vector<std::string> fields;
  std::string error;
  bool header_done = !has_header;
  std::size_t data_index = 0;

  while (pos < text.size()) {
    bool ok = parse_record(text, pos, fields, error);
    if (ok && record_is_blank(fields)) continue;
    if (!header_done) {
      if (!ok) throw EmptyFileError("header row is malformed: " + error);
      table.header = fields;
      header_done = true;
      continue;
    }
    if (!ok) {
      table.malformed.push_back({data_index++, error});
      continue;
    }
    if (has_header && fields.size() != table.header.size()) {
      std::ostringstream msg;
      msg << "expected " << table.header.size() << " fields, got " << fields.size();
      table.malformed.push_back({data_index++, msg.str()});
      continue;
    }
    table.rows.push_back(fields);
    ++data_index;
  }
  return table;
}

Table read_file(const std::string& path, bool has_header) {
  if (!std::filesystem::exists(path)) {
    throw FileNotFoundError("no such file: " + path);
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileNotFoundError("cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw EmptyFileError("file is empty: " + path);
  }
  return parse(text, has_header);
}

std::string escape(std::string_view field) {
  bool needs_quotes = field.find_first_of(",\"\n\r") != std::string_view::npos;
  if (!needs_quotes) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_row(std::ostream& out, std::span<const std::string> fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << escape(fields[i]);
  }
  out << '\n';
}

}  // namespace phishlex::csvio
