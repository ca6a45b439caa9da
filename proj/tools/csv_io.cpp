#include "csv_io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace gco_cli {

namespace {

[[noreturn]] void fail_at(const std::string& path, std::size_t line,
                          const std::string& message) {
  throw InputError(path + ":" + std::to_string(line) + ": " + message);
}

// One CSV record; double quotes per RFC 4180.
std::vector<std::string> split_csv_line(const std::string& path,
                                        std::size_t line_no,
                                        const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  if (quoted) fail_at(path, line_no, "unterminated quote");
  fields.push_back(std::move(field));
  return fields;
}

std::string strip(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path + ": cannot open file");
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      table.names = split_csv_line(path, line_no, line);
      for (std::string& name : table.names) name = strip(name);
      if (table.names.empty() || table.names[0].empty()) {
        fail_at(path, line_no, "missing header row");
      }
      continue;
    }
    if (line.empty()) continue;
    const std::vector<std::string> fields =
        split_csv_line(path, line_no, line);
    if (fields.size() != table.names.size()) {
      fail_at(path, line_no,
              "expected " + std::to_string(table.names.size()) +
                  " fields, got " + std::to_string(fields.size()));
    }
    std::vector<double> row(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const std::string f = strip(fields[c]);
      if (f.empty()) fail_at(path, line_no, "empty numeric field");
      char* end = nullptr;
      row[c] = std::strtod(f.c_str(), &end);
      if (end != f.c_str() + f.size()) {
        fail_at(path, line_no, "not a number: '" + f + "'");
      }
    }
    table.samples.push_back(std::move(row));
  }
  if (table.names.empty()) throw InputError(path + ": empty file");
  return table;
}

void write_csv(const std::string& path, const std::vector<std::string>& names,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw InputError(path + ": cannot open for writing");
  for (std::size_t c = 0; c < names.size(); ++c) {
    if (c) out << ',';
    out << names[c];
  }
  out << '\n';
  const std::size_t samples = rows.empty() ? 0 : rows[0].size();
  char buf[64];
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r) out << ',';
      std::snprintf(buf, sizeof(buf), "%.17g", rows[r][s]);
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw InputError(path + ": write failed");
}

GroupSpec read_group_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path + ": cannot open file");
  GroupSpec spec;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string text = strip(line);
    if (text.empty() || text[0] == '#') continue;
    if (text.rfind("group ", 0) != 0) {
      fail_at(path, line_no, "expected 'group LABEL: var var ...'");
    }
    const std::size_t colon = text.find(':');
    if (colon == std::string::npos) {
      fail_at(path, line_no, "missing ':' after group label");
    }
    const std::string label = strip(text.substr(6, colon - 6));
    if (label.empty()) fail_at(path, line_no, "empty group label");
    for (const std::string& seen : spec.labels) {
      if (seen == label) {
        fail_at(path, line_no, "duplicate group label '" + label + "'");
      }
    }
    std::istringstream members(text.substr(colon + 1));
    std::vector<std::string> vars;
    std::string var;
    while (members >> var) vars.push_back(var);
    if (vars.empty()) fail_at(path, line_no, "group has no variables");
    spec.labels.push_back(label);
    spec.member_names.push_back(std::move(vars));
  }
  if (spec.labels.size() < 2) {
    throw InputError(path + ": need at least two groups");
  }
  return spec;
}

GroupedInput arrange_by_groups(const CsvTable& table, const GroupSpec& spec) {
  std::map<std::string, std::size_t> column_of;
  for (std::size_t c = 0; c < table.names.size(); ++c) {
    if (!column_of.emplace(table.names[c], c).second) {
      throw InputError("duplicate CSV column '" + table.names[c] + "'");
    }
  }
  GroupedInput input;
  input.samples = static_cast<int64_t>(table.samples.size());
  std::vector<bool> claimed(table.names.size(), false);
  for (std::size_t g = 0; g < spec.labels.size(); ++g) {
    input.labels.push_back(spec.labels[g]);
    input.group_sizes.push_back(
        static_cast<int32_t>(spec.member_names[g].size()));
    for (const std::string& var : spec.member_names[g]) {
      auto it = column_of.find(var);
      if (it == column_of.end()) {
        throw InputError("group '" + spec.labels[g] + "' names variable '" +
                         var + "' not present in the CSV");
      }
      if (claimed[it->second]) {
        throw InputError("variable '" + var + "' assigned to two groups");
      }
      claimed[it->second] = true;
      input.row_names.push_back(var);
      for (const auto& sample : table.samples) {
        input.values.push_back(sample[it->second]);
      }
    }
  }
  for (std::size_t c = 0; c < claimed.size(); ++c) {
    if (!claimed[c]) {
      throw InputError("CSV column '" + table.names[c] +
                       "' is not assigned to any group");
    }
  }
  return input;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(path + ": cannot open for writing");
  out << text;
  if (!out) throw InputError(path + ": write failed");
}

}  // namespace gco_cli
