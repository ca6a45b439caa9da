#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gco_cli {

// Input-side failure (malformed CSV, group spec, config, unreadable or
// unwritable file). The CLI maps these to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CsvTable {
  std::vector<std::string> names;            // header
  std::vector<std::vector<double>> samples;  // one row per observation
};

// RFC-4180-style CSV with a required header row; every body field must be
// numeric. Errors carry 1-based line numbers.
CsvTable read_csv(const std::string& path);

// Writes samples as rows (one observation per line) with 17 significant
// digits, so doubles round-trip exactly. `rows` is variables-by-samples,
// i.e. the library orientation; it is transposed on write.
void write_csv(const std::string& path, const std::vector<std::string>& names,
               const std::vector<std::vector<double>>& rows);

struct GroupSpec {
  std::vector<std::string> labels;                     // declared order
  std::vector<std::vector<std::string>> member_names;  // per group
};

// Sidecar group file: one `group LABEL: var var ...` line per group,
// blank lines and `#` comments ignored. Declared order assigns 1-based
// group ids.
GroupSpec read_group_spec(const std::string& path);

struct GroupedInput {
  std::vector<double> values;  // row-major, variables x samples
  std::vector<int32_t> group_sizes;
  std::vector<std::string> labels;
  std::vector<std::string> row_names;  // variable per data row
  int64_t samples = 0;
};

// Arranges the CSV columns into contiguous group blocks following the spec
// declaration order. Every CSV column must be claimed by exactly one group
// and every spec variable must exist in the CSV.
GroupedInput arrange_by_groups(const CsvTable& table, const GroupSpec& spec);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace gco_cli
