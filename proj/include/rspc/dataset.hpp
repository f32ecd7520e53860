#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "rspc/errors.hpp"
#include "rspc/factors.hpp"
#include "rspc/subgroup.hpp"

namespace rspc {

// Dataset file schema: CSV with header "sample_id,value", one measurement per
// row. Rows sharing a sample_id form a subgroup; subgroups are ordered by
// first appearance. Ragged subgroup sizes are expected.
inline std::vector<Subgroup> parse_dataset_csv(const std::string& text,
                                               const std::string& origin = "<string>") {
  std::vector<Subgroup> subgroups;
  std::unordered_map<std::string, std::size_t> index;

  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!saw_header) {
      if (line != "sample_id,value")
        throw io_error(origin + ":" + std::to_string(lineno) +
                       ": expected header 'sample_id,value', got '" + line + "'");
      saw_header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos || comma == 0)
      throw io_error(origin + ":" + std::to_string(lineno) +
                     ": expected 'sample_id,value', got '" + line + "'");
    const std::string id = line.substr(0, comma);
    const std::string value_text = line.substr(comma + 1);
    char* end = nullptr;
    const double value = std::strtod(value_text.c_str(), &end);
    if (end == value_text.c_str() || *end != '\0' || !std::isfinite(value))
      throw io_error(origin + ":" + std::to_string(lineno) + ": '" + value_text +
                     "' is not a finite number");
    const auto [it, inserted] = index.try_emplace(id, subgroups.size());
    if (inserted) subgroups.push_back(Subgroup{id, {}});
    subgroups[it->second].values.push_back(value);
  }
  if (!saw_header) throw io_error(origin + ": empty dataset file");
  if (subgroups.empty()) throw io_error(origin + ": no measurements after the header");
  return subgroups;
}

inline std::vector<Subgroup> load_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open dataset: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_dataset_csv(ss.str(), path.string());
}

// Values are written with 17 significant digits, so an ingest/export cycle
// reproduces the original doubles exactly.
inline std::string dataset_to_csv(std::span<const Subgroup> data) {
  std::string out = "sample_id,value\n";
  for (const Subgroup& s : data)
    for (double v : s.values) {
      out += s.id;
      out += ',';
      out += detail::format_g17(v);
      out += '\n';
    }
  return out;
}

inline void save_dataset_csv(std::span<const Subgroup> data,
                             const std::filesystem::path& path) {
  write_file_atomic(path, dataset_to_csv(data));
}

}  // namespace rspc
