#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace degenkit {

struct ProbeInfo {
    std::string name;
    std::string anchor;  // what the probe measures
    std::vector<std::string> required;
    std::vector<std::string> optional;
    std::string csv_columns;
};

const std::vector<ProbeInfo>& probe_registry();
// One line per probe: name, anchor, required parameters.
std::string list_probes_table();

struct RunOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> grid_n;
    std::optional<int> refinements;
};

struct RunResult {
    nlohmann::json report;
    std::string csv;
    std::string report_path;  // from output.report, may be empty
    std::string csv_path;     // from output.csv, may be empty
};

// Reads a config file. A report written by a previous run is accepted too;
// its embedded config is used.
nlohmann::json load_config_file(const std::string& path);
nlohmann::json parse_config_text(const std::string& text);

RunResult run_config(const nlohmann::json& config, const RunOverrides& overrides = {});

// 0 on success, 2 for config or parse problems, 3 for numeric or domain failures.
int exit_code_for(const std::exception& e) noexcept;

std::string format_number(double v);

}  // namespace degenkit
