// Command-line front end; talks to the library only through the C API.
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "degenkit/degenkit.h"

namespace {

int run(const std::string& config, const std::string& out, const std::string& csv, const dk_run_options& opts,
        bool quiet) {
    dk_report* report = nullptr;
    const dk_status s = dk_run_config_file(config.c_str(), &opts, &report);
    if (s != DK_OK) {
        std::fprintf(stderr, "degenkit: %s: %s\n", dk_status_name(s), dk_last_error());
        return dk_exit_code(s);
    }
    const std::string json_path = out.empty() ? dk_report_default_path(report) : out;
    const std::string csv_path = csv.empty() ? dk_report_default_csv_path(report) : csv;
    const dk_status w = dk_report_write(report, json_path.c_str(), csv_path.c_str());
    if (w != DK_OK) {
        std::fprintf(stderr, "degenkit: %s: %s\n", dk_status_name(w), dk_last_error());
        dk_report_free(report);
        return dk_exit_code(w);
    }
    if (!quiet) {
        if (json_path.empty()) {
            std::printf("%s\n", dk_report_json(report));
        } else {
            std::printf("verdict: %s\n", dk_report_verdict(report));
        }
    }
    dk_report_free(report);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"degenkit: degeneracy probes for nonlinear integral operators"};
    app.require_subcommand(1);
    app.set_version_flag("--version", dk_version());

    auto* run_cmd = app.add_subcommand("run", "run the probe described by a config file");
    std::string config, out, csv;
    std::uint64_t seed = 0;
    std::size_t grid_n = 0;
    int refinements = 0;
    bool quiet = false;
    run_cmd->add_option("--config", config, "config file (a previous report works too)")->required();
    run_cmd->add_option("--out", out, "report JSON path");
    run_cmd->add_option("--csv", csv, "curve CSV path");
    auto* seed_opt = run_cmd->add_option("--seed", seed, "override the config seed");
    auto* n_opt = run_cmd->add_option("--grid-n", grid_n, "override grid.n")->check(CLI::PositiveNumber);
    auto* ref_opt = run_cmd->add_option("--refinements", refinements, "override grid.refinements")
                        ->check(CLI::Range(0, 20));
    run_cmd->add_flag("--quiet", quiet, "print nothing on success");

    app.add_subcommand("list-probes", "list the available probes");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (app.got_subcommand("list-probes")) {
        std::fputs(dk_list_probes(), stdout);
        return 0;
    }

    dk_run_options opts{};
    if (*seed_opt) {
        opts.has_seed = 1;
        opts.seed = seed;
    }
    if (*n_opt) {
        opts.has_grid_n = 1;
        opts.grid_n = grid_n;
    }
    if (*ref_opt) {
        opts.has_refinements = 1;
        opts.refinements = refinements;
    }
    return run(config, out, csv, opts, quiet);
}
