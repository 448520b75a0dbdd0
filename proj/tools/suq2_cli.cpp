// Command-line driver for the verification campaigns.

#include <CLI11.hpp>
#include <chrono>
#include <iostream>
#include <string>

#include "suq2/report.hpp"

int main(int argc, char** argv) {
    CLI::App app{"spectral-triple verification suite for quantum SU(2)"};
    app.fallthrough();
    app.require_subcommand(1);

    suq2::RunConfig cfg;

    // a config file is applied first, flags override it
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        std::string path;
        if (arg == "--config" && i + 1 < argc) path = argv[i + 1];
        if (arg.rfind("--config=", 0) == 0) path = arg.substr(9);
        if (!path.empty()) {
            try {
                suq2::load_config_file(cfg, path);
            } catch (const suq2::ConfigError& e) {
                std::cerr << "config error: " << e.what() << "\n";
                return 2;
            }
        }
    }

    std::string precision = cfg.precision == suq2::PrecisionMode::extended ? "extended" : "standard";
    std::string output = cfg.output == suq2::OutputFormat::json  ? "json"
                         : cfg.output == suq2::OutputFormat::csv ? "csv"
                                                                 : "text";
    std::string config_path;

    app.add_option("--q", cfg.q, "deformation parameter, 0 < q < 1");
    app.add_option("--max-2j", cfg.max2j, "basis truncation 2J (>= 4)");
    app.add_option("--tol", cfg.tol_check, "generic check tolerance");
    app.add_option("--tol-kernel", cfg.tol_kernel, "singular-value threshold for kernels");
    app.add_option("--precision", precision, "residue extraction precision")
        ->check(CLI::IsMember({"standard", "extended"}));
    app.add_option("--output", output, "report format")
        ->check(CLI::IsMember({"json", "csv", "text"}));
    app.add_option("--out-file", cfg.out_file, "write the report to a file instead of stdout");
    app.add_option("--seed", cfg.seed, "seed for sampled checks");
    app.add_option("--threads", cfg.threads, "worker threads for level scans");
    app.add_flag("--strict-truncation", cfg.strict_truncation,
                 "error out when materialization drops amplitudes");
    app.add_option("--config", config_path, "key=value config file (flags override)");

    for (const auto& name : suq2::suite_names())
        app.add_subcommand(name, "run the " + name + " checks");
    app.add_subcommand("report-all", "run every suite in order");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        suq2::apply_config_kv(cfg, "precision", precision);
        suq2::apply_config_kv(cfg, "output", output);
        std::string suite = app.get_subcommands().front()->get_name();
        auto t0 = std::chrono::steady_clock::now();
        int rc = suq2::run(suite, cfg, std::cout, std::cerr);
        auto ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        std::cerr << "# " << suite << " finished in " << ms * 1e-3 << " s\n";
        return rc;
    } catch (const suq2::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
