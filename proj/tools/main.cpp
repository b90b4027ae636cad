// Batch driver: verification campaigns, spectra extraction and report
// merging. Exit codes: 0 all residuals within bounds, 1 residual
// failure, 2 configuration or numerical error.
#include <CLI11.hpp>
#include <chrono>
#include <iostream>
#include <string>
#include <vector>

#include "qev/checks.hpp"
#include "qev/report.hpp"

namespace {

std::string csv_path_for(const std::string& report_path) {
    const std::string suffix = ".json";
    if (report_path.size() > suffix.size() &&
        report_path.compare(report_path.size() - suffix.size(), suffix.size(),
                            suffix) == 0)
        return report_path.substr(0, report_path.size() - suffix.size()) + ".csv";
    return report_path + ".csv";
}

int emit(const qev::Report& rep, const std::string& out_path, bool with_csv) {
    // Timings go to stderr only; the report file stays byte-identical
    // across reruns of the same config+seed.
    for (const auto& c : rep.checks)
        if (!c.pass)
            std::cerr << "FAIL " << c.id << " [" << c.params
                      << "] residual=" << c.residual << " bound=" << c.bound
                      << "\n";
    if (out_path.empty()) {
        std::cout << rep.to_json();
    } else {
        qev::write_text_file(out_path, rep.to_json());
        if (with_csv)
            qev::write_text_file(csv_path_for(out_path),
                                 qev::bethe_roots_csv(rep.bethe_roots));
    }
    return rep.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Q-operator verification suite for higher-spin elliptic chains"};
    app.require_subcommand(1);

    std::string config_path, out_path;
    int seed_override = -1;
    std::vector<std::string> merge_inputs;

    auto add_campaign = [&](const std::string& name, const std::string& desc) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->add_option("--config", config_path, "JSON configuration file")
            ->required();
        sub->add_option("--seed", seed_override, "override the config seed");
        sub->add_option("--out", out_path, "report output path (default: stdout)");
        return sub;
    };
    CLI::App* alg = add_campaign("verify-algebra",
                                 "theta laws, representation, Hermitian form");
    CLI::App* lat = add_campaign("verify-lattice",
                                 "L-operators, transfer matrix, pseudo-vacua");
    CLI::App* qop = add_campaign("verify-qop", "Q-operator commutation relations");
    CLI::App* spc = add_campaign("spectra", "Bethe roots and spectral identities");

    CLI::App* mrg = app.add_subcommand("report", "merge JSON reports");
    mrg->add_option("--out", out_path, "merged report path (default: stdout)");
    mrg->add_option("inputs", merge_inputs, "report files to merge")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (mrg->parsed()) {
            std::vector<qev::Report> parts;
            for (const auto& f : merge_inputs)
                parts.push_back(qev::Report::from_json_file(f));
            return emit(qev::Report::merge(parts), out_path, false);
        }

        qev::RunConfig cfg = qev::load_config(config_path);
        if (seed_override >= 0) cfg.seed = static_cast<unsigned>(seed_override);
        if (!out_path.empty()) cfg.report_path = out_path;

        const auto t0 = std::chrono::steady_clock::now();
        qev::Report rep;
        bool csv = false;
        if (alg->parsed()) rep = qev::verify_algebra(cfg);
        else if (lat->parsed()) rep = qev::verify_lattice(cfg);
        else if (qop->parsed()) rep = qev::verify_qop(cfg);
        else if (spc->parsed()) {
            rep = qev::run_spectra(cfg);
            csv = true;
        }
        const auto t1 = std::chrono::steady_clock::now();
        std::cerr << "elapsed "
                  << std::chrono::duration<double>(t1 - t0).count() << " s\n";
        return emit(rep, cfg.report_path, csv);
    } catch (const qev::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
