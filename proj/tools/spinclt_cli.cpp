// spinclt: run one experiment from a JSON config and write report.json, <kind>.csv,
// summary.json and timing.json.
//
// exit codes: 0 ok, 1 bound violated, 2 bad config or arguments, 3 resource budget, 4 other error

#include "spinclt/harness.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

struct Options {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<int> jobs;
    std::optional<double> tolerance;
};

int execute(spinclt::Experiment kind, const Options& opt) {
    using namespace spinclt;
    try {
        ExperimentConfig cfg = load_config(opt.config, kind);
        if (opt.seed) cfg.seed = *opt.seed;
        if (opt.jobs) {
            if (*opt.jobs < 1) throw ConfigError("--jobs", "must be >= 1");
            cfg.jobs = *opt.jobs;
        }
        if (opt.tolerance) {
            if (!(*opt.tolerance >= 0.0)) throw ConfigError("--tolerance", "must be >= 0");
            cfg.tolerance = *opt.tolerance;
        }
        const RunReport report = run(cfg);
        const std::string out = opt.out.empty() ? "out/" + to_string(kind) : opt.out;
        write_outputs(report, out);

        std::size_t failed = 0;
        for (const auto& c : report.checks) {
            if (c.gating && !c.report.satisfied) {
                ++failed;
                std::cerr << "violated: " << c.series << " x=" << c.x << " lhs=" << c.report.lhs
                          << " rhs=" << c.report.rhs << '\n';
            }
        }
        for (const auto& l : report.leakage) {
            if (!l.passed()) std::cerr << "leakage: " << l.what << " " << l.leakage << '\n';
        }
        std::cout << to_string(kind) << ": " << report.checks.size() << " checks, " << failed << " violated; "
                  << (report.passed() ? "PASS" : "FAIL") << " -> " << out << '\n';
        return exit_status(report);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const ResourceError& e) {
        std::cerr << "resource limit: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum fluctuation CLT experiments for spin lattices"};
    app.set_version_flag("--version", spinclt::kToolVersion);
    app.require_subcommand(1);

    Options opt;
    std::optional<spinclt::Experiment> chosen;
    for (auto kind : {spinclt::Experiment::verify, spinclt::Experiment::sweep, spinclt::Experiment::spectrum,
                      spinclt::Experiment::evolve, spinclt::Experiment::kuperberg}) {
        auto* sub = app.add_subcommand(spinclt::to_string(kind));
        sub->add_option("-c,--config", opt.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("-o,--out", opt.out, "output directory (default out/<experiment>)");
        sub->add_option("--seed", opt.seed, "override the config seed");
        sub->add_option("-j,--jobs", opt.jobs, "worker threads for spin sweeps");
        sub->add_option("--tolerance", opt.tolerance, "slack added to every bound");
        sub->callback([&chosen, kind] { chosen = kind; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    return execute(*chosen, opt);
}
