#pragma once

#include "spinclt/bosonization.hpp"
#include "spinclt/ensemble.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace spinclt {

inline constexpr const char* kToolVersion = "spinclt 1.0.0";

enum class Experiment { verify, sweep, spectrum, evolve, kuperberg };

std::string to_string(Experiment e);
Experiment parse_experiment(const std::string& name);

/// Schema violation; `path` locates the offending field, e.g. "fields[1][0]".
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& path, const std::string& message)
        : std::runtime_error(path + ": " + message), path_(path) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

struct ExperimentConfig {
    Experiment kind = Experiment::verify;
    std::size_t sites = 1;
    std::vector<Direction> directions;
    std::vector<Vec3Field> fields;
    std::vector<HalfInt> spins;
    int cap = 20;
    std::optional<SpinHamiltonianSpec> hamiltonian;
    int levels = 3;
    std::vector<double> times;
    std::vector<int> ns;
    std::optional<NoncommPoly> polynomial;
    std::uint64_t seed = 1;
    double tolerance = kBoundSlack;
    std::size_t budget = kDefaultDimensionBudget;
    int samples = 20;
    int jobs = 1;
    /// the parsed document, echoed into the report
    nlohmann::json source;
};

/// Validates everything before any computation. `kind` overrides or must match the
/// document's "experiment" entry.
ExperimentConfig parse_config(const nlohmann::json& doc, std::optional<Experiment> kind = std::nullopt);
ExperimentConfig load_config(const std::filesystem::path& path, std::optional<Experiment> kind = std::nullopt);

struct CheckRecord {
    std::string series;
    double x = 0.0;
    BoundReport report;
    /// informational rows never affect the exit status
    bool gating = true;
};

struct DataPoint {
    std::string series;
    double x = 0.0;
    double value = 0.0;
};

struct SlopeRecord {
    std::string series;
    PowerFit fit;
};

struct LeakageRecord {
    std::string what;
    double leakage = 0.0;
    double limit = 1e-8;
    bool passed() const noexcept { return leakage < limit; }
};

struct RunReport {
    Experiment kind = Experiment::verify;
    nlohmann::json config;
    std::vector<CheckRecord> checks;
    std::vector<DataPoint> data;
    std::vector<SlopeRecord> slopes;
    std::vector<LeakageRecord> leakage;
    std::vector<std::string> notes;
    /// wall-clock seconds per stage; kept out of report.json
    std::vector<std::pair<std::string, double>> timings;

    bool passed() const;
    void add_check(std::string series, double x, const BoundReport& r, double tolerance, bool gating = true);
};

RunReport run(const ExperimentConfig& config);

/// 0 success, 1 bound violation or failed leakage audit.
int exit_status(const RunReport& report);

nlohmann::json report_json(const RunReport& report);
nlohmann::json summary_json(const RunReport& report);
nlohmann::json timing_json(const RunReport& report);
/// Long format: x,series,value,bound,satisfied with 17 significant digits.
void write_csv(const RunReport& report, std::ostream& os);
/// report.json, <kind>.csv, summary.json, timing.json in `dir` (created if missing).
void write_outputs(const RunReport& report, const std::filesystem::path& dir);

/// Evaluates fn(0..n-1) on up to `jobs` threads; results keep index order. The first
/// exception (lowest index) is rethrown.
template <class T>
std::vector<T> parallel_map(std::size_t n, int jobs, const std::function<T(std::size_t)>& fn) {
    std::vector<std::optional<T>> slots(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                slots[i].emplace(fn(i));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    std::vector<T> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (errors[i]) std::rethrow_exception(errors[i]);
        out.push_back(std::move(*slots[i]));
    }
    return out;
}

}  // namespace spinclt
