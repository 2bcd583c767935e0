#include "doctest.h"

#include "spinclt/harness.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace spinclt;
using json = nlohmann::json;

namespace {

std::string error_path(const json& doc, std::optional<Experiment> kind = std::nullopt) {
    try {
        parse_config(doc, kind);
    } catch (const ConfigError& e) {
        return e.path();
    }
    return "<no error>";
}

json sweep_doc() {
    return json::parse(R"({
        "experiment": "sweep", "sites": 2, "direction": [0.9, 1.2],
        "fields": [[0.6, -0.2, 0.4], [[0.1, 0.5, 0.0], [-0.3, 0.2, 0.7]]],
        "twice_j": [1, 2, 4, 8]
    })");
}

}  // namespace

TEST_CASE("config errors name the offending field") {
    json doc = sweep_doc();
    doc["fields"][1][0][2] = "x";
    CHECK(error_path(doc) == "fields[1][0][2]");

    doc = sweep_doc();
    doc["colour"] = 1;
    CHECK(error_path(doc) == "colour");

    doc = sweep_doc();
    doc["twice_j"][2] = 0;
    CHECK(error_path(doc) == "twice_j[2]");

    doc = sweep_doc();
    doc.erase("direction");
    doc["directions"] = json::parse("[[0.1, 0.2], [4.0, 0.0]]");
    CHECK(error_path(doc) == "directions[1]");

    doc = sweep_doc();
    doc["fields"][1] = json::parse("[[1, 2, 3]]");
    CHECK(error_path(doc) == "fields[1]");

    CHECK(error_path(sweep_doc(), Experiment::spectrum) == "experiment");

    doc = sweep_doc();
    doc.erase("twice_j");
    CHECK(error_path(doc) == "twice_j");

    const json kup = json::parse(R"({
        "experiment": "kuperberg", "fields": [[0.5, 0, 0]],
        "polynomial": {"generators": 1, "terms": [{"coeff": [0, 1], "word": [0]}]}, "ns": [2]
    })");
    CHECK(error_path(kup) == "polynomial");

    const json ham = json::parse(R"({
        "experiment": "spectrum", "sites": 2, "twice_j": [2],
        "hamiltonian": {"couplings": [{"x": 0, "y": 2, "h": [[1,0,0],[0,1,0],[0,0,1]]}]}
    })");
    CHECK(error_path(ham) == "hamiltonian.couplings[0].y");

    CHECK(error_path(json::array()) == "<root>");
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("shipped configs parse") {
    int count = 0;
    for (const auto& entry : std::filesystem::directory_iterator(SPINCLT_CONFIG_DIR)) {
        if (entry.path().extension() != ".json") continue;
        CAPTURE(entry.path().string());
        CHECK_NOTHROW(load_config(entry.path()));
        ++count;
    }
    CHECK(count >= 5);
}

TEST_CASE("polynomial configs") {
    const json doc = json::parse(R"({
        "experiment": "kuperberg", "fields": [[0.5, 0, 0], [0, 0.5, 0]],
        "polynomial": {"generators": 2, "terms": [{"coeff": 1, "word": [0, 1]}, {"coeff": 1, "word": [1, 0]}]},
        "ns": [2, 3]
    })");
    const ExperimentConfig c = parse_config(doc);
    REQUIRE(c.polynomial.has_value());
    CHECK(c.polynomial->terms().size() == NoncommPoly::anticommutator(2, 0, 1).terms().size());
}

TEST_CASE("sweep with a zero field reports zero deviations") {
    json doc = sweep_doc();
    doc["fields"] = json::parse("[[0, 0, 0], [0, 0, 0]]");
    const RunReport r = run(parse_config(doc));
    CHECK(r.passed());
    CHECK(!r.checks.empty());
    for (const auto& c : r.checks) {
        CAPTURE(c.series);
        CHECK(std::abs(c.report.lhs) < 1e-14);
    }
    CHECK(r.slopes.empty());
}

TEST_CASE("spectrum run on the one-site field case has zero error rows") {
    const json doc = json::parse(R"({
        "experiment": "spectrum", "sites": 1, "hamiltonian": {"field": [0, 0, 1]}, "twice_j": [1, 2, 4, 8]
    })");
    const RunReport r = run(parse_config(doc));
    CHECK(r.passed());
    int rows = 0;
    for (const auto& d : r.data) {
        if (d.series.rfind("error_level", 0) != 0) continue;
        ++rows;
        CHECK(d.value < 1e-12);
    }
    CHECK(rows == 2 + 3 * 3);  // J = 1/2 has only two levels
}

TEST_CASE("inadmissible spectrum config is reported, not run") {
    const json doc = json::parse(R"({
        "experiment": "spectrum", "sites": 1, "hamiltonian": {"field": [1, 0, 0]}, "twice_j": [2]
    })");
    const RunReport r = run(parse_config(doc));
    CHECK_FALSE(r.passed());
    CHECK(exit_status(r) == 1);
    CHECK(r.data.empty());
}

TEST_CASE("csv and exit status") {
    RunReport empty;
    std::ostringstream os;
    write_csv(empty, os);
    CHECK(os.str() == "x,series,value,bound,satisfied\n");
    CHECK(exit_status(empty) == 0);

    RunReport r;
    r.add_check("a", 0.1, BoundReport::make("a", 0.5, 1.0), 0.0);
    r.add_check("b", 2.0, BoundReport::make("b", 2.0, 1.0), 0.0, false);
    r.data.push_back({"d", 1.5, 1.0 / 3.0});
    std::ostringstream csv;
    write_csv(r, csv);
    CHECK(csv.str() ==
          "x,series,value,bound,satisfied\n"
          "0.10000000000000001,a,0.5,1,true\n"
          "2,b,2,1,false\n"
          "1.5,d,0.33333333333333331,,\n");
    CHECK(exit_status(r) == 0);  // the violated row is informational

    r.add_check("c", 1.0, BoundReport::make("c", 1.0 + 1e-9, 1.0), 1e-8);
    CHECK(r.checks.back().report.satisfied);
    r.add_check("c", 1.0, BoundReport::make("c", 1.0 + 1e-9, 1.0), 0.0);
    CHECK(exit_status(r) == 1);

    RunReport leak;
    leak.leakage.push_back({"cap", 1e-6});
    CHECK(exit_status(leak) == 1);
}

TEST_CASE("reports are independent of the thread count") {
    ExperimentConfig c = parse_config(sweep_doc());
    c.jobs = 1;
    const std::string one = report_json(run(c)).dump();
    c.jobs = 3;
    const std::string three = report_json(run(c)).dump();
    CHECK(one == three);
    CHECK(report_json(run(c)).dump() == three);
}

TEST_CASE("write_outputs") {
    const auto dir = std::filesystem::temp_directory_path() / "spinclt_test_outputs";
    std::filesystem::remove_all(dir);
    const RunReport r = run(parse_config(sweep_doc()));
    write_outputs(r, dir);
    for (const char* f : {"report.json", "sweep.csv", "summary.json", "timing.json"}) {
        CHECK(std::filesystem::exists(dir / f));
    }
    std::ifstream in(dir / "report.json");
    const json back = json::parse(in);
    CHECK(back["experiment"] == "sweep");
    CHECK(back["checks"].size() == r.checks.size());
    CHECK_FALSE(back.contains("timings"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("parallel_map keeps order and rethrows the first failure") {
    const auto squares = parallel_map<int>(50, 4, [](std::size_t i) { return static_cast<int>(i * i); });
    for (std::size_t i = 0; i < squares.size(); ++i) CHECK(squares[i] == static_cast<int>(i * i));
    CHECK(parallel_map<int>(0, 4, [](std::size_t) { return 1; }).empty());

    try {
        parallel_map<int>(20, 3, [](std::size_t i) -> int {
            if (i == 7 || i == 13) throw std::runtime_error(std::to_string(i));
            return 0;
        });
        FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()) == "7");
    }
}
