#include <catch_amalgamated.hpp>

#include <filesystem>
#include <sstream>

#include "cournot/cournot.hpp"

using namespace cournot;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / ("cournot_runner_" + name);
    fs::remove_all(dir);
    return dir;
}

json small_doc() {
    return json{
        {"domain", {{"bounds", {{0.0, 4.0}}}, {"n", 10}}},
        {"mu", {{"components", json::array({{{"center", 2.0}, {"stdev", 0.7}}})}}},
        {"cost", {{"power", 2.0}}},
        {"congestion", {{"kind", "power"}, {"exponent", 2.0}}},
        {"interaction", {{"scale", 0.01}, {"exponent", 2.0}}},
        {"potential", {{"coeff", 0.5}, {"center", 2.0}, {"exponent", 2.0}}},
        {"epsilon", 0.5},
    };
}

}  // namespace

TEST_CASE("a single run writes the full artifact set") {
    fs::path dir = scratch("single");
    json doc = small_doc();
    SingleResult res = run_single(doc, parse_config(doc), dir.string());

    REQUIRE(res.outcome.exit_status == 0);
    REQUIRE(res.outcome.converged);
    for (const char* f : {"mu.csv", "nu.csv", "gamma_support.csv", "trace.csv", "report.json",
                          "plot.gp"})
        REQUIRE(fs::exists(dir / f));

    const json& rep = res.report;
    REQUIRE(rep.at("version") == kVersion);
    REQUIRE(rep.at("config") == doc);
    REQUIRE(rep.at("kind") == "single");
    REQUIRE(rep.at("scheme") == "semi_implicit");
    REQUIRE(rep.at("converged") == true);
    REQUIRE(rep.at("nu").size() == 10);
    REQUIRE(rep.at("residuals").contains("gibbs"));
    REQUIRE(rep.at("trace_summary").at("final").at("cycle").get<long>() ==
            rep.at("total_cycles").get<long>());

    // nu.csv cells reproduce the report bit-for-bit and sum to one.
    CsvTable nu_csv = read_csv((dir / "nu.csv").string());
    REQUIRE(nu_csv.header == std::vector<std::string>{"j", "x", "mass"});
    REQUIRE(nu_csv.rows.size() == 10);
    int mass_col = nu_csv.column("mass");
    double total = 0.0;
    for (size_t k = 0; k < nu_csv.rows.size(); ++k) {
        double v = parse_double(nu_csv.rows[k][mass_col]);
        REQUIRE(v == rep.at("nu")[k].get<double>());
        total += v;
    }
    REQUIRE(std::abs(total - 1.0) <= 1e-9);

    CsvTable support = read_csv((dir / "gamma_support.csv").string());
    REQUIRE(support.header == std::vector<std::string>{"i", "j", "x", "y", "mass"});
    REQUIRE(!support.rows.empty());
    REQUIRE(support.rows.size() <= 100);

    CsvTable trace = read_csv((dir / "trace.csv").string());
    REQUIRE(std::stol(trace.rows.back()[trace.column("cycle")]) ==
            rep.at("total_cycles").get<long>());

    std::ostringstream log;
    REQUIRE(verify_report((dir / "report.json").string(), log) == 0);
    REQUIRE_THAT(log.str(), Catch::Matchers::ContainsSubstring("[ok]"));
    REQUIRE_THAT(log.str(), !Catch::Matchers::ContainsSubstring("[FAIL]"));
}

TEST_CASE("emitted artifacts are byte deterministic") {
    fs::path a = scratch("det_a"), b = scratch("det_b");
    json doc = small_doc();
    run_single(doc, parse_config(doc), a.string());
    run_single(doc, parse_config(doc), b.string());
    for (const char* f : {"mu.csv", "nu.csv", "gamma_support.csv"})
        REQUIRE(slurp((a / f).string()) == slurp((b / f).string()));

    // trace.csv carries wall-clock seconds; the numeric trajectory is the
    // deterministic part.
    CsvTable ta = read_csv((a / "trace.csv").string());
    CsvTable tb = read_csv((b / "trace.csv").string());
    REQUIRE(ta.rows.size() == tb.rows.size());
    for (const char* col : {"cycle", "nu_change_l1", "marginal_residual_l1"})
        for (size_t r = 0; r < ta.rows.size(); ++r)
            REQUIRE(ta.rows[r][ta.column(col)] == tb.rows[r][tb.column(col)]);
}

TEST_CASE("unconverged runs exit 2 and still write artifacts") {
    fs::path dir = scratch("unconverged");
    json doc = small_doc();
    // Break the symmetry of the base doc: with mu and the potential both
    // centered, a quadratic interaction shifts the kernel by a constant per
    // column and the outer loop genuinely converges in two steps.
    doc["mu"]["components"][0]["center"] = 1.3;
    doc["potential"]["center"] = 3.0;
    doc["interaction"]["scale"] = 0.05;
    doc["tolerances"] = {{"outer_tol", 1e-15}, {"max_outer", 2}};
    SingleResult res = run_single(doc, parse_config(doc), dir.string());

    REQUIRE(res.outcome.exit_status == 2);
    REQUIRE_FALSE(res.outcome.converged);
    REQUIRE(res.report.at("converged") == false);
    REQUIRE(!res.report.at("warnings").empty());
    for (const char* f : {"nu.csv", "trace.csv", "report.json"}) REQUIRE(fs::exists(dir / f));

    // Verification warns about the convergence flag but finds no lies.
    std::ostringstream log;
    REQUIRE(verify_report((dir / "report.json").string(), log) == 0);
    REQUIRE_THAT(log.str(), Catch::Matchers::ContainsSubstring("[warn]"));
}

TEST_CASE("tampered artifacts are caught") {
    fs::path dir = scratch("tamper");
    json doc = small_doc();
    run_single(doc, parse_config(doc), dir.string());

    CsvTable nu_csv = read_csv((dir / "nu.csv").string());
    nu_csv.rows[3][nu_csv.column("mass")] = "0.5";
    write_csv((dir / "nu.csv").string(), nu_csv.header, nu_csv.rows);

    std::ostringstream log;
    REQUIRE(verify_report((dir / "report.json").string(), log) == 2);
    REQUIRE_THAT(log.str(), Catch::Matchers::ContainsSubstring("[FAIL]"));

    fs::remove(dir / "nu.csv");
    std::ostringstream log2;
    REQUIRE(verify_report((dir / "report.json").string(), log2) == 2);

    rundetail::write_text(dir / "report.json", "{}\n");
    std::ostringstream log3;
    REQUIRE(verify_report((dir / "report.json").string(), log3) == 2);
}

TEST_CASE("a sweep writes one directory per value plus a summary") {
    fs::path dir = scratch("sweep");
    json doc = small_doc();
    doc["sweep"] = {{"parameter", "epsilon"}, {"values", {0.5, 1.0}}};
    RunOptions opts;
    opts.out_dir = dir.string();
    RunOutcome out = run(doc, opts, true);

    REQUIRE(out.exit_status == 0);
    REQUIRE(fs::exists(dir / "epsilon=0.5" / "report.json"));
    REQUIRE(fs::exists(dir / "epsilon=1.0" / "report.json"));
    REQUIRE(fs::exists(dir / "plot.gp"));

    CsvTable summary = read_csv((dir / "summary.csv").string());
    REQUIRE(summary.header ==
            std::vector<std::string>{"parameter", "value", "converged", "outer_iterations",
                                     "total_cycles", "objective", "exploitability",
                                     "concentration", "nu_mu_l1", "overlap", "wall_seconds"});
    REQUIRE(summary.rows.size() == 2);
    REQUIRE(summary.rows[0][summary.column("value")] == "0.5");
    REQUIRE(summary.rows[1][summary.column("value")] == "1.0");
    for (const auto& row : summary.rows) {
        REQUIRE(row[summary.column("converged")] == "1");
        REQUIRE(row[summary.column("overlap")] == "");  // single-population sweep
        REQUIRE(parse_double(row[summary.column("objective")]) ==
                parse_double(row[summary.column("objective")]));
    }

    // Each point's report echoes the patched document, sweep section removed.
    json rep = json::parse(slurp((dir / "epsilon=1.0" / "report.json").string()));
    REQUIRE(rep.at("config").at("epsilon") == json(1.0));
    REQUIRE_FALSE(rep.at("config").contains("sweep"));

    // Dispatch guards: sweep config needs the sweep entry point and vice versa.
    REQUIRE_THROWS_AS(run(doc, opts, false), InvalidConfigError);
    REQUIRE_THROWS_AS(run(small_doc(), opts, true), InvalidConfigError);
}

TEST_CASE("sweep points are validated before any solve runs") {
    fs::path dir = scratch("sweep_bad");
    json doc = small_doc();
    doc["sweep"] = {{"parameter", "epsilon"}, {"values", {0.5, -1.0}}};
    RunOptions opts;
    opts.out_dir = dir.string();
    REQUIRE_THROWS_AS(run(doc, opts, true), InvalidConfigError);
    REQUIRE_FALSE(fs::exists(dir / "epsilon=0.5" / "report.json"));
}

TEST_CASE("worker threads do not change sweep results") {
    fs::path one = scratch("sweep_t1"), two = scratch("sweep_t2");
    json doc = small_doc();
    doc["sweep"] = {{"parameter", "epsilon"}, {"values", {0.5, 1.0}}};
    RunOptions o1{one.string(), 1}, o2{two.string(), 2};
    REQUIRE(run(doc, o1, true).exit_status == 0);
    REQUIRE(run(doc, o2, true).exit_status == 0);
    for (const char* point : {"epsilon=0.5", "epsilon=1.0"}) {
        json r1 = json::parse(slurp((one / point / "report.json").string()));
        json r2 = json::parse(slurp((two / point / "report.json").string()));
        REQUIRE(r1.at("nu") == r2.at("nu"));
        REQUIRE(r1.at("total_cycles") == r2.at("total_cycles"));
    }
}

TEST_CASE("two-population runs emit both populations' artifacts") {
    fs::path dir = scratch("two_pop");
    json doc = small_doc();
    doc["two_population"] = {
        {"mu", {{"components", json::array({{{"center", 3.0}, {"stdev", 0.7}}})}}},
        {"shared_congestion", {{"kind", "power"}, {"exponent", 4.0}}},
    };
    SingleResult res = run_single(doc, parse_config(doc), dir.string());

    REQUIRE(res.outcome.exit_status == 0);
    for (const char* f : {"mu.csv", "mu2.csv", "nu.csv", "nu2.csv", "gamma_support.csv",
                          "gamma2_support.csv", "trace.csv", "report.json", "plot.gp"})
        REQUIRE(fs::exists(dir / f));

    const json& rep = res.report;
    REQUIRE(rep.at("kind") == "two_population");
    REQUIRE(rep.at("pop1").at("residuals").contains("gibbs"));
    REQUIRE(rep.at("pop2").at("epsilon") == json(0.5));
    REQUIRE(rep.at("overlap").is_number());
    REQUIRE(rep.at("nu2").size() == 10);

    std::ostringstream log;
    REQUIRE(verify_report((dir / "report.json").string(), log) == 0);
}

TEST_CASE("builtin oracle suite reproduces its frozen answers") {
    std::ostringstream log;
    REQUIRE(run_builtin_oracles(log));
    REQUIRE_THAT(log.str(), Catch::Matchers::ContainsSubstring("[ok]"));
    REQUIRE_THAT(log.str(), !Catch::Matchers::ContainsSubstring("[FAIL]"));
}
