#pragma once

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cournot/config.hpp"
#include "cournot/csv.hpp"
#include "cournot/multipop.hpp"
#include "cournot/version.hpp"

namespace cournot {

namespace fs = std::filesystem;

struct RunOptions {
    std::string out_dir = "out";
    int threads = 1;
};

struct RunOutcome {
    int exit_status = 0;  // 0 converged, 2 finished without convergence
    bool converged = true;
    std::string out_dir;
};

struct SingleResult {
    RunOutcome outcome;
    json report;
};

namespace rundetail {

inline json trace_row_json(const TraceRow& r) {
    return json{{"cycle", r.cycle},
                {"nu_change_l1", r.nu_change_l1},
                {"marginal_residual_l1", r.marginal_residual_l1},
                {"seconds", r.seconds}};
}

inline void write_trace_csv(const fs::path& path, const std::vector<TraceRow>& trace) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(trace.size());
    for (const auto& r : trace)
        rows.push_back({std::to_string(r.cycle), format_double(r.nu_change_l1),
                        format_double(r.marginal_residual_l1), format_double(r.seconds)});
    write_csv(path.string(), {"cycle", "nu_change_l1", "marginal_residual_l1", "seconds"}, rows);
}

inline void write_measure_csv(const fs::path& path, const DiscreteSpace& space,
                              const std::vector<double>& w, const char* index_name) {
    std::vector<std::string> header;
    header.push_back(index_name);
    header.push_back("x");
    if (space.dim == 2) header.push_back("y");
    header.push_back("mass");
    std::vector<std::vector<std::string>> rows;
    rows.reserve(w.size());
    for (size_t k = 0; k < w.size(); ++k) {
        std::vector<std::string> row{std::to_string(k),
                                     format_double(space.coord(static_cast<int>(k), 0))};
        if (space.dim == 2) row.push_back(format_double(space.coord(static_cast<int>(k), 1)));
        row.push_back(format_double(w[k]));
        rows.push_back(std::move(row));
    }
    write_csv(path.string(), header, rows);
}

// Entries at least threshold_rel times the largest mass. In 1D (x, y) are
// the type and strategy coordinates; in 2D they are the two coordinates of
// the strategy point (i and j keep the full pair identity).
inline void write_support_csv(const fs::path& path, const Coupling& g, const DiscreteSpace& X,
                              const DiscreteSpace& Y, double threshold_rel) {
    double log_max = kNegInf;
    for (size_t k = 0; k < g.log_values.size(); ++k)
        log_max = std::max(log_max, g.log_values.data()[k]);
    double log_cut = log_max + std::log(threshold_rel);
    std::vector<std::vector<std::string>> rows;
    for (int i = 0; i < g.rows(); ++i) {
        const double* lg = g.log_values.row(i);
        for (int j = 0; j < g.cols(); ++j) {
            if (lg[j] < log_cut) continue;
            double x = X.dim == 1 ? X.coord(i, 0) : Y.coord(j, 0);
            double y = X.dim == 1 ? Y.coord(j, 0) : Y.coord(j, 1);
            rows.push_back({std::to_string(i), std::to_string(j), format_double(x),
                            format_double(y), format_double(std::exp(lg[j]))});
        }
    }
    write_csv(path.string(), {"i", "j", "x", "y", "mass"}, rows);
}

inline json residuals_json(const Residuals& r) {
    return json{{"nu_change", r.nu_change}, {"marginal_l1", r.marginal_l1}, {"gibbs", r.gibbs}};
}

inline json trace_summary(const std::vector<TraceRow>& trace) {
    json j;
    j["rows"] = trace.size();
    if (!trace.empty()) j["final"] = trace_row_json(trace.back());
    return j;
}

inline void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
}

inline std::string plot_script(int dim, bool two_pop) {
    std::ostringstream s;
    s << "set terminal pngcairo size 1100,800\n"
      << "set output 'solution.png'\n"
      << "set key outside\n";
    if (dim == 1 && !two_pop) {
        s << "set multiplot layout 2,1\n"
          << "set title 'type and strategy distributions'\n"
          << "plot 'mu.csv' using 2:3 with lines lw 2 title 'mu', \\\n"
          << "     'nu.csv' using 2:3 with lines lw 2 title 'nu'\n"
          << "set title 'coupling support (mass-scaled points)'\n"
          << "set xlabel 'type x'\nset ylabel 'strategy y'\n"
          << "plot 'gamma_support.csv' using 3:4:($5**0.5*3) with points pt 7 ps variable "
             "title 'support'\n"
          << "unset multiplot\n";
    } else if (dim == 1 && two_pop) {
        s << "set title 'two-population strategy distributions'\n"
          << "plot 'mu.csv' using 2:3 with lines dt 2 title 'mu1', \\\n"
          << "     'mu2.csv' using 2:3 with lines dt 2 title 'mu2', \\\n"
          << "     'nu.csv' using 2:3 with lines lw 2 title 'nu1', \\\n"
          << "     'nu2.csv' using 2:3 with lines lw 2 title 'nu2'\n";
    } else {
        s << "set title 'strategy distribution'\n"
          << "set view map\n"
          << "splot 'nu.csv' using 2:3:4 with points pt 5 ps 1 palette title 'nu'\n";
    }
    return s.str();
}

inline double l1_between(const std::vector<double>& a, const std::vector<double>& b) {
    return l1_diff(a, b);
}

}  // namespace rundetail

// Solves one configuration and writes the full artifact set into dir:
// mu.csv, nu.csv (and mu2/nu2 for two populations), gamma_support.csv,
// trace.csv, report.json and plot.gp.
inline SingleResult run_single(const json& echo, const RunConfig& cfg, const std::string& dir) {
    fs::create_directories(dir);
    SingleResult out;
    out.outcome.out_dir = dir;

    json rep;
    rep["version"] = kVersion;
    rep["config"] = echo;

    if (!cfg.two_population.present) {
        ProblemSpec p = build_problem(cfg);
        SchemeConfig sc = build_scheme_config(cfg);
        SolveReport r = solve(p, sc);

        rundetail::write_measure_csv(fs::path(dir) / "mu.csv", *p.X, p.mu.w, "i");
        rundetail::write_measure_csv(fs::path(dir) / "nu.csv", *p.Y, r.nu, "j");
        rundetail::write_support_csv(fs::path(dir) / "gamma_support.csv", r.gamma, *p.X, *p.Y,
                                     cfg.output.support_threshold);
        rundetail::write_trace_csv(fs::path(dir) / "trace.csv", r.trace);
        rundetail::write_text(fs::path(dir) / "plot.gp",
                              rundetail::plot_script(p.X->dim, false));

        rep["kind"] = "single";
        rep["scheme"] = r.scheme;
        rep["epsilon"] = r.epsilon;
        rep["converged"] = r.converged;
        rep["outer_iterations"] = r.outer_iterations;
        rep["total_cycles"] = r.total_cycles;
        rep["prox_evaluations"] = r.prox_evaluations;
        rep["prox_ops_per_cycle"] = r.prox_ops_per_cycle;
        rep["outer_tol"] = r.outer_tol;
        rep["residuals"] = rundetail::residuals_json(r.residuals);
        rep["objective"] = r.objective;
        rep["transport_value"] = r.transport_value;
        rep["energy"] = r.energy;
        rep["exploitability"] = r.exploitability;
        rep["concentration"] = r.concentration;
        rep["nu_mu_l1"] = rundetail::l1_between(r.nu, p.mu.w);
        rep["nu"] = r.nu;
        rep["wall_seconds"] = r.wall_seconds;
        rep["warnings"] = r.warnings;
        rep["trace_summary"] = rundetail::trace_summary(r.trace);
        out.outcome.converged = r.converged;
    } else {
        TwoPopulationSpec s = build_two_population(cfg);
        SchemeConfig sc = build_scheme_config(cfg);
        TwoPopulationReport r = solve_two_populations(s, sc);

        rundetail::write_measure_csv(fs::path(dir) / "mu.csv", *s.pop1.X, s.pop1.mu.w, "i");
        rundetail::write_measure_csv(fs::path(dir) / "mu2.csv", *s.pop2.X, s.pop2.mu.w, "i");
        rundetail::write_measure_csv(fs::path(dir) / "nu.csv", *s.pop1.Y, r.pop1.nu, "j");
        rundetail::write_measure_csv(fs::path(dir) / "nu2.csv", *s.pop2.Y, r.pop2.nu, "j");
        rundetail::write_support_csv(fs::path(dir) / "gamma_support.csv", r.pop1.gamma,
                                     *s.pop1.X, *s.pop1.Y, cfg.output.support_threshold);
        rundetail::write_support_csv(fs::path(dir) / "gamma2_support.csv", r.pop2.gamma,
                                     *s.pop2.X, *s.pop2.Y, cfg.output.support_threshold);
        rundetail::write_trace_csv(fs::path(dir) / "trace.csv", r.trace);
        rundetail::write_text(fs::path(dir) / "plot.gp",
                              rundetail::plot_script(s.pop1.X->dim, true));

        rep["kind"] = "two_population";
        rep["scheme"] = "semi_implicit";
        rep["converged"] = r.converged;
        rep["outer_iterations"] = r.outer_iterations;
        rep["total_cycles"] = r.total_cycles;
        rep["prox_evaluations"] = r.prox_evaluations;
        rep["prox_ops_per_cycle"] = r.prox_ops_per_cycle;
        rep["outer_tol"] = r.outer_tol;
        rep["objective"] = r.objective;
        rep["shared_energy"] = r.shared_energy;
        rep["overlap"] = r.overlap;
        auto pop_json = [](const PopulationReport& pr, double eps) {
            return json{{"epsilon", eps},
                        {"residuals", rundetail::residuals_json(pr.residuals)},
                        {"transport_value", pr.transport_value},
                        {"energy", pr.energy},
                        {"exploitability", pr.exploitability},
                        {"concentration", pr.concentration}};
        };
        rep["pop1"] = pop_json(r.pop1, s.pop1.epsilon);
        rep["pop2"] = pop_json(r.pop2, s.pop2.epsilon);
        rep["nu"] = r.pop1.nu;
        rep["nu2"] = r.pop2.nu;
        rep["wall_seconds"] = r.wall_seconds;
        rep["warnings"] = r.warnings;
        rep["trace_summary"] = rundetail::trace_summary(r.trace);
        out.outcome.converged = r.converged;
    }

    out.outcome.exit_status = out.outcome.converged ? 0 : 2;
    rundetail::write_text(fs::path(dir) / "report.json", rep.dump(2) + "\n");
    out.report = std::move(rep);
    return out;
}

namespace rundetail {

inline std::string sweep_dir_name(const std::string& parameter, const json& value) {
    std::string v = value.is_string() ? value.get<std::string>() : value.dump();
    return parameter + "=" + v;
}

inline std::string summary_cell(const json& rep, const char* key) {
    if (!rep.contains(key) || rep.at(key).is_null()) return "";
    const json& v = rep.at(key);
    if (v.is_number_float()) return format_double(v.get<double>());
    return v.dump();
}

}  // namespace rundetail

// Runs every sweep point into its own subdirectory and writes summary.csv.
// Points are independent solves, so they can run on worker threads without
// touching each other's arithmetic; results land in value order regardless.
inline RunOutcome run_sweep(const json& doc, const RunConfig& cfg, const RunOptions& opts) {
    fs::create_directories(opts.out_dir);
    const auto& sw = cfg.sweep;

    struct Point {
        json value;
        std::string dir;
        json point_doc;
    };
    std::vector<Point> points;
    for (const auto& v : sw.values) {
        json pd = doc;
        pd.erase("sweep");
        set_config_path(pd, sw.parameter, v);
        std::string sub =
            (fs::path(opts.out_dir) / rundetail::sweep_dir_name(sw.parameter, v)).string();
        points.push_back({v, sub, std::move(pd)});
    }
    // Validate every point before doing any heavy work.
    std::vector<RunConfig> parsed;
    parsed.reserve(points.size());
    for (const auto& pt : points) parsed.push_back(parse_config(pt.point_doc));

    std::vector<SingleResult> results(points.size());
    int workers = std::max(1, opts.threads);
    if (workers == 1) {
        for (size_t k = 0; k < points.size(); ++k)
            results[k] = run_single(points[k].point_doc, parsed[k], points[k].dir);
    } else {
        for (size_t base = 0; base < points.size(); base += workers) {
            size_t end = std::min(points.size(), base + workers);
            std::vector<std::future<SingleResult>> futs;
            for (size_t k = base; k < end; ++k)
                futs.push_back(std::async(std::launch::async, [&, k] {
                    return run_single(points[k].point_doc, parsed[k], points[k].dir);
                }));
            for (size_t k = base; k < end; ++k) results[k] = futs[k - base].get();
        }
    }

    std::vector<std::vector<std::string>> rows;
    bool all_converged = true;
    for (size_t k = 0; k < points.size(); ++k) {
        const json& rep = results[k].report;
        all_converged = all_converged && results[k].outcome.converged;
        std::string value = points[k].value.is_string() ? points[k].value.get<std::string>()
                                                        : points[k].value.dump();
        rows.push_back({sw.parameter, value,
                        results[k].outcome.converged ? "1" : "0",
                        rundetail::summary_cell(rep, "outer_iterations"),
                        rundetail::summary_cell(rep, "total_cycles"),
                        rundetail::summary_cell(rep, "objective"),
                        rundetail::summary_cell(rep, "exploitability"),
                        rundetail::summary_cell(rep, "concentration"),
                        rundetail::summary_cell(rep, "nu_mu_l1"),
                        rundetail::summary_cell(rep, "overlap"),
                        rundetail::summary_cell(rep, "wall_seconds")});
    }
    write_csv((fs::path(opts.out_dir) / "summary.csv").string(),
              {"parameter", "value", "converged", "outer_iterations", "total_cycles", "objective",
               "exploitability", "concentration", "nu_mu_l1", "overlap", "wall_seconds"},
              rows);

    std::ostringstream plot;
    plot << "set terminal pngcairo size 900,600\n"
         << "set output 'sweep.png'\n"
         << "set datafile separator ','\n"
         << "set key autotitle columnhead\n"
         << "set logscale x\n"
         << "set xlabel '" << sw.parameter << "'\n"
         << "plot 'summary.csv' using 2:6 with linespoints title 'objective', \\\n"
         << "     'summary.csv' using 2:7 with linespoints title 'exploitability'\n";
    rundetail::write_text(fs::path(opts.out_dir) / "plot.gp", plot.str());

    RunOutcome out;
    out.out_dir = opts.out_dir;
    out.converged = all_converged;
    out.exit_status = all_converged ? 0 : 2;
    return out;
}

// Entry point behind the CLI: parse + validate, then dispatch.
inline RunOutcome run(const json& doc, const RunOptions& opts, bool sweep_requested) {
    RunConfig cfg = parse_config(doc);
    if (sweep_requested) {
        if (!cfg.sweep.present)
            throw InvalidConfigError("sweep requested but the config has no sweep section");
        return run_sweep(doc, cfg, opts);
    }
    if (cfg.sweep.present)
        throw InvalidConfigError(
            "config has a sweep section; use the sweep subcommand (or remove it)");
    return run_single(doc, cfg, opts.out_dir).outcome;
}

}  // namespace cournot
