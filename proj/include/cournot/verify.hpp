#pragma once

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "cournot/runner.hpp"

namespace cournot {

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace verifydetail {

// The coupling a report's (config, nu) pair implies: each type plays the
// Gibbs best response to nu. At a converged fixed point this reproduces nu
// as its own column marginal up to the reported Gibbs residual.
inline std::vector<double> best_response_marginal(const ProblemSpec& p,
                                                  const std::vector<double>& nu,
                                                  double phi_factor = 1.0,
                                                  const std::vector<double>* extra = nullptr) {
    auto jt = strategy_cost_vector(p, nu, phi_factor, extra);
    int J = p.Y->size();
    Coupling g(p.X->size(), J, kNegInf);
    std::vector<double> row(J);
    for (int i = 0; i < p.X->size(); ++i) {
        if (p.mu.w[i] == 0.0) continue;
        const double* c = p.cost.values.row(i);
        for (int j = 0; j < J; ++j) row[j] = -(c[j] + jt[j]) / p.epsilon;
        double lse = logsumexp(row);
        double lm = std::log(p.mu.w[i]);
        for (int j = 0; j < J; ++j) g.log_values(i, j) = lm + row[j] - lse;
    }
    std::vector<double> out;
    out.reserve(J);
    for (double lv : log_col_sums(g)) out.push_back(std::exp(lv));
    return out;
}

inline std::vector<double> csv_mass_column(const std::string& path) {
    CsvTable t = read_csv(path);
    int col = t.column("mass");
    std::vector<double> out;
    out.reserve(t.rows.size());
    for (const auto& row : t.rows) out.push_back(parse_double(row.at(col)));
    return out;
}

struct CheckLog {
    std::ostream& out;
    bool hard_failure = false;
    bool warned = false;

    void pass(const std::string& name, const std::string& detail = "") {
        out << "[ok]   " << name << (detail.empty() ? "" : ": " + detail) << "\n";
    }
    void warn(const std::string& name, const std::string& detail) {
        warned = true;
        out << "[warn] " << name << ": " << detail << "\n";
    }
    void fail(const std::string& name, const std::string& detail) {
        hard_failure = true;
        out << "[FAIL] " << name << ": " << detail << "\n";
    }
};

}  // namespace verifydetail

// Recomputes what a report claims from its own config echo and emitted
// files. Exact artifacts (nu.csv vs report nu, trace bookkeeping, total
// mass) must match precisely; metric recomputations run through the
// independent transport solver and tolerate solver-level slack. Returns the
// process exit status: 0 consistent, 2 inconsistent.
inline int verify_report(const std::string& report_path, std::ostream& log) {
    fs::path dir = fs::path(report_path).parent_path();
    json rep = json::parse(slurp(report_path));
    verifydetail::CheckLog ck{log};

    for (const char* key : {"version", "config", "kind", "converged", "nu"})
        if (!rep.contains(key)) ck.fail("report fields", std::string("missing '") + key + "'");
    if (ck.hard_failure) return 2;

    RunConfig cfg;
    try {
        cfg = parse_config(rep.at("config"));
        ck.pass("config echo", "parses and validates");
    } catch (const Error& e) {
        ck.fail("config echo", e.what());
        return 2;
    }

    bool two_pop = rep.at("kind") == "two_population";
    bool converged = rep.at("converged").get<bool>();
    std::vector<double> nu = rep.at("nu").get<std::vector<double>>();

    auto check_measure_file = [&](const char* file, const std::vector<double>& expect,
                                  const char* what) {
        try {
            auto got = verifydetail::csv_mass_column((dir / file).string());
            if (got.size() != expect.size()) {
                ck.fail(what, "length mismatch");
                return;
            }
            for (size_t k = 0; k < got.size(); ++k)
                if (got[k] != expect[k]) {
                    ck.fail(what, "entry " + std::to_string(k) + " differs");
                    return;
                }
            ck.pass(what, "matches the report bit-for-bit");
        } catch (const Error& e) {
            ck.fail(what, e.what());
        }
    };
    check_measure_file("nu.csv", nu, "nu.csv vs report");

    double mass = pairwise_sum(nu);
    if (std::abs(mass - 1.0) <= 1e-9)
        ck.pass("nu total mass", format_double(mass));
    else
        ck.fail("nu total mass", format_double(mass) + " is off by more than 1e-9");

    try {
        CsvTable trace = read_csv((dir / "trace.csv").string());
        long total = rep.value("total_cycles", 0L);
        if (trace.rows.empty()) {
            ck.fail("trace.csv", "empty");
        } else {
            long last = std::stol(trace.rows.back().at(trace.column("cycle")));
            if (last == total)
                ck.pass("trace.csv", "final cycle " + std::to_string(last));
            else
                ck.fail("trace.csv", "final cycle " + std::to_string(last) +
                                         " != total_cycles " + std::to_string(total));
        }
    } catch (const Error& e) {
        ck.fail("trace.csv", e.what());
    }

    if (!two_pop) {
        ProblemSpec p = build_problem(cfg);
        double gibbs = rep.contains("residuals") ? rep["residuals"].value("gibbs", 0.0) : 0.0;
        if (converged) {
            try {
                auto br = verifydetail::best_response_marginal(p, nu);
                double drift = l1_diff(br, nu);
                double tol = std::max(1e-6, 10.0 * gibbs);
                if (drift <= tol)
                    ck.pass("fixed point", "best-response marginal drift " + format_double(drift));
                else
                    ck.warn("fixed point", "best-response marginal drift " + format_double(drift) +
                                               " exceeds " + format_double(tol));
            } catch (const EvaluationError& e) {
                ck.warn("fixed point", e.what());
            }
        }
        if (rep.contains("objective") && rep["objective"].is_number()) {
            try {
                double recomputed = objective_value(p, nu, 1e-9, 200000);
                double stored = rep["objective"].get<double>();
                double tol = 1e-3 * (1.0 + std::abs(stored));
                if (std::abs(recomputed - stored) <= tol)
                    ck.pass("objective", format_double(recomputed));
                else
                    ck.warn("objective", "stored " + format_double(stored) + " vs recomputed " +
                                             format_double(recomputed));
            } catch (const NonconvergenceError& e) {
                ck.warn("objective", std::string("reference transport solve: ") + e.what());
            }
        }
    } else {
        if (!rep.contains("nu2")) {
            ck.fail("report fields", "missing 'nu2'");
            return 2;
        }
        std::vector<double> nu2 = rep.at("nu2").get<std::vector<double>>();
        check_measure_file("nu2.csv", nu2, "nu2.csv vs report");
        TwoPopulationSpec s = build_two_population(cfg);
        std::vector<double> sigma(nu.size());
        for (size_t j = 0; j < nu.size(); ++j) sigma[j] = nu[j] + nu2[j];
        std::vector<double> shared_cost(nu.size(), 0.0);
        if (!s.shared_congestion.none())
            for (size_t j = 0; j < nu.size(); ++j)
                shared_cost[j] = sigma[j] > 0.0 ? s.shared_congestion.f(sigma[j]) : 0.0;
        if (converged) {
            auto check_pop = [&](const ProblemSpec& p, const std::vector<double>& own,
                                 const char* name, double gibbs) {
                try {
                    auto br = verifydetail::best_response_marginal(
                        p, own, 2.0, s.shared_congestion.none() ? nullptr : &shared_cost);
                    double drift = l1_diff(br, own);
                    double tol = std::max(1e-6, 10.0 * gibbs);
                    if (drift <= tol)
                        ck.pass(name, "best-response marginal drift " + format_double(drift));
                    else
                        ck.warn(name, "best-response marginal drift " + format_double(drift) +
                                          " exceeds " + format_double(tol));
                } catch (const EvaluationError& e) {
                    ck.warn(name, e.what());
                }
            };
            double g1 = rep.contains("pop1") ? rep["pop1"]["residuals"].value("gibbs", 0.0) : 0.0;
            double g2 = rep.contains("pop2") ? rep["pop2"]["residuals"].value("gibbs", 0.0) : 0.0;
            check_pop(s.pop1, nu, "fixed point pop1", g1);
            check_pop(s.pop2, nu2, "fixed point pop2", g2);
        }
        if (rep.contains("objective") && rep["objective"].is_number()) {
            try {
                double mk1 = sinkhorn(s.pop1.cost, s.pop1.mu.w, nu, s.pop1.epsilon, 1e-9,
                                      200000)
                                 .value;
                double mk2 = sinkhorn(s.pop2.cost, s.pop2.mu.w, nu2, s.pop2.epsilon, 1e-9,
                                      200000)
                                 .value;
                double shared_energy = 0.0;
                if (!s.shared_congestion.none())
                    shared_energy = pairwise_sum_of(sigma.size(), [&](size_t j) {
                        return sigma[j] > 0.0 ? s.shared_congestion.F(sigma[j]) : 0.0;
                    });
                double recomputed = mk1 + mk2 + energy_value(s.pop1, nu, 1.0) +
                                    energy_value(s.pop2, nu2, 1.0) + shared_energy;
                double stored = rep["objective"].get<double>();
                double tol = 1e-3 * (1.0 + std::abs(stored));
                if (std::abs(recomputed - stored) <= tol)
                    ck.pass("objective", format_double(recomputed));
                else
                    ck.warn("objective", "stored " + format_double(stored) + " vs recomputed " +
                                             format_double(recomputed));
            } catch (const NonconvergenceError& e) {
                ck.warn("objective", std::string("reference transport solve: ") + e.what());
            }
        }
    }

    if (!converged) ck.warn("convergence", "report says the solve did not converge");
    return ck.hard_failure ? 2 : 0;
}

// Small built-in instances with independently derived answers; the CLI
// exposes them so an installation can prove its arithmetic in seconds.
inline bool run_builtin_oracles(std::ostream& log) {
    verifydetail::CheckLog ck{log};

    {
        // ln(nu) + nu = 0 with unit mass and epsilon: the omega constant.
        ScalarRootProblem p{0.0, 1.0, [](double x) { return std::exp(x); },
                            [](double x) { return std::exp(x); }};
        double nu = solve_monotone_scalar(p).nu;
        if (std::abs(nu - 0.5671432904097838) <= 1e-10)
            ck.pass("scalar root, linear cost", format_double(nu));
        else
            ck.fail("scalar root, linear cost", format_double(nu));
    }
    {
        // Power congestion q=8 at eps=0.1: ln(nu) + 80 nu^7 = 0.
        CongestionView v = congestion_f_view(make_congestion(CongestionKind::power, 8.0));
        ScalarRootProblem p{0.0, 0.1, v.g_log, v.dg_log};
        double nu = solve_monotone_scalar(p).nu;
        if (std::abs(nu - 0.506157269894085) <= 1e-10)
            ck.pass("scalar root, power congestion", format_double(nu));
        else
            ck.fail("scalar root, power congestion", format_double(nu));
    }
    {
        // Log barrier with room for a root: smallest solution of
        // x + exp(-x)/10 = 0.
        CongestionView v = congestion_f_view(make_congestion(CongestionKind::log_barrier));
        ScalarRootProblem p{0.0, 10.0, v.g_log, v.dg_log};
        double nu = solve_smallest_root(p).nu;
        if (std::abs(nu - 0.027955199614682571) <= 1e-10)
            ck.pass("scalar root, log barrier smallest root", format_double(nu));
        else
            ck.fail("scalar root, log barrier smallest root", format_double(nu));
    }
    {
        // Shared congestion with symmetric halves: sigma = exp(-4 sigma^3).
        Coupling t1(1, 1, std::log(0.5)), t2(1, 1, std::log(0.5));
        CongestionView v = congestion_f_view(make_congestion(CongestionKind::power, 4.0));
        auto pr = prox_shared_congestion(t1, t2, v, 1.0, 1.0);
        double sigma = pr.first.mass(0, 0) + pr.second.mass(0, 0);
        if (std::abs(sigma - 0.5374395691384848) <= 1e-10)
            ck.pass("shared congestion column equation", format_double(sigma));
        else
            ck.fail("shared congestion column equation", format_double(sigma));
    }
    {
        // Symmetric 2x2 entropic transport: closed-form diagonal mass
        // e / (2(1+e)) and value.
        CostMatrix c{Mat::of({{0.0, 1.0}, {1.0, 0.0}})};
        auto sk = sinkhorn(c, {0.5, 0.5}, {0.5, 0.5}, 1.0, 1e-12);
        bool ok = std::abs(sk.gamma.mass(0, 0) - 0.36552928931500245) <= 1e-9 &&
                  std::abs(sk.value - (-2.006408868078168)) <= 1e-9;
        if (ok)
            ck.pass("2x2 entropic transport", format_double(sk.value));
        else
            ck.fail("2x2 entropic transport", format_double(sk.gamma.mass(0, 0)) + ", " +
                                                  format_double(sk.value));
    }
    {
        // Tiny three-strategy game: the implicit scheme against the
        // exhaustive simplex search.
        auto Y = make_space(1, {0.0, 1.0, 2.0});
        ProblemSpec p;
        p.X = make_space(1, {0.0, 2.0});
        p.Y = Y;
        p.mu = make_probability(p.X, {0.5, 0.5});
        p.cost = power_cost(*p.X, *p.Y, 2.0);
        p.congestion = make_congestion(CongestionKind::power, 2.0);
        p.interaction = interaction_kernel(*Y, 0.05, 2.0);
        p.potential = power_potential(*Y, {1.0}, 2.0, 0.5);
        p.epsilon = 0.5;
        SchemeConfig sc;
        sc.scheme = Scheme::implicit;
        auto rep = solve_implicit(p, sc);
        auto bf = brute_force_minimize(p, 150);
        double d = l1_diff(rep.nu, bf.nu.w);
        if (rep.converged && d <= 1e-4)
            ck.pass("implicit scheme vs exhaustive search", "l1 gap " + format_double(d));
        else
            ck.fail("implicit scheme vs exhaustive search", "l1 gap " + format_double(d));
    }

    return !ck.hard_failure;
}

}  // namespace cournot
