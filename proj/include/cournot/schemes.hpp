#pragma once

#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include "cournot/diagnostics.hpp"
#include "cournot/dykstra.hpp"
#include "cournot/model.hpp"
#include "cournot/prox.hpp"

namespace cournot {

enum class Scheme { implicit, semi_implicit };

inline std::string to_string(Scheme s) {
    return s == Scheme::implicit ? "implicit" : "semi_implicit";
}

struct SchemeConfig {
    Scheme scheme = Scheme::semi_implicit;
    double outer_tol = 1e-8;
    int max_outer = 5000;
    NewtonConfig newton;
    DykstraConfig dykstra = tightened_inner();
    int stall_limit = 50;  // consecutive non-improving outer steps before giving up

    // The inner loop runs two orders of magnitude below the outer tolerance
    // so the Gibbs fixed-point certificate (residual <= 10 * outer_tol)
    // holds with margin. Standalone Dykstra keeps looser defaults.
    static DykstraConfig tightened_inner() {
        DykstraConfig d;
        d.tol_nu = 1e-10;
        d.trace_every = 0;
        return d;
    }
};

struct Residuals {
    double nu_change = 0.0;     // last outer (or cycle) l1 change of nu
    double marginal_l1 = 0.0;   // || row sums - mu ||_1
    double gibbs = 0.0;         // worst-row distance to the Gibbs best response
};

struct SolveReport {
    std::string scheme;
    std::vector<double> nu;
    Coupling gamma;
    int outer_iterations = 0;
    long total_cycles = 0;
    long prox_evaluations = 0;
    int prox_ops_per_cycle = 0;
    bool converged = false;
    Residuals residuals;
    double objective = std::numeric_limits<double>::quiet_NaN();
    double transport_value = std::numeric_limits<double>::quiet_NaN();
    double energy = std::numeric_limits<double>::quiet_NaN();
    double exploitability = std::numeric_limits<double>::quiet_NaN();
    double concentration = std::numeric_limits<double>::quiet_NaN();
    double epsilon = 0.0;
    double outer_tol = 0.0;
    double wall_seconds = 0.0;
    std::vector<TraceRow> trace;  // inner cycles, renumbered globally
    std::vector<std::string> warnings;
};

namespace detail {

inline std::vector<double> column_masses(const Coupling& g) {
    std::vector<double> nu;
    nu.reserve(g.cols());
    for (double lv : log_col_sums(g)) nu.push_back(std::exp(lv));
    return nu;
}

inline void append_trace(std::vector<TraceRow>& all, const std::vector<TraceRow>& part,
                         long cycle_offset, double seconds_offset) {
    for (TraceRow r : part) {
        r.cycle += static_cast<int>(cycle_offset);
        r.seconds += seconds_offset;
        all.push_back(r);
    }
}

inline void check_interaction_contraction(const ProblemSpec& p, std::vector<std::string>& warnings) {
    if (!p.interaction.zero() && p.interaction.frobenius_sq >= 1.0)
        warnings.push_back("interaction kernel norm condition fails: sum of squared entries = " +
                           std::to_string(p.interaction.frobenius_sq) +
                           " >= 1; the interaction prox and the outer linearization may diverge");
}

// Final shared report assembly: diagnostics evaluated at the converged
// coupling. The converged gamma has Gibbs form with marginals (mu, nu), so
// it is itself the entropic-transport optimizer for its own marginals and
// the objective needs no extra transport solve.
inline void finish_report(SolveReport& rep, const ProblemSpec& p) {
    rep.nu = column_masses(rep.gamma);
    auto lr = log_row_sums(rep.gamma);
    rep.residuals.marginal_l1 = pairwise_sum_of(lr.size(), [&](size_t i) {
        return std::abs(std::exp(lr[i]) - p.mu.w[i]);
    });
    rep.transport_value = transport_value(rep.gamma, p.cost, p.epsilon);
    rep.energy = energy_value(p, rep.nu, 0.5);
    rep.objective = rep.transport_value + rep.energy;
    try {
        auto m = equilibrium_metrics(rep.gamma, p, rep.nu);
        rep.exploitability = m.exploitability;
        rep.residuals.gibbs = m.gibbs_residual;
        rep.concentration = m.concentration;
    } catch (const EvaluationError& e) {
        rep.warnings.push_back(std::string("equilibrium metrics unavailable: ") + e.what());
        rep.residuals.gibbs = std::numeric_limits<double>::quiet_NaN();
        rep.concentration = concentration_diagnostic(rep.gamma, p.mu.w);
    }
}

}  // namespace detail

// One Dykstra pass on the fixed Gibbs kernel with the interaction energy
// handled by its own coupled prox. The congestion enters through
// h(t) = f(t) - t, the remainder after the quadratic split, so the
// congestion must supply the strong convexity: kinds power and entropy only.
inline SolveReport solve_implicit(const ProblemSpec& p, const SchemeConfig& cfg = {}) {
    validate_problem(p);
    if (p.congestion.kind != CongestionKind::power && p.congestion.kind != CongestionKind::entropy)
        throw InvalidConfigError(
            "implicit scheme requires power or entropy congestion for the quadratic split");

    SolveReport rep;
    rep.scheme = "implicit";
    rep.epsilon = p.epsilon;
    rep.outer_tol = cfg.outer_tol;
    detail::check_interaction_contraction(p, rep.warnings);

    // The split subtracts t^2/2 from F; the leftover marginal cost h may dip
    // below zero near the origin for strongly curved F. Sample and report.
    {
        bool monotone = true;
        double prev = p.congestion.f(1.0 / 512.0) - 1.0 / 512.0;
        for (int k = 2; k <= 512 && monotone; ++k) {
            double t = static_cast<double>(k) / 512.0;
            double h = p.congestion.f(t) - t;
            monotone = h >= prev - 1e-12;
            prev = h;
        }
        if (!monotone)
            rep.warnings.push_back(
                "congestion split h(t) = f(t) - t is not nondecreasing on (0,1]; "
                "the implicit prox may select among multiple roots");
    }

    auto t0 = std::chrono::steady_clock::now();
    InteractionMatrix phi =
        p.interaction.zero() ? zero_interaction(p.Y->size()) : p.interaction;

    std::vector<ProxOp> ops;
    ops.push_back({"interaction_energy", false, [&](const BlockState& s) {
                       return BlockState{prox_interaction_energy(s[0], phi, p.epsilon, cfg.newton)};
                   }});
    CongestionView h = congestion_h_view(p.congestion);
    ops.push_back({"congestion_split", false, [&](const BlockState& s) {
                       return BlockState{prox_congestion(s[0], h, p.epsilon, cfg.newton)};
                   }});
    ops.push_back({"first_marginal", true, [&](const BlockState& s) {
                       return BlockState{prox_first_marginal(s[0], p.mu.w)};
                   }});

    Coupling kernel = gibbs_kernel(p.cost, p.potential, p.epsilon);
    DykstraConfig inner = cfg.dykstra;
    auto res = dykstra_solve({std::move(kernel)}, std::move(ops), inner, {p.mu.w});

    rep.gamma = std::move(res.gamma[0]);
    rep.outer_iterations = 1;
    rep.total_cycles = res.cycles;
    rep.prox_evaluations = res.prox_evaluations;
    rep.prox_ops_per_cycle = 3;
    rep.converged = res.converged;
    rep.residuals.nu_change = res.final_nu_change;
    rep.trace = std::move(res.trace);
    if (!res.converged)
        rep.warnings.push_back("dykstra stopped at max_cycles with nu change " +
                               std::to_string(res.final_nu_change));
    detail::finish_report(rep, p);
    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

// Outer linearization: freeze the interaction potential V = phi nu at the
// previous crowd, fold it into the kernel, and solve the congestion-only
// problem by Dykstra. Each outer step restarts Dykstra from the fresh
// kernel with cleared corrections; the previous iterate enters only
// through V. With phi = 0 the second outer step reproduces the first
// bit-for-bit and the loop stops at an exact zero change.
inline SolveReport solve_semi_implicit(const ProblemSpec& p, const SchemeConfig& cfg = {}) {
    validate_problem(p);

    SolveReport rep;
    rep.scheme = "semi_implicit";
    rep.epsilon = p.epsilon;
    rep.outer_tol = cfg.outer_tol;
    detail::check_interaction_contraction(p, rep.warnings);

    auto t0 = std::chrono::steady_clock::now();
    const int I = p.X->size(), J = p.Y->size();

    Mat base(I, J);
    for (int i = 0; i < I; ++i) {
        const double* c = p.cost.values.row(i);
        double* out = base.row(i);
        for (int j = 0; j < J; ++j) out[j] = -(c[j] + potential_at(p.potential, j)) / p.epsilon;
    }

    const bool has_interaction = !p.interaction.zero() && p.interaction.frobenius_sq > 0.0;
    const bool has_congestion = !p.congestion.none();
    CongestionView f = congestion_f_view(p.congestion);
    rep.prox_ops_per_cycle = has_congestion ? 2 : 1;

    std::vector<double> nu(J, 1.0 / J);
    double best_change = std::numeric_limits<double>::infinity();
    int stall = 0;

    for (int outer = 1; outer <= cfg.max_outer; ++outer) {
        Coupling kernel(I, J, 0.0);
        if (has_interaction) {
            auto V = apply_interaction(p.interaction, nu);
            for (int i = 0; i < I; ++i) {
                const double* b = base.row(i);
                double* out = kernel.log_values.row(i);
                for (int j = 0; j < J; ++j) out[j] = b[j] - V[j] / p.epsilon;
            }
        } else {
            kernel.log_values = base;
        }

        std::vector<ProxOp> ops;
        if (has_congestion)
            ops.push_back({"congestion", false, [&](const BlockState& s) {
                               return BlockState{
                                   prox_congestion(s[0], f, p.epsilon, cfg.newton)};
                           }});
        ops.push_back({"first_marginal", true, [&](const BlockState& s) {
                           return BlockState{prox_first_marginal(s[0], p.mu.w)};
                       }});

        auto res = dykstra_solve({std::move(kernel)}, std::move(ops), cfg.dykstra, {p.mu.w});

        detail::append_trace(rep.trace, res.trace, rep.total_cycles, rep.wall_seconds);
        rep.total_cycles += res.cycles;
        rep.prox_evaluations += res.prox_evaluations;
        rep.outer_iterations = outer;
        if (!res.converged)
            rep.warnings.push_back("outer step " + std::to_string(outer) +
                                   ": dykstra stopped at max_cycles with nu change " +
                                   std::to_string(res.final_nu_change));

        std::vector<double> nu_new = detail::column_masses(res.gamma[0]);
        double change = l1_diff(nu_new, nu);
        nu = std::move(nu_new);
        rep.gamma = std::move(res.gamma[0]);
        rep.residuals.nu_change = change;
        rep.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        if (change <= cfg.outer_tol) {
            rep.converged = true;
            break;
        }
        if (!has_interaction && outer >= 2) {
            // Without interaction every kernel from step 2 on is identical,
            // so a nonzero change can only come from the inner solve itself.
            rep.warnings.push_back("outer change " + std::to_string(change) +
                                   " above tolerance without interaction; inner tolerance too loose");
            break;
        }
        if (change >= best_change) {
            if (++stall >= cfg.stall_limit) {
                rep.warnings.push_back("outer iteration stalled: nu change has not improved for " +
                                       std::to_string(cfg.stall_limit) + " steps (last " +
                                       std::to_string(change) + ")");
                break;
            }
        } else {
            best_change = change;
            stall = 0;
        }
    }
    if (!rep.converged && rep.residuals.nu_change > cfg.outer_tol &&
        rep.outer_iterations == cfg.max_outer)
        rep.warnings.push_back("outer loop hit max_outer with nu change " +
                               std::to_string(rep.residuals.nu_change));

    detail::finish_report(rep, p);
    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

inline SolveReport solve(const ProblemSpec& p, const SchemeConfig& cfg = {}) {
    return cfg.scheme == Scheme::implicit ? solve_implicit(p, cfg) : solve_semi_implicit(p, cfg);
}

}  // namespace cournot
