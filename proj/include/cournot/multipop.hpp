#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include "cournot/schemes.hpp"

namespace cournot {

struct PopulationReport {
    std::vector<double> nu;
    Coupling gamma;
    Residuals residuals;
    double transport_value = std::numeric_limits<double>::quiet_NaN();
    double energy = std::numeric_limits<double>::quiet_NaN();
    double exploitability = std::numeric_limits<double>::quiet_NaN();
    double concentration = std::numeric_limits<double>::quiet_NaN();
};

struct TwoPopulationReport {
    PopulationReport pop1, pop2;
    double objective = std::numeric_limits<double>::quiet_NaN();
    double shared_energy = 0.0;
    double overlap = 0.0;  // sum_j min(nu1_j, nu2_j)
    int outer_iterations = 0;
    long total_cycles = 0;
    long prox_evaluations = 0;
    int prox_ops_per_cycle = 0;
    bool converged = false;
    double outer_tol = 0.0;
    double wall_seconds = 0.0;
    std::vector<TraceRow> trace;
    std::vector<std::string> warnings;
};

// Two populations over one strategy space, coupled by a congestion on the
// total occupancy. Outer loop: freeze each population's interaction
// potential (the energies here carry no 1/2, so the frozen gradient is
// 2 phi_l nu_l), rebuild both kernels, then run block Dykstra with the
// populations' own congestions, the shared congestion, and both marginal
// constraints. Inner restarts are cold, exactly as in the single-population
// semi-implicit scheme.
inline TwoPopulationReport solve_two_populations(const TwoPopulationSpec& spec,
                                                 const SchemeConfig& cfg = {}) {
    validate_two_population(spec);
    const ProblemSpec& p1 = spec.pop1;
    const ProblemSpec& p2 = spec.pop2;

    TwoPopulationReport rep;
    rep.outer_tol = cfg.outer_tol;
    detail::check_interaction_contraction(p1, rep.warnings);
    detail::check_interaction_contraction(p2, rep.warnings);

    auto t0 = std::chrono::steady_clock::now();
    const int J = p1.Y->size();

    auto make_base = [J](const ProblemSpec& p) {
        Mat base(p.X->size(), J);
        for (int i = 0; i < p.X->size(); ++i) {
            const double* c = p.cost.values.row(i);
            double* out = base.row(i);
            for (int j = 0; j < J; ++j) out[j] = -(c[j] + potential_at(p.potential, j)) / p.epsilon;
        }
        return base;
    };
    Mat base1 = make_base(p1), base2 = make_base(p2);

    auto has_phi = [](const ProblemSpec& p) {
        return !p.interaction.zero() && p.interaction.frobenius_sq > 0.0;
    };
    const bool any_phi = has_phi(p1) || has_phi(p2);
    const bool own_congestion = !p1.congestion.none() || !p2.congestion.none();
    const bool shared = !spec.shared_congestion.none();

    CongestionView f1 = congestion_f_view(p1.congestion);
    CongestionView f2 = congestion_f_view(p2.congestion);
    CongestionView fs = congestion_f_view(spec.shared_congestion);

    std::vector<double> nu1(J, 1.0 / J), nu2(J, 1.0 / J);
    double best_change = std::numeric_limits<double>::infinity();
    int stall = 0;

    for (int outer = 1; outer <= cfg.max_outer; ++outer) {
        auto build_kernel = [&](const Mat& base, const ProblemSpec& p,
                                const std::vector<double>& nu) {
            Coupling k(base.rows(), base.cols(), 0.0);
            if (has_phi(p)) {
                auto V = apply_interaction(p.interaction, nu);
                for (int i = 0; i < base.rows(); ++i) {
                    const double* b = base.row(i);
                    double* out = k.log_values.row(i);
                    for (int j = 0; j < J; ++j) out[j] = b[j] - 2.0 * V[j] / p.epsilon;
                }
            } else {
                k.log_values = base;
            }
            return k;
        };

        BlockState state;
        state.push_back(build_kernel(base1, p1, nu1));
        state.push_back(build_kernel(base2, p2, nu2));

        std::vector<ProxOp> ops;
        if (own_congestion)
            ops.push_back({"population_congestion", false, [&](const BlockState& s) {
                               BlockState out = s;
                               if (!p1.congestion.none())
                                   out[0] = prox_congestion(s[0], f1, p1.epsilon, cfg.newton);
                               if (!p2.congestion.none())
                                   out[1] = prox_congestion(s[1], f2, p2.epsilon, cfg.newton);
                               return out;
                           }});
        if (shared)
            ops.push_back({"shared_congestion", false, [&](const BlockState& s) {
                               auto pr = prox_shared_congestion(s[0], s[1], fs, p1.epsilon,
                                                                p2.epsilon, cfg.newton);
                               return BlockState{std::move(pr.first), std::move(pr.second)};
                           }});
        ops.push_back({"first_marginal_pop1", true, [&](const BlockState& s) {
                           BlockState out = s;
                           out[0] = prox_first_marginal(s[0], p1.mu.w);
                           return out;
                       }});
        ops.push_back({"first_marginal_pop2", true, [&](const BlockState& s) {
                           BlockState out = s;
                           out[1] = prox_first_marginal(s[1], p2.mu.w);
                           return out;
                       }});
        rep.prox_ops_per_cycle = static_cast<int>(ops.size());

        auto res = dykstra_solve(std::move(state), std::move(ops), cfg.dykstra,
                                 {p1.mu.w, p2.mu.w});

        detail::append_trace(rep.trace, res.trace, rep.total_cycles, rep.wall_seconds);
        rep.total_cycles += res.cycles;
        rep.prox_evaluations += res.prox_evaluations;
        rep.outer_iterations = outer;
        if (!res.converged)
            rep.warnings.push_back("outer step " + std::to_string(outer) +
                                   ": dykstra stopped at max_cycles with nu change " +
                                   std::to_string(res.final_nu_change));

        std::vector<double> n1 = detail::column_masses(res.gamma[0]);
        std::vector<double> n2 = detail::column_masses(res.gamma[1]);
        double change = l1_diff(n1, nu1) + l1_diff(n2, nu2);
        nu1 = std::move(n1);
        nu2 = std::move(n2);
        rep.pop1.gamma = std::move(res.gamma[0]);
        rep.pop2.gamma = std::move(res.gamma[1]);
        rep.pop1.residuals.nu_change = change;
        rep.pop2.residuals.nu_change = change;
        rep.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        if (change <= cfg.outer_tol) {
            rep.converged = true;
            break;
        }
        if (!any_phi && outer >= 2) {
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

    rep.pop1.nu = nu1;
    rep.pop2.nu = nu2;

    std::vector<double> sigma(J);
    for (int j = 0; j < J; ++j) sigma[j] = nu1[j] + nu2[j];
    std::vector<double> shared_cost(J, 0.0);
    bool shared_cost_ok = true;
    if (shared) {
        bool singular_at_zero = spec.shared_congestion.kind == CongestionKind::entropy;
        for (int j = 0; j < J; ++j) {
            if (sigma[j] <= 0.0 && singular_at_zero) {
                shared_cost_ok = false;
                rep.warnings.push_back("shared marginal cost singular at empty strategy " +
                                       std::to_string(j) + "; per-population metrics skipped");
                break;
            }
            shared_cost[j] = sigma[j] > 0.0 ? spec.shared_congestion.f(sigma[j]) : 0.0;
        }
        rep.shared_energy = pairwise_sum_of(static_cast<size_t>(J), [&](size_t j) {
            return sigma[j] > 0.0 ? spec.shared_congestion.F(sigma[j]) : 0.0;
        });
    }

    auto finish_pop = [&](PopulationReport& pr, const ProblemSpec& p) {
        auto lr = log_row_sums(pr.gamma);
        pr.residuals.marginal_l1 = pairwise_sum_of(lr.size(), [&](size_t i) {
            return std::abs(std::exp(lr[i]) - p.mu.w[i]);
        });
        pr.transport_value = transport_value(pr.gamma, p.cost, p.epsilon);
        pr.energy = energy_value(p, pr.nu, 1.0);
        if (!shared_cost_ok) return;
        try {
            auto m = equilibrium_metrics(pr.gamma, p, pr.nu, 2.0, shared ? &shared_cost : nullptr);
            pr.exploitability = m.exploitability;
            pr.residuals.gibbs = m.gibbs_residual;
            pr.concentration = m.concentration;
        } catch (const EvaluationError& e) {
            rep.warnings.push_back(std::string("equilibrium metrics unavailable: ") + e.what());
            pr.concentration = concentration_diagnostic(pr.gamma, p.mu.w);
        }
    };
    finish_pop(rep.pop1, p1);
    finish_pop(rep.pop2, p2);

    rep.objective = rep.pop1.transport_value + rep.pop2.transport_value + rep.pop1.energy +
                    rep.pop2.energy + rep.shared_energy;
    rep.overlap = pairwise_sum_of(static_cast<size_t>(J),
                                  [&](size_t j) { return std::min(nu1[j], nu2[j]); });
    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

}  // namespace cournot
