#pragma once

#include <algorithm>
#include <chrono>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "cournot/coupling.hpp"

namespace cournot {

// One coupling per population. Single-population problems use one block;
// the two-population solver runs the same loop over two.
using BlockState = std::vector<Coupling>;

struct ProxOp {
    std::string name;
    // Exact constraints (fixed marginals) are stably moved to the end of
    // every cycle so the returned iterate satisfies them to roundoff.
    bool exact_constraint = false;
    std::function<BlockState(const BlockState&)> apply;
};

struct DykstraConfig {
    double tol_nu = 1e-7;        // l1 change of the column marginals per cycle
    double tol_marginal = 1e-8;  // l1 distance of row marginals to their targets
    // Sup change of the log column marginals per cycle. The mass-space check
    // above cannot see a near-empty column whose log is still traveling, yet
    // with a congestion that is singular at zero such a column decides the
    // best response of the tail types. Columns at exactly -inf are ignored.
    double tol_log_nu = 1e-9;
    int max_cycles = 20000;
    int trace_every = 1;  // <= 0 records only the final cycle
};

struct TraceRow {
    int cycle = 0;
    double nu_change_l1 = 0.0;
    double marginal_residual_l1 = 0.0;
    double seconds = 0.0;  // cumulative wall time, excluded from determinism claims
};

// Handed to the observer after every individual prox application. Pointers
// are valid only during the call.
struct DykstraStep {
    int cycle = 0;
    int step = 0;  // global prox-application counter, 1-based
    int slot = 0;  // index into the reordered op list
    const BlockState* state_before = nullptr;
    const BlockState* state_after = nullptr;
    const std::vector<Mat>* correction_before = nullptr;  // per block, log scale
    const std::vector<Mat>* correction_after = nullptr;
};

using DykstraObserver = std::function<void(const DykstraStep&)>;

struct DykstraResult {
    BlockState gamma;
    int cycles = 0;
    bool converged = false;
    double final_nu_change = 0.0;
    double final_marginal_residual = 0.0;
    long prox_evaluations = 0;
    std::vector<TraceRow> trace;
};

// Generalized Dykstra iteration with one correction per prox slot:
//   input = gamma ⊙ z[slot];  gamma' = prox(input);  z[slot] = input ⊘ gamma',
// everything in the log domain. This keeps the bookkeeping identity
// log gamma' + log z' = log gamma + log z entrywise (entries pinned at zero
// carry no correction). Cycles stop once the per-cycle l1 change of the
// column marginals, their sup change in log scale, and the row-marginal
// residual all fall below tolerance.
//
// first_marginals supplies the row-sum target per block for the residual
// column of the trace; pass {} to skip that check.
inline DykstraResult dykstra_solve(BlockState initial, std::vector<ProxOp> ops,
                                   const DykstraConfig& cfg,
                                   const std::vector<std::vector<double>>& first_marginals = {},
                                   const DykstraObserver& observer = {}) {
    if (ops.empty()) throw InvalidConfigError("dykstra needs at least one prox operator");
    if (initial.empty()) throw InvalidConfigError("dykstra needs at least one coupling block");
    if (!first_marginals.empty() && first_marginals.size() != initial.size())
        throw InvalidConfigError("one first-marginal target per block expected");

    std::stable_partition(ops.begin(), ops.end(),
                          [](const ProxOp& op) { return !op.exact_constraint; });

    const int blocks = static_cast<int>(initial.size());
    const int slots = static_cast<int>(ops.size());

    CorrectionStack z;
    z.reset(slots, initial);

    DykstraResult res;
    res.gamma = std::move(initial);

    std::vector<std::vector<double>> log_nu_prev(blocks);
    std::vector<std::vector<double>> nu_prev(blocks);
    for (int b = 0; b < blocks; ++b) {
        log_nu_prev[b] = log_col_sums(res.gamma[b]);
        nu_prev[b].reserve(res.gamma[b].cols());
        for (double lv : log_nu_prev[b]) nu_prev[b].push_back(std::exp(lv));
    }

    auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&t0] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    int step_counter = 0;
    for (int cycle = 1; cycle <= cfg.max_cycles; ++cycle) {
        for (int slot = 0; slot < slots; ++slot) {
            BlockState input = res.gamma;
            for (int b = 0; b < blocks; ++b)
                log_multiply_into(input[b], z.corrections[slot][b]);

            BlockState output;
            try {
                output = ops[slot].apply(input);
            } catch (const NonconvergenceError& e) {
                throw NonconvergenceError("dykstra cycle " + std::to_string(cycle) + ", op '" +
                                              ops[slot].name + "': " + e.what(),
                                          e.last_iterate, e.residual);
            } catch (const Error& e) {
                throw Error("dykstra cycle " + std::to_string(cycle) + ", op '" +
                            ops[slot].name + "': " + e.what());
            }
            if (output.size() != input.size())
                throw Error("prox op '" + ops[slot].name + "' changed the block count");

            std::vector<Mat> z_new(blocks);
            for (int b = 0; b < blocks; ++b) {
                const Mat& in = input[b].log_values;
                const Mat& out = output[b].log_values;
                Mat zb(in.rows(), in.cols());
                for (size_t k = 0; k < in.size(); ++k) {
                    double o = out.data()[k];
                    zb.data()[k] = o == kNegInf ? 0.0 : in.data()[k] - o;
                }
                z_new[b] = std::move(zb);
            }

            ++step_counter;
            if (observer) {
                DykstraStep info;
                info.cycle = cycle;
                info.step = step_counter;
                info.slot = slot;
                info.state_before = &res.gamma;
                info.state_after = &output;
                info.correction_before = &z.corrections[slot];
                info.correction_after = &z_new;
                observer(info);
            }

            z.corrections[slot] = std::move(z_new);
            res.gamma = std::move(output);
            ++res.prox_evaluations;
        }

        double nu_change = 0.0;
        double log_drift = 0.0;
        for (int b = 0; b < blocks; ++b) {
            std::vector<double> log_nu = log_col_sums(res.gamma[b]);
            std::vector<double> nu;
            nu.reserve(log_nu.size());
            for (size_t j = 0; j < log_nu.size(); ++j) {
                nu.push_back(std::exp(log_nu[j]));
                double a = log_nu[j], p = log_nu_prev[b][j];
                if (a == kNegInf && p == kNegInf) continue;
                log_drift = std::max(log_drift, a == kNegInf || p == kNegInf
                                                    ? std::numeric_limits<double>::infinity()
                                                    : std::abs(a - p));
            }
            nu_change += l1_diff(nu, nu_prev[b]);
            nu_prev[b] = std::move(nu);
            log_nu_prev[b] = std::move(log_nu);
        }

        double marg = 0.0;
        if (!first_marginals.empty()) {
            for (int b = 0; b < blocks; ++b) {
                const auto& target = first_marginals[b];
                auto lr = log_row_sums(res.gamma[b]);
                marg += pairwise_sum_of(lr.size(), [&](size_t i) {
                    return std::abs(std::exp(lr[i]) - target[i]);
                });
            }
        }

        res.cycles = cycle;
        res.final_nu_change = nu_change;
        res.final_marginal_residual = marg;
        bool done =
            nu_change <= cfg.tol_nu && marg <= cfg.tol_marginal && log_drift <= cfg.tol_log_nu;
        bool record = done || cycle == cfg.max_cycles ||
                      (cfg.trace_every > 0 && cycle % cfg.trace_every == 0);
        if (record) res.trace.push_back({cycle, nu_change, marg, elapsed()});
        if (done) {
            res.converged = true;
            break;
        }
    }
    return res;
}

}  // namespace cournot
