#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "cournot/coupling.hpp"
#include "cournot/model.hpp"
#include "cournot/prox.hpp"

namespace cournot {

// The strategy-indexed part of the equilibrium cost faced by one agent:
//   f(nu_j) + phi_factor * (phi nu)_j + v_j + extra_j.
// phi_factor is 1 for the single-population energy (which carries 1/2 on the
// interaction quadratic) and 2 for the two-population energies (which do
// not). extra carries a shared-congestion term when present. Singular
// marginal costs at empty strategies (entropy, log barrier) are refused.
inline std::vector<double> strategy_cost_vector(const ProblemSpec& p,
                                                const std::vector<double>& nu,
                                                double phi_factor = 1.0,
                                                const std::vector<double>* extra = nullptr) {
    if (static_cast<int>(nu.size()) != p.Y->size())
        throw InvalidConfigError("nu length does not match the strategy space");
    std::vector<double> out(nu.size(), 0.0);
    if (!p.congestion.none()) {
        bool singular_at_zero = p.congestion.kind == CongestionKind::entropy ||
                                p.congestion.kind == CongestionKind::log_barrier;
        for (size_t j = 0; j < nu.size(); ++j) {
            if (nu[j] <= 0.0 && singular_at_zero)
                throw EvaluationError("marginal congestion cost is singular at empty strategy " +
                                      std::to_string(j));
            out[j] = nu[j] > 0.0 ? p.congestion.f(nu[j]) : 0.0;
        }
    }
    if (!p.interaction.zero() && p.interaction.frobenius_sq > 0.0) {
        auto pn = apply_interaction(p.interaction, nu);
        for (size_t j = 0; j < nu.size(); ++j) out[j] += phi_factor * pn[j];
    }
    if (!p.potential.values.empty())
        for (size_t j = 0; j < nu.size(); ++j) out[j] += p.potential.values[j];
    if (extra) {
        if (extra->size() != nu.size())
            throw InvalidConfigError("extra cost vector has the wrong length");
        for (size_t j = 0; j < nu.size(); ++j) out[j] += (*extra)[j];
    }
    return out;
}

struct TotalCostMatrix {
    Mat values;  // |X| x |Y|
};

// Psi_ij = c_ij + f(nu_j) + (phi nu)_j + v_j, the full cost an agent of type
// i pays for strategy j once the crowd sits at nu.
inline TotalCostMatrix total_cost(const ProblemSpec& p, const std::vector<double>& nu) {
    auto jt = strategy_cost_vector(p, nu);
    Mat m(p.cost.values.rows(), p.cost.values.cols());
    for (int i = 0; i < m.rows(); ++i) {
        const double* c = p.cost.values.row(i);
        double* out = m.row(i);
        for (int j = 0; j < m.cols(); ++j) out[j] = c[j] + jt[j];
    }
    return TotalCostMatrix{std::move(m)};
}

// Total excess cost over the best response, summed over types:
//   sum_i [ sum_j gamma_ij Psi_ij - mu_i min_j Psi_ij ].
// Zero exactly at a Cournot-Nash equilibrium; rows with mu_i = 0 are
// skipped. gamma must actually have first marginal mu.
inline double exploitability(const Coupling& gamma, const TotalCostMatrix& psi,
                             const std::vector<double>& mu) {
    if (!gamma.log_values.same_shape(psi.values) ||
        static_cast<int>(mu.size()) != gamma.rows())
        throw InvalidConfigError("exploitability arguments have mismatched shapes");
    auto lr = log_row_sums(gamma);
    double feas = pairwise_sum_of(mu.size(), [&](size_t i) {
        return std::abs(std::exp(lr[i]) - mu[i]);
    });
    if (!(feas <= 1e-8))
        throw PreconditionError("exploitability needs first marginal mu (off by l1 " +
                                std::to_string(feas) + ")");
    return pairwise_sum_of(mu.size(), [&](size_t i) {
        if (mu[i] == 0.0) return 0.0;
        const double* lg = gamma.log_values.row(static_cast<int>(i));
        const double* ps = psi.values.row(static_cast<int>(i));
        int cols = gamma.cols();
        double dot = pairwise_sum_of(cols, [&](size_t j) {
            return lg[j] == kNegInf ? 0.0 : std::exp(lg[j]) * ps[j];
        });
        double best = ps[0];
        for (int j = 1; j < cols; ++j) best = std::min(best, ps[j]);
        return std::max(0.0, dot - mu[i] * best);
    });
}

// All three row-wise equilibrium metrics in one pass, without materializing
// Psi. gibbs is the worst-row l1 distance between the conditional strategy
// distribution gamma_i./mu_i and the Gibbs best response
// softmax(-Psi_i./eps); a converged fixed point keeps it within a small
// multiple of the outer tolerance.
struct EquilibriumMetrics {
    double exploitability = 0.0;
    double gibbs_residual = 0.0;
    double concentration = 0.0;
};

inline EquilibriumMetrics equilibrium_metrics(const Coupling& gamma, const ProblemSpec& p,
                                              const std::vector<double>& nu, double phi_factor = 1.0,
                                              const std::vector<double>* extra = nullptr) {
    auto jt = strategy_cost_vector(p, nu, phi_factor, extra);
    const auto& mu = p.mu.w;
    int cols = gamma.cols();
    std::vector<double> psi(cols), logq(cols);
    EquilibriumMetrics m;
    for (int i = 0; i < gamma.rows(); ++i) {
        if (mu[i] == 0.0) continue;
        const double* c = p.cost.values.row(i);
        const double* lg = gamma.log_values.row(i);
        double log_mu = std::log(mu[i]);
        for (int j = 0; j < cols; ++j) {
            psi[j] = c[j] + jt[j];
            logq[j] = -psi[j] / p.epsilon;
        }
        double lse = logsumexp(logq);
        double dot = pairwise_sum_of(cols, [&](size_t j) {
            return lg[j] == kNegInf ? 0.0 : std::exp(lg[j]) * psi[j];
        });
        double best = psi[0];
        for (int j = 1; j < cols; ++j) best = std::min(best, psi[j]);
        m.exploitability += std::max(0.0, dot - mu[i] * best);
        double row_l1 = pairwise_sum_of(cols, [&](size_t j) {
            double pj = lg[j] == kNegInf ? 0.0 : std::exp(lg[j] - log_mu);
            return std::abs(pj - std::exp(logq[j] - lse));
        });
        m.gibbs_residual = std::max(m.gibbs_residual, row_l1);
        double h = pairwise_sum_of(cols, [&](size_t j) {
            if (lg[j] == kNegInf) return 0.0;
            double l = lg[j] - log_mu;
            return -std::exp(l) * l;
        });
        m.concentration += mu[i] * h;
    }
    return m;
}

inline double gibbs_residual(const Coupling& gamma, const ProblemSpec& p,
                             const std::vector<double>& nu, double phi_factor = 1.0,
                             const std::vector<double>* extra = nullptr) {
    return equilibrium_metrics(gamma, p, nu, phi_factor, extra).gibbs_residual;
}

inline double gibbs_residual(const Coupling& gamma, const ProblemSpec& p) {
    std::vector<double> nu;
    nu.reserve(gamma.cols());
    for (double lv : log_col_sums(gamma)) nu.push_back(std::exp(lv));
    return gibbs_residual(gamma, p, nu);
}

// Mean conditional entropy sum_i mu_i H(gamma_i. / mu_i). Deterministic
// (one strategy per type) gives 0; mu (x) uniform gives ln |J|. Grows with
// epsilon.
inline double concentration_diagnostic(const Coupling& gamma, const std::vector<double>& mu) {
    if (static_cast<int>(mu.size()) != gamma.rows())
        throw InvalidConfigError("concentration arguments have mismatched shapes");
    return pairwise_sum_of(mu.size(), [&](size_t i) {
        if (mu[i] == 0.0) return 0.0;
        const double* lg = gamma.log_values.row(static_cast<int>(i));
        double log_mu = std::log(mu[i]);
        double h = pairwise_sum_of(gamma.cols(), [&](size_t j) {
            if (lg[j] == kNegInf) return 0.0;
            double l = lg[j] - log_mu;
            return -std::exp(l) * l;
        });
        return mu[i] * h;
    });
}

// c . gamma + eps * sum gamma (ln gamma - 1), evaluated from logs so that
// entries of mass exp(-1e5) contribute zero instead of NaN.
inline double transport_value(const Coupling& gamma, const CostMatrix& cost, double eps) {
    if (!gamma.log_values.same_shape(cost.values))
        throw InvalidConfigError("transport value arguments have mismatched shapes");
    const double* lg = gamma.log_values.data();
    const double* c = cost.values.data();
    return pairwise_sum_of(gamma.log_values.size(), [&](size_t k) {
        if (lg[k] == kNegInf) return 0.0;
        return std::exp(lg[k]) * (c[k] + eps * (lg[k] - 1.0));
    });
}

struct SinkhornResult {
    Coupling gamma;
    double value = 0.0;  // c . gamma + eps * sum gamma (ln gamma - 1)
    std::vector<double> log_u, log_w;
    int iterations = 0;
    double marginal_residual_l1 = 0.0;
};

// Independent entropic-transport solver between fixed marginals, used by the
// diagnostics and as a cross-check for the Dykstra path. Pure log-domain
// alternating scaling; zero-mass rows and columns simply carry -inf scalings.
inline SinkhornResult sinkhorn(const CostMatrix& cost, const std::vector<double>& mu,
                               const std::vector<double>& nu, double eps, double tol = 1e-9,
                               int max_iter = 50000) {
    int rows = cost.values.rows(), cols = cost.values.cols();
    if (static_cast<int>(mu.size()) != rows || static_cast<int>(nu.size()) != cols)
        throw InvalidConfigError("sinkhorn marginal lengths do not match the cost matrix");
    if (!(eps > 0.0)) throw InvalidConfigError("epsilon must be positive");
    double mass_gap = std::abs(pairwise_sum(mu) - pairwise_sum(nu));
    if (mass_gap > 1e-9)
        throw PreconditionError("sinkhorn marginals carry different total mass (gap " +
                                std::to_string(mass_gap) + ")");

    Mat logk(rows, cols);
    for (size_t k = 0; k < logk.size(); ++k) logk.data()[k] = -cost.values.data()[k] / eps;
    std::vector<double> log_mu(rows), log_nu(cols);
    for (int i = 0; i < rows; ++i) log_mu[i] = mu[i] > 0.0 ? std::log(mu[i]) : kNegInf;
    for (int j = 0; j < cols; ++j) log_nu[j] = nu[j] > 0.0 ? std::log(nu[j]) : kNegInf;

    std::vector<double> lu(rows, 0.0), lw(cols, 0.0), buf(std::max(rows, cols));
    SinkhornResult res;
    double resid = 0.0;
    for (int it = 1; it <= max_iter; ++it) {
        for (int i = 0; i < rows; ++i) {
            const double* row = logk.row(i);
            for (int j = 0; j < cols; ++j) buf[j] = row[j] + lw[j];
            lu[i] = log_mu[i] - logsumexp(buf.data(), cols);
        }
        for (int j = 0; j < cols; ++j) {
            for (int i = 0; i < rows; ++i) buf[i] = logk(i, j) + lu[i];
            lw[j] = log_nu[j] - logsumexp(buf.data(), rows);
        }
        // Full l1 residual of both marginals at the current scaling pair.
        resid = 0.0;
        for (int j = 0; j < cols; ++j) {
            for (int i = 0; i < rows; ++i) buf[i] = logk(i, j) + lu[i] + lw[j];
            resid += std::abs(std::exp(logsumexp(buf.data(), rows)) - nu[j]);
        }
        std::vector<double> rbuf(cols);
        double row_resid = 0.0;
        for (int i = 0; i < rows; ++i) {
            const double* row = logk.row(i);
            for (int j = 0; j < cols; ++j) rbuf[j] = row[j] + lu[i] + lw[j];
            row_resid += std::abs(std::exp(logsumexp(rbuf.data(), cols)) - mu[i]);
        }
        resid += row_resid;
        res.iterations = it;
        if (resid <= tol) break;
        if (it == max_iter)
            throw NonconvergenceError("sinkhorn hit the iteration cap at residual " +
                                          std::to_string(resid),
                                      lw, resid);
    }

    Coupling g(rows, cols, 0.0);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) g.log_values(i, j) = logk(i, j) + lu[i] + lw[j];
    res.value = transport_value(g, cost, eps);
    res.gamma = std::move(g);
    res.log_u = std::move(lu);
    res.log_w = std::move(lw);
    res.marginal_residual_l1 = resid;
    return res;
}

// Regularized objective at a candidate crowd distribution: the entropic
// transport value between mu and nu plus the congestion, interaction and
// potential energies.
inline double objective_value(const ProblemSpec& p, const std::vector<double>& nu,
                              double tol = 1e-10, int max_iter = 50000) {
    auto sk = sinkhorn(p.cost, p.mu.w, nu, p.epsilon, tol, max_iter);
    return sk.value + energy_value(p, nu, 0.5);
}

struct BruteForceResult {
    ProbabilityVector nu;
    double value = 0.0;
};

// Exhaustive search over a simplex grid, then three nested 10x zoom passes
// around the running winner (each pass spans twice the previous lattice
// spacing, so the true minimizer cannot escape the window). The coarse pass
// keeps the search global; the zooms push the lattice quantization to
// ~1/(1000 * resolution), far below the cross-check tolerances. Only meant
// for |Y| <= 3; everything larger is out of scope by construction. Ties
// break toward the lexicographically smaller point, so the result is
// deterministic.
inline BruteForceResult brute_force_minimize(const ProblemSpec& p, int resolution = 400) {
    int J = p.Y->size();
    if (J > 3)
        throw OracleScopeError("brute force search handles at most 3 strategies, got " +
                               std::to_string(J));
    if (resolution < 100) throw InvalidConfigError("brute force resolution must be >= 100");
    validate_problem(p);

    std::vector<double> best_nu;
    double best_value = std::numeric_limits<double>::infinity();
    auto consider = [&](const std::vector<double>& nu) {
        double v = objective_value(p, nu);
        if (v < best_value ||
            (v == best_value && std::lexicographical_compare(nu.begin(), nu.end(),
                                                             best_nu.begin(), best_nu.end()))) {
            best_value = v;
            best_nu = nu;
        }
    };

    if (J == 1) {
        consider({1.0});
    } else if (J == 2) {
        for (int k = 0; k <= resolution; ++k) {
            double t = static_cast<double>(k) / resolution;
            consider({t, 1.0 - t});
        }
        double fine = 1.0 / resolution;
        for (int zoom = 0; zoom < 3; ++zoom) {
            fine *= 0.1;
            double center = best_nu[0];
            for (int m = -20; m <= 20; ++m) {
                double t = center + m * fine;
                if (t < 0.0 || t > 1.0) continue;
                consider({t, 1.0 - t});
            }
        }
    } else {
        for (int k0 = 0; k0 <= resolution; ++k0)
            for (int k1 = 0; k1 <= resolution - k0; ++k1) {
                double a = static_cast<double>(k0) / resolution;
                double b = static_cast<double>(k1) / resolution;
                consider({a, b, 1.0 - a - b});
            }
        double fine = 1.0 / resolution;
        for (int zoom = 0; zoom < 3; ++zoom) {
            fine *= 0.1;
            double c0 = best_nu[0], c1 = best_nu[1];
            for (int m0 = -20; m0 <= 20; ++m0)
                for (int m1 = -20; m1 <= 20; ++m1) {
                    double a = c0 + m0 * fine;
                    double b = c1 + m1 * fine;
                    if (a < 0.0 || b < 0.0 || a + b > 1.0) continue;
                    consider({a, b, 1.0 - a - b});
                }
        }
    }
    return BruteForceResult{ProbabilityVector{p.Y, std::move(best_nu)}, best_value};
}

}  // namespace cournot
