#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "cournot/coupling.hpp"
#include "cournot/rootfind.hpp"

namespace cournot {

// KL projection onto {gamma : row sums = mu}: rescale each row. Rows with
// mu_i = 0 are emptied; a zero row in theta under positive mu_i makes the
// constraint unreachable inside the support.
inline Coupling prox_first_marginal(const Coupling& theta, const std::vector<double>& mu) {
    if (static_cast<int>(mu.size()) != theta.rows())
        throw InvalidConfigError("marginal prox: mu length does not match theta rows");
    Coupling out = theta;
    for (int i = 0; i < theta.rows(); ++i) {
        double* row = out.log_values.row(i);
        if (mu[i] == 0.0) {
            for (int j = 0; j < theta.cols(); ++j) row[j] = kNegInf;
            continue;
        }
        double ls = logsumexp(row, theta.cols());
        if (ls == kNegInf)
            throw PreconditionError("marginal prox infeasible: theta row " + std::to_string(i) +
                                    " is zero but mu_i > 0");
        double shift = std::log(mu[i]) - ls;
        for (int j = 0; j < theta.cols(); ++j) row[j] += shift;
    }
    return out;
}

// Same projection on the column marginal, used by the Sinkhorn comparison
// and the fixed-nu diagnostics.
inline Coupling prox_fixed_second_marginal(const Coupling& theta, const std::vector<double>& nu) {
    if (static_cast<int>(nu.size()) != theta.cols())
        throw InvalidConfigError("marginal prox: nu length does not match theta columns");
    Coupling out = theta;
    for (int j = 0; j < theta.cols(); ++j) {
        if (nu[j] == 0.0) {
            for (int i = 0; i < theta.rows(); ++i) out.log_values(i, j) = kNegInf;
            continue;
        }
        double ls = logsumexp_strided(theta.log_values.data() + j, theta.rows(), theta.cols());
        if (ls == kNegInf)
            throw PreconditionError("marginal prox infeasible: theta column " +
                                    std::to_string(j) + " is zero but nu_j > 0");
        double shift = std::log(nu[j]) - ls;
        for (int i = 0; i < theta.rows(); ++i) out.log_values(i, j) += shift;
    }
    return out;
}

// How a congestion term enters a prox: through x |-> g(e^x) on the log scale.
// Two standard views exist: the marginal cost f itself (semi-implicit inner
// step, shared congestion) and the shifted h(t) = f(t) - t left over after
// the quadratic split (implicit scheme).
struct CongestionView {
    std::function<double(double)> g_log;
    std::function<double(double)> dg_log;
    bool zero = false;           // g identically zero: the prox is the identity
    bool smallest_root = false;  // non-monotone marginal cost (log barrier)
};

inline CongestionView congestion_f_view(const CongestionSpec& g) {
    CongestionView v;
    v.zero = g.none();
    v.smallest_root = !g.monotone_marginal();
    v.g_log = [g](double x) { return g.f_log(x); };
    v.dg_log = [g](double x) { return g.df_log(x); };
    return v;
}

inline CongestionView congestion_h_view(const CongestionSpec& g) {
    CongestionView v;
    v.zero = g.none();
    v.smallest_root = false;
    v.g_log = [g](double x) { return g.f_log(x) - std::exp(x); };
    v.dg_log = [g](double x) { return g.df_log(x) - std::exp(x); };
    return v;
}

// KL prox of gamma |-> (1/eps) * sum_j G(col_sum_j) where G' = g. Columns
// decouple: with s_j the column mass of theta, the new column mass nu_j
// solves ln(nu) + g(nu)/eps = ln(s), and the column is rescaled onto it.
// Empty columns stay empty. With g == 0 the input is returned bit-for-bit.
inline Coupling prox_congestion(const Coupling& theta, const CongestionView& g, double eps,
                                const NewtonConfig& newton = {}) {
    if (g.zero) return theta;
    Coupling out = theta;
    std::vector<double> log_s = log_col_sums(theta);
    for (int j = 0; j < theta.cols(); ++j) {
        if (log_s[j] == kNegInf) continue;
        ScalarRootProblem p{log_s[j], eps, g.g_log, g.dg_log};
        RootResult r = g.smallest_root ? solve_smallest_root(p, newton)
                                       : solve_monotone_scalar(p, newton);
        double shift = r.log_nu - log_s[j];
        for (int i = 0; i < theta.rows(); ++i) out.log_values(i, j) += shift;
    }
    return out;
}

namespace detail {

// Dense LU with partial pivoting, solving A x = b in place. The interaction
// prox only ever needs modest sizes, so no blocking.
inline void lu_solve(Mat& A, std::vector<double>& b) {
    int n = A.rows();
    assert(A.cols() == n && static_cast<int>(b.size()) == n);
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(A(i, k)) > std::abs(A(piv, k))) piv = i;
        if (A(piv, k) == 0.0) throw NonconvergenceError("singular Newton system", b, 0.0);
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(A(piv, j), A(k, j));
            std::swap(b[piv], b[k]);
        }
        for (int i = k + 1; i < n; ++i) {
            double m = A(i, k) / A(k, k);
            A(i, k) = m;
            for (int j = k + 1; j < n; ++j) A(i, j) -= m * A(k, j);
            b[i] -= m * b[k];
        }
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < n; ++j) s -= A(i, j) * b[j];
        b[i] = s / A(i, i);
    }
}

}  // namespace detail

// KL prox of gamma |-> (1/eps) * [ (1/2)||nu||^2 + (1/2)<nu, phi nu> ] where
// nu is the column-sum vector. The optimality system couples the columns:
//   ln(nu_j) + (nu_j + (phi nu)_j)/eps = ln(s_j),
// solved by a damped Newton method on the active columns. Columns whose mass
// has underflowed (log sum below -700) are pinned at zero and only receive
// the interaction shift afterwards.
inline Coupling prox_interaction_energy(const Coupling& theta, const InteractionMatrix& phi,
                                        double eps, const NewtonConfig& newton = {}) {
    if (phi.values.rows() != theta.cols() || phi.values.cols() != theta.cols())
        throw InvalidConfigError("interaction matrix shape does not match theta columns");
    if (!(eps > 0.0)) throw InvalidConfigError("epsilon must be positive");

    std::vector<double> log_s = log_col_sums(theta);
    std::vector<int> active;
    for (int j = 0; j < theta.cols(); ++j)
        if (log_s[j] > -700.0) active.push_back(j);
    int na = static_cast<int>(active.size());

    std::vector<double> nu_full(theta.cols(), 0.0);
    if (na > 0) {
        std::vector<double> s(na);
        for (int a = 0; a < na; ++a) s[a] = std::exp(log_s[active[a]]);
        double s_total = pairwise_sum(s);
        std::vector<double> nu(na);
        for (int a = 0; a < na; ++a) nu[a] = s[a] / (1.0 + s_total);

        auto residual = [&](const std::vector<double>& v, std::vector<double>& r) {
            for (int a = 0; a < na; ++a) nu_full[active[a]] = v[a];
            auto pn = apply_interaction(phi, nu_full);
            double worst = 0.0;
            for (int a = 0; a < na; ++a) {
                r[a] = std::log(v[a]) + (v[a] + pn[active[a]]) / eps - log_s[active[a]];
                worst = std::max(worst, std::abs(r[a]));
            }
            return worst;
        };

        std::vector<double> r(na), r_trial(na), trial(na);
        double worst = residual(nu, r);
        int it = 0;
        for (; it < newton.max_iter && worst > newton.tol; ++it) {
            Mat J(na, na);
            for (int a = 0; a < na; ++a) {
                for (int b = 0; b < na; ++b)
                    J(a, b) = ((a == b ? 1.0 : 0.0) + phi.values(active[a], active[b])) / eps;
                J(a, a) += 1.0 / nu[a];
            }
            std::vector<double> delta(na);
            for (int a = 0; a < na; ++a) delta[a] = -r[a];
            detail::lu_solve(J, delta);

            double alpha = 1.0;
            bool accepted = false;
            for (int halve = 0; halve < 60; ++halve) {
                bool positive = true;
                for (int a = 0; a < na && positive; ++a) {
                    trial[a] = nu[a] + alpha * delta[a];
                    positive = trial[a] > 0.0;
                }
                if (positive) {
                    double w = residual(trial, r_trial);
                    if (w < worst) {
                        nu.swap(trial);
                        r.swap(r_trial);
                        worst = w;
                        accepted = true;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if (!accepted) break;
        }
        if (worst > newton.tol)
            throw NonconvergenceError("interaction prox Newton stalled at residual " +
                                          std::to_string(worst),
                                      nu, worst);
        for (int a = 0; a < na; ++a) nu_full[active[a]] = nu[a];
    }

    auto pn = apply_interaction(phi, nu_full);
    Coupling out = theta;
    for (int j = 0; j < theta.cols(); ++j) {
        if (log_s[j] == kNegInf) continue;
        double shift = nu_full[j] > 0.0 ? std::log(nu_full[j]) - log_s[j]
                                        : -(nu_full[j] + pn[j]) / eps;
        for (int i = 0; i < theta.rows(); ++i) out.log_values(i, j) += shift;
    }
    return out;
}

// Joint KL prox coupling two blocks through a congestion on the total column
// occupancy sigma_j = nu1_j + nu2_j:
//   minimize KL(g1|t1) + KL(g2|t2) + sum_j G(sigma_j) with G' = g,
// each epsilon weighting its own block. sigma solves
//   sigma = s1 * exp(-g(sigma)/eps1) + s2 * exp(-g(sigma)/eps2)
// per column; both blocks are then rescaled by their own exponent. Requires
// a nondecreasing g (no log barrier), which makes the log-scale residual
// strictly increasing.
inline std::pair<Coupling, Coupling> prox_shared_congestion(const Coupling& theta1,
                                                            const Coupling& theta2,
                                                            const CongestionView& g, double eps1,
                                                            double eps2,
                                                            const NewtonConfig& newton = {}) {
    if (theta1.cols() != theta2.cols())
        throw InvalidConfigError("shared congestion needs a common strategy space");
    if (g.smallest_root)
        throw InvalidConfigError("shared congestion requires a nondecreasing marginal cost");
    if (g.zero) return {theta1, theta2};

    std::pair<Coupling, Coupling> out{theta1, theta2};
    std::vector<double> ls1 = log_col_sums(theta1);
    std::vector<double> ls2 = log_col_sums(theta2);

    for (int j = 0; j < theta1.cols(); ++j) {
        if (ls1[j] == kNegInf && ls2[j] == kNegInf) continue;

        auto rho = [&](double x) {
            double gx = g.g_log(x);
            return x - logsumexp2(ls1[j] - gx / eps1, ls2[j] - gx / eps2);
        };
        auto drho = [&](double x) {
            double gx = g.g_log(x);
            double t1 = ls1[j] - gx / eps1, t2 = ls2[j] - gx / eps2;
            double m = logsumexp2(t1, t2);
            double w1 = t1 == kNegInf ? 0.0 : std::exp(t1 - m);
            double w2 = t2 == kNegInf ? 0.0 : std::exp(t2 - m);
            return 1.0 + g.dg_log(x) * (w1 / eps1 + w2 / eps2);
        };

        double x0 = logsumexp2(ls1[j], ls2[j]);
        double f0 = rho(x0);
        double x;
        if (std::abs(f0) <= newton.tol) {
            x = x0;
        } else {
            double lo = x0, hi = x0, flo = f0, fhi = f0, step = 1.0;
            for (int k = 0; k < 200 && flo > 0.0; ++k, step *= 2.0) {
                lo -= step;
                flo = rho(lo);
            }
            step = 1.0;
            for (int k = 0; k < 200 && fhi < 0.0; ++k, step *= 2.0) {
                hi += step;
                fhi = rho(hi);
            }
            if (flo > 0.0 || fhi < 0.0)
                throw RootNotBracketedError("shared congestion residual never changes sign");
            x = detail::newton_bracketed(rho, drho, lo, hi, flo, fhi, newton.tol,
                                         newton.max_iter)
                    .log_nu;
        }

        double gx = g.g_log(x);
        if (ls1[j] != kNegInf) {
            double shift = -gx / eps1;
            for (int i = 0; i < theta1.rows(); ++i) out.first.log_values(i, j) += shift;
        }
        if (ls2[j] != kNegInf) {
            double shift = -gx / eps2;
            for (int i = 0; i < theta2.rows(); ++i) out.second.log_values(i, j) += shift;
        }
    }
    return out;
}

}  // namespace cournot
