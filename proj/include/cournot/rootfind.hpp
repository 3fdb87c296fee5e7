#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "cournot/errors.hpp"

namespace cournot {

struct NewtonConfig {
    double tol = 1e-11;  // residual sup-norm
    int max_iter = 200;  // bisection from a wide bracket needs headroom
};

// The column equation behind every congestion-type prox: find nu > 0 with
//   ln(nu) + g(nu) / epsilon = ln(s),
// posed on x = ln(nu) so that s may be as small as exp(-1e5). g enters
// through g_log(x) = g(e^x) and its x-derivative, which the congestion kinds
// provide in closed, overflow-free form.
struct ScalarRootProblem {
    double log_s = 0.0;
    double epsilon = 1.0;
    std::function<double(double)> g_log;
    std::function<double(double)> dg_log;
};

struct RootResult {
    double log_nu = 0.0;
    double nu = 0.0;
    double residual = 0.0;
    int iterations = 0;
};

namespace detail {

// Safeguarded Newton on a scalar residual known to change sign on [lo, hi]
// (rho(lo) <= 0 <= rho(hi)). Newton steps that leave the bracket fall back
// to bisection; the bracket shrinks monotonically, so this always lands.
template <class F, class DF>
RootResult newton_bracketed(F rho, DF drho, double lo, double hi, double flo, double fhi,
                            double tol, int max_iter) {
    if (flo > 0.0 || fhi < 0.0)
        throw RootNotBracketedError("bracket does not straddle the root");
    // At the root the terms of rho balance, so their magnitude is bounded by
    // the bracket scale, and with it the floating noise floor of any rho
    // evaluation there. Below that floor further iterations only chase
    // rounding (columns whose log mass is astronomical, e.g. under a cost
    // power of 64, hit this). Well-scaled problems keep tol unchanged. The
    // residuals at the bracket ends must stay out of the floor: on a stiff
    // exponential wall they overshoot the noise at the root by many orders.
    tol = std::max(tol, 64.0 * std::numeric_limits<double>::epsilon() *
                            std::max({1.0, std::abs(lo), std::abs(hi)}));
    double x = (flo == 0.0) ? lo : (fhi == 0.0 ? hi : 0.5 * (lo + hi));
    double fx = (flo == 0.0) ? 0.0 : (fhi == 0.0 ? 0.0 : rho(x));
    RootResult r;
    bool pinned = false;
    double dx_old = hi - lo, dx = dx_old;
    for (int it = 0; it < max_iter; ++it) {
        r.iterations = it;
        if (std::abs(fx) <= tol) break;
        if (fx > 0.0) {
            hi = x;
        } else {
            lo = x;
        }
        // A steep rho turns one ulp of x into slope-many units of residual,
        // so the residual target can be unreachable; once the bracket stops
        // shrinking the root is localized as tightly as doubles allow.
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() *
                           std::max({1.0, std::abs(lo), std::abs(hi)})) {
            pinned = true;
            break;
        }
        // Take the Newton step only while the residual stays on track to
        // halve, otherwise bisect. Plain Newton descends the exponential
        // wall of a power congestion at a fixed stride of 1/(power-1) per
        // iteration and would turn 30 log units into hundreds of steps.
        double d = drho(x);
        double step = d > 0.0 ? fx / d : 0.0;
        double xn = x - step;
        bool newton_ok = step != 0.0 && xn > lo && xn < hi &&
                         std::abs(2.0 * fx) <= std::abs(dx_old * d);
        dx_old = dx;
        if (newton_ok) {
            dx = std::abs(step);
        } else {
            dx = 0.5 * (hi - lo);
            xn = 0.5 * (lo + hi);
        }
        if (xn == x) xn = 0.5 * (lo + hi);
        x = xn;
        fx = rho(x);
    }
    if (!pinned && std::abs(fx) > tol) {
        // The bracket still pins the root; report the midpoint honestly.
        throw NonconvergenceError("scalar Newton exceeded " + std::to_string(max_iter) +
                                      " iterations",
                                  {x}, std::abs(fx));
    }
    r.log_nu = x;
    r.nu = std::exp(x);
    r.residual = fx;
    return r;
}

}  // namespace detail

// Monotone case: rho(x) = x + g_log(x)/eps - log_s has rho' >= 1 whenever g
// is nondecreasing, so a sign change always exists and the root is unique.
// The same machinery serves mildly non-monotone residuals that still change
// sign (geometric bracket expansion finds one); residuals bounded away from
// zero raise RootNotBracketedError.
//
// Returns nu in (0, s] whenever g >= 0; if g(s) evaluates to exactly zero the
// initial guess x = log_s is returned bit-for-bit.
inline RootResult solve_monotone_scalar(const ScalarRootProblem& p,
                                        const NewtonConfig& cfg = {}) {
    if (!std::isfinite(p.log_s))
        throw InvalidConfigError("scalar prox needs a finite log column mass");
    if (!(p.epsilon > 0.0)) throw InvalidConfigError("epsilon must be positive");
    auto rho = [&](double x) { return x + p.g_log(x) / p.epsilon - p.log_s; };
    auto drho = [&](double x) { return 1.0 + p.dg_log(x) / p.epsilon; };

    double x0 = p.log_s;
    double f0 = rho(x0);
    if (std::abs(f0) <= cfg.tol) {
        RootResult r;
        r.log_nu = x0;
        r.nu = std::exp(x0);
        r.residual = f0;
        return r;
    }

    // Expand a bracket geometrically from the initial guess. rho climbs with
    // unit slope or steeper, so the root sits within |f0| of the guess; seed
    // the expansion accordingly, which leaves moderate residuals on the
    // step-1 ladder and still reaches roots that are 1e60 log units away.
    double step0 = std::max(1.0, std::ldexp(std::abs(f0), -40));
    double lo = x0, hi = x0, flo = f0, fhi = f0;
    double step = step0;
    for (int k = 0; k < 200 && flo > 0.0; ++k) {
        lo -= step;
        flo = rho(lo);
        step *= 2.0;
    }
    step = step0;
    for (int k = 0; k < 200 && fhi < 0.0; ++k) {
        hi += step;
        fhi = rho(hi);
        step *= 2.0;
    }
    if (flo > 0.0 || fhi < 0.0)
        throw RootNotBracketedError("scalar prox residual never changes sign");
    return detail::newton_bracketed(rho, drho, lo, hi, flo, fhi, cfg.tol, cfg.max_iter);
}

// Non-monotone branch for congestions whose marginal cost decreases (the
// log barrier: g(nu) = 1/nu). The residual is convex with a unique minimum;
// when the minimum is positive there is no root at all, otherwise the
// smaller of the two roots is the conventional choice. The minimizer is
// located by bisection on rho' (increasing), then the root is pinned on
// (-inf, x_min].
inline RootResult solve_smallest_root(const ScalarRootProblem& p,
                                      const NewtonConfig& cfg = {}) {
    if (!std::isfinite(p.log_s))
        throw InvalidConfigError("scalar prox needs a finite log column mass");
    if (!(p.epsilon > 0.0)) throw InvalidConfigError("epsilon must be positive");
    auto rho = [&](double x) { return x + p.g_log(x) / p.epsilon - p.log_s; };
    auto drho = [&](double x) { return 1.0 + p.dg_log(x) / p.epsilon; };

    // Bracket the stationary point of rho: drho < 0 far left, > 0 far right.
    double lo = p.log_s, hi = p.log_s, step = 1.0;
    for (int k = 0; k < 200 && drho(lo) > 0.0; ++k) {
        lo -= step;
        step *= 2.0;
    }
    step = 1.0;
    for (int k = 0; k < 200 && drho(hi) < 0.0; ++k) {
        hi += step;
        step *= 2.0;
    }
    if (drho(lo) > 0.0 || drho(hi) < 0.0)
        throw RootNotBracketedError("could not bracket the residual minimum");
    for (int k = 0; k < 200 && hi - lo > 1e-13 * (1.0 + std::abs(lo)); ++k) {
        double mid = 0.5 * (lo + hi);
        (drho(mid) < 0.0 ? lo : hi) = mid;
    }
    double x_min = 0.5 * (lo + hi);
    double f_min = rho(x_min);
    if (f_min > 0.0)
        throw RootNotBracketedError(
            "congestion prox has no solution: the residual minimum is positive (" +
            std::to_string(f_min) + ")");

    // Smallest root lies left of x_min where rho is decreasing toward f_min.
    double left = x_min, fleft = f_min;
    step = 1.0;
    for (int k = 0; k < 200 && fleft < 0.0; ++k) {
        left -= step;
        fleft = rho(left);
        step *= 2.0;
    }
    if (fleft < 0.0) throw RootNotBracketedError("no sign change left of the residual minimum");
    // On the decreasing branch the bracket logic flips sign; hand the negated
    // residual to the bracketed solver.
    auto neg_rho = [&](double x) { return -rho(x); };
    auto neg_drho = [&](double x) { return -drho(x); };
    RootResult r = detail::newton_bracketed(neg_rho, neg_drho, left, x_min, -fleft, -f_min,
                                            cfg.tol, cfg.max_iter);
    r.residual = -r.residual;
    return r;
}

}  // namespace cournot
