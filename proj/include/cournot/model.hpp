#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "cournot/matrix.hpp"

namespace cournot {

// Finite set of points in R^dim (dim is 1 or 2). Coordinates are stored
// row-major: point i occupies coords[i*dim .. i*dim+dim).
struct DiscreteSpace {
    int dim = 1;
    std::vector<double> coords;

    int size() const { return static_cast<int>(coords.size()) / dim; }
    double coord(int i, int axis) const { return coords[static_cast<size_t>(i) * dim + axis]; }
};

using DiscreteSpacePtr = std::shared_ptr<const DiscreteSpace>;

inline DiscreteSpacePtr make_space(int dim, std::vector<double> coords) {
    if (dim != 1 && dim != 2)
        throw InvalidConfigError("space dimension must be 1 or 2, got " + std::to_string(dim));
    if (coords.empty() || coords.size() % dim != 0)
        throw InvalidConfigError("coordinate list size must be a positive multiple of dim");
    for (double c : coords)
        if (!std::isfinite(c)) throw InvalidConfigError("space coordinates must be finite");
    auto s = std::make_shared<DiscreteSpace>();
    s->dim = dim;
    s->coords = std::move(coords);
    return s;
}

// Regular grid with n points per axis, both endpoints included. In 2D the
// points are enumerated row-major with the low corner first:
// index = i0 * n + i1 where i0 walks the first axis.
inline DiscreteSpacePtr build_grid(std::vector<std::array<double, 2>> bounds, int n, int dim) {
    if (dim != 1 && dim != 2)
        throw InvalidConfigError("grid dimension must be 1 or 2, got " + std::to_string(dim));
    if (n < 2) throw InvalidConfigError("grid needs n >= 2 points per axis");
    if (bounds.size() == 1 && dim == 2) bounds.push_back(bounds[0]);
    if (static_cast<int>(bounds.size()) != dim)
        throw InvalidConfigError("expected one [lo, hi] interval per axis");
    for (const auto& b : bounds) {
        if (!std::isfinite(b[0]) || !std::isfinite(b[1]) || !(b[0] < b[1]))
            throw InvalidConfigError("grid interval must satisfy lo < hi");
    }

    auto axis_coord = [&](int axis, int k) {
        double lo = bounds[axis][0], hi = bounds[axis][1];
        return k == n - 1 ? hi : lo + k * ((hi - lo) / (n - 1));
    };

    std::vector<double> coords;
    if (dim == 1) {
        coords.reserve(n);
        for (int k = 0; k < n; ++k) coords.push_back(axis_coord(0, k));
    } else {
        coords.reserve(static_cast<size_t>(n) * n * 2);
        for (int i0 = 0; i0 < n; ++i0)
            for (int i1 = 0; i1 < n; ++i1) {
                coords.push_back(axis_coord(0, i0));
                coords.push_back(axis_coord(1, i1));
            }
    }
    return make_space(dim, std::move(coords));
}

inline double distance(const DiscreteSpace& a, int i, const DiscreteSpace& b, int j) {
    assert(a.dim == b.dim);
    double s = 0.0;
    for (int ax = 0; ax < a.dim; ++ax) {
        double d = a.coord(i, ax) - b.coord(j, ax);
        s += d * d;
    }
    return std::sqrt(s);
}

// Probability weights over a DiscreteSpace. Entries are nonnegative and sum
// to 1 up to 1e-12; builders normalize, make_probability only validates.
struct ProbabilityVector {
    DiscreteSpacePtr space;
    std::vector<double> w;

    int size() const { return static_cast<int>(w.size()); }
};

inline ProbabilityVector make_probability(DiscreteSpacePtr space, std::vector<double> w) {
    if (!space) throw InvalidConfigError("probability vector needs a space");
    if (static_cast<int>(w.size()) != space->size())
        throw InvalidConfigError("weight count does not match the space size");
    for (double x : w) {
        if (!(x >= 0.0) || !std::isfinite(x))
            throw DegenerateMeasureError("probability weights must be finite and nonnegative");
    }
    double total = pairwise_sum(w);
    if (std::abs(total - 1.0) > 1e-12)
        throw DegenerateMeasureError("probability weights sum to " + std::to_string(total) +
                                     ", expected 1 within 1e-12");
    return ProbabilityVector{std::move(space), std::move(w)};
}

struct GaussianComponent {
    std::vector<double> center;  // one entry per axis
    double stdev = 1.0;
    double mass = 1.0;
};

// Evaluates a mixture of isotropic Gaussian densities at the grid points and
// normalizes. Throws if the samples vanish everywhere (mixture far outside
// the grid, or stdev far below the spacing at an off-grid center).
inline ProbabilityVector gaussian_mixture(DiscreteSpacePtr space,
                                          const std::vector<GaussianComponent>& components) {
    if (components.empty()) throw InvalidConfigError("gaussian mixture needs at least one component");
    for (const auto& c : components) {
        if (static_cast<int>(c.center.size()) != space->dim)
            throw InvalidConfigError("gaussian component center has wrong dimension");
        if (!(c.stdev > 0.0)) throw InvalidConfigError("gaussian component stdev must be positive");
        if (!(c.mass > 0.0)) throw InvalidConfigError("gaussian component mass must be positive");
    }
    int n = space->size();
    std::vector<double> w(n, 0.0);
    for (const auto& c : components) {
        for (int i = 0; i < n; ++i) {
            double q = 0.0;
            for (int ax = 0; ax < space->dim; ++ax) {
                double d = (space->coord(i, ax) - c.center[ax]) / c.stdev;
                q += d * d;
            }
            w[i] += c.mass * std::exp(-0.5 * q);
        }
    }
    double total = pairwise_sum(w);
    if (!(total > 0.0) || !std::isfinite(total))
        throw DegenerateMeasureError("gaussian mixture vanishes on the grid");
    for (double& x : w) x /= total;
    return make_probability(std::move(space), std::move(w));
}

// Uniform over all points, or over the points inside an axis-aligned box.
inline ProbabilityVector uniform_measure(DiscreteSpacePtr space,
                                         const std::vector<std::array<double, 2>>* box = nullptr) {
    int n = space->size();
    std::vector<double> w(n, 0.0);
    int hits = 0;
    for (int i = 0; i < n; ++i) {
        bool inside = true;
        if (box) {
            if (static_cast<int>(box->size()) != space->dim)
                throw InvalidConfigError("uniform box has wrong dimension");
            for (int ax = 0; ax < space->dim && inside; ++ax) {
                double c = space->coord(i, ax);
                inside = c >= (*box)[ax][0] && c <= (*box)[ax][1];
            }
        }
        if (inside) {
            w[i] = 1.0;
            ++hits;
        }
    }
    if (hits == 0) throw DegenerateMeasureError("uniform box contains no grid points");
    for (double& x : w) x /= hits;
    return make_probability(std::move(space), std::move(w));
}

struct CostMatrix {
    Mat values;  // |X| x |Y|
};

// c(x, y) = |x - y|^p with p > 0 (Euclidean distance in 2D).
inline CostMatrix power_cost(const DiscreteSpace& X, const DiscreteSpace& Y, double p) {
    if (!(p > 0.0)) throw InvalidConfigError("cost power must be positive");
    if (X.dim != Y.dim) throw InvalidConfigError("cost spaces have mismatched dimensions");
    Mat m(X.size(), Y.size());
    for (int i = 0; i < X.size(); ++i)
        for (int j = 0; j < Y.size(); ++j) {
            double c = std::pow(distance(X, i, Y, j), p);
            if (!std::isfinite(c))
                throw InvalidConfigError("cost entry overflows at power " + std::to_string(p));
            m(i, j) = c;
        }
    return CostMatrix{std::move(m)};
}

// Symmetric pairwise interaction phi_kj = scale * |y_k - y_j|^q, zero on the
// diagonal. Each unordered pair is computed once and mirrored so the matrix
// is exactly symmetric. frobenius_sq = sum of all squared entries; the
// contraction condition for the interaction prox wants it < 1.
struct InteractionMatrix {
    Mat values;  // |Y| x |Y|
    double frobenius_sq = 0.0;

    bool zero() const { return values.size() == 0 || frobenius_sq == 0.0; }
};

inline InteractionMatrix interaction_kernel(const DiscreteSpace& Y, double scale, double q) {
    if (!(scale >= 0.0)) throw InvalidConfigError("interaction scale must be nonnegative");
    if (!(q > 0.0)) throw InvalidConfigError("interaction exponent must be positive");
    int n = Y.size();
    Mat m(n, n, 0.0);
    if (scale > 0.0) {
        for (int k = 0; k < n; ++k)
            for (int j = k + 1; j < n; ++j) {
                double v = scale * std::pow(distance(Y, k, Y, j), q);
                m(k, j) = v;
                m(j, k) = v;
            }
    }
    double fro = pairwise_sum_of(m.size(), [&m](size_t t) { return m.data()[t] * m.data()[t]; });
    return InteractionMatrix{std::move(m), fro};
}

inline InteractionMatrix zero_interaction(int n) { return InteractionMatrix{Mat(n, n, 0.0), 0.0}; }

// phi * nu (symmetric matrix, so the transpose question does not arise).
inline std::vector<double> apply_interaction(const InteractionMatrix& phi,
                                             const std::vector<double>& nu) {
    assert(phi.values.rows() == static_cast<int>(nu.size()));
    std::vector<double> out(nu.size());
    for (int k = 0; k < phi.values.rows(); ++k) {
        const double* row = phi.values.row(k);
        out[k] = pairwise_sum_of(nu.size(), [&](size_t j) { return row[j] * nu[j]; });
    }
    return out;
}

enum class CongestionKind { none, power, entropy, log_barrier };

inline std::string to_string(CongestionKind k) {
    switch (k) {
        case CongestionKind::none: return "none";
        case CongestionKind::power: return "power";
        case CongestionKind::entropy: return "entropy";
        case CongestionKind::log_barrier: return "log_barrier";
    }
    return "?";
}

// Local congestion penalty F applied to each strategy's mass, with marginal
// cost f = F'. The log-parameterized forms take x = ln(t) and stay finite
// for |x| far beyond where t itself would overflow, which matters once
// epsilon divides costs of order 1e4 into the exponent.
//
// The reference scale s reads masses in units of s: the column contributes
// s*F0(t/s) where F0 is the unit-scale form, so f(t) = F0'(t/s). With
// s = grid spacing this is the quadrature discretization of a congestion
// on the density, which keeps the penalty strength grid-independent; the
// default s = 1 penalizes raw masses.
struct CongestionSpec {
    CongestionKind kind = CongestionKind::none;
    double exponent = 2.0;  // q for the power kind
    double scale = 1.0;     // reference mass s

    bool none() const { return kind == CongestionKind::none; }

    // f is nondecreasing for every kind except log_barrier (f = s/t).
    bool monotone_marginal() const { return kind != CongestionKind::log_barrier; }

    double F(double t) const {
        switch (kind) {
            case CongestionKind::none: return 0.0;
            case CongestionKind::power: return scale * std::pow(t / scale, exponent);
            case CongestionKind::entropy: return t > 0.0 ? t * std::log(t / scale) - t : 0.0;
            case CongestionKind::log_barrier: return scale * std::log(t / scale);
        }
        return 0.0;
    }

    double f(double t) const {
        switch (kind) {
            case CongestionKind::none: return 0.0;
            case CongestionKind::power: return exponent * std::pow(t / scale, exponent - 1.0);
            case CongestionKind::entropy: return std::log(t / scale);
            case CongestionKind::log_barrier: return scale / t;
        }
        return 0.0;
    }

    // f(e^x) and its derivative in x.
    double f_log(double x) const {
        switch (kind) {
            case CongestionKind::none: return 0.0;
            case CongestionKind::power:
                return exponent * std::exp((exponent - 1.0) * (x - std::log(scale)));
            case CongestionKind::entropy: return x - std::log(scale);
            case CongestionKind::log_barrier: return std::exp(std::log(scale) - x);
        }
        return 0.0;
    }

    double df_log(double x) const {
        switch (kind) {
            case CongestionKind::none: return 0.0;
            case CongestionKind::power:
                return exponent * (exponent - 1.0) *
                       std::exp((exponent - 1.0) * (x - std::log(scale)));
            case CongestionKind::entropy: return 1.0;
            case CongestionKind::log_barrier: return -std::exp(std::log(scale) - x);
        }
        return 0.0;
    }
};

inline CongestionSpec make_congestion(CongestionKind kind, double exponent = 2.0,
                                      double scale = 1.0) {
    if (kind == CongestionKind::power && !(exponent > 1.0))
        throw InvalidConfigError("power congestion needs exponent > 1");
    if (!(scale > 0.0) || !std::isfinite(scale))
        throw InvalidConfigError("congestion scale must be positive and finite");
    CongestionSpec g;
    g.kind = kind;
    g.exponent = exponent;
    g.scale = scale;
    return g;
}

struct PotentialVector {
    std::vector<double> values;  // over Y; empty means identically zero
};

// v(y) = coeff * |y - center|^e, or the signed variant coeff * (y - center)^e
// in 1D (odd exponents give an asymmetric well).
inline PotentialVector power_potential(const DiscreteSpace& Y, const std::vector<double>& center,
                                       double exponent, double coeff, bool signed_arg = false) {
    if (static_cast<int>(center.size()) != Y.dim)
        throw InvalidConfigError("potential center has wrong dimension");
    if (signed_arg && Y.dim != 1)
        throw InvalidConfigError("signed potential only makes sense in 1D");
    if (!(exponent > 0.0)) throw InvalidConfigError("potential exponent must be positive");
    std::vector<double> v(Y.size());
    for (int j = 0; j < Y.size(); ++j) {
        double val;
        if (signed_arg) {
            double d = Y.coord(j, 0) - center[0];
            val = coeff * (d < 0 ? -std::pow(-d, exponent) : std::pow(d, exponent));
        } else {
            double s = 0.0;
            for (int ax = 0; ax < Y.dim; ++ax) {
                double d = Y.coord(j, ax) - center[ax];
                s += d * d;
            }
            val = coeff * std::pow(std::sqrt(s), exponent);
        }
        if (!std::isfinite(val)) throw InvalidConfigError("potential entry overflows");
        v[j] = val;
    }
    return PotentialVector{std::move(v)};
}

inline double potential_at(const PotentialVector& v, int j) {
    return v.values.empty() ? 0.0 : v.values[static_cast<size_t>(j)];
}

// One population's full problem: fixed type distribution mu on X, strategy
// grid Y, transport cost, local congestion, pairwise interaction, external
// potential, and the entropic regularization strength.
struct ProblemSpec {
    DiscreteSpacePtr X, Y;
    ProbabilityVector mu;
    CostMatrix cost;
    CongestionSpec congestion;
    InteractionMatrix interaction;
    PotentialVector potential;
    double epsilon = 0.1;
};

inline void validate_problem(const ProblemSpec& p) {
    if (!p.X || !p.Y) throw InvalidConfigError("problem needs both spaces");
    if (!p.mu.space || p.mu.size() != p.X->size() ||
        (p.mu.space != p.X && p.mu.space->coords != p.X->coords))
        throw InvalidConfigError("mu is not a measure on X");
    if (p.cost.values.rows() != p.X->size() || p.cost.values.cols() != p.Y->size())
        throw InvalidConfigError("cost matrix shape does not match the spaces");
    if (!p.interaction.zero() && p.interaction.values.rows() != p.Y->size())
        throw InvalidConfigError("interaction matrix shape does not match Y");
    if (!p.potential.values.empty() &&
        static_cast<int>(p.potential.values.size()) != p.Y->size())
        throw InvalidConfigError("potential length does not match Y");
    if (!(p.epsilon > 0.0)) throw InvalidConfigError("epsilon must be positive");
}

// E(nu) = sum_j F(nu_j) + (1/2) <nu, phi nu> + <v, nu>. The two-population
// energies below use the same pieces without the 1/2.
inline double energy_value(const ProblemSpec& p, const std::vector<double>& nu,
                           double interaction_factor = 0.5) {
    double e = 0.0;
    if (!p.congestion.none())
        e += pairwise_sum_of(nu.size(), [&](size_t j) {
            return nu[j] > 0.0 ? p.congestion.F(nu[j]) : 0.0;
        });
    if (!p.interaction.zero() && p.interaction.frobenius_sq > 0.0) {
        auto pn = apply_interaction(p.interaction, nu);
        e += interaction_factor *
             pairwise_sum_of(nu.size(), [&](size_t j) { return nu[j] * pn[j]; });
    }
    if (!p.potential.values.empty())
        e += pairwise_sum_of(nu.size(), [&](size_t j) { return p.potential.values[j] * nu[j]; });
    return e;
}

// Two populations sharing one strategy space, coupled through a congestion
// penalty on the total occupancy nu1 + nu2 (and through nothing else; each
// population keeps its own cost, congestion, interaction, potential and
// epsilon).
struct TwoPopulationSpec {
    ProblemSpec pop1, pop2;
    CongestionSpec shared_congestion;
};

inline void validate_two_population(const TwoPopulationSpec& s) {
    validate_problem(s.pop1);
    validate_problem(s.pop2);
    const auto& a = *s.pop1.Y;
    const auto& b = *s.pop2.Y;
    if (a.dim != b.dim || a.coords != b.coords)
        throw InvalidConfigError("populations must share the strategy space point-for-point");
    if (s.shared_congestion.kind == CongestionKind::log_barrier)
        throw InvalidConfigError("shared congestion does not support log_barrier");
}

}  // namespace cournot
