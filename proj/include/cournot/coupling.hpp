#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "cournot/matrix.hpp"
#include "cournot/model.hpp"

namespace cournot {

// A coupling stored entirely in the log domain: log_values(i, j) = ln(gamma_ij),
// with -inf encoding an exact zero. Every solver transformation is an addition
// or subtraction of logs, so masses of order exp(-1e5) survive untouched.
struct Coupling {
    Mat log_values;

    Coupling() = default;
    explicit Coupling(Mat lv) : log_values(std::move(lv)) {}
    Coupling(int rows, int cols, double log_fill = 0.0) : log_values(rows, cols, log_fill) {}

    int rows() const { return log_values.rows(); }
    int cols() const { return log_values.cols(); }

    double mass(int i, int j) const { return std::exp(log_values(i, j)); }
};

// Pointwise log addition / subtraction (i.e. multiplication / division of
// masses). Subtraction treats (-inf) - (-inf) as -inf: a zero stays a zero.
inline void log_multiply_into(Coupling& a, const Mat& logb) {
    assert(a.log_values.same_shape(logb));
    double* x = a.log_values.data();
    const double* y = logb.data();
    for (size_t k = 0; k < logb.size(); ++k) x[k] += y[k];
}

// KL(gamma | theta) = sum_ij gamma_ij (ln(gamma_ij / theta_ij) - 1), with
// 0 ln 0 = 0. Mass where theta vanishes makes the divergence undefined.
inline double kl_divergence(const Coupling& gamma, const Coupling& theta) {
    if (!gamma.log_values.same_shape(theta.log_values))
        throw InvalidConfigError("KL arguments have mismatched shapes");
    const double* lg = gamma.log_values.data();
    const double* lt = theta.log_values.data();
    size_t n = gamma.log_values.size();
    for (size_t k = 0; k < n; ++k)
        if (lt[k] == kNegInf && lg[k] != kNegInf)
            throw DivergenceUndefinedError("gamma puts mass outside the support of theta");
    return pairwise_sum_of(n, [&](size_t k) {
        if (lg[k] == kNegInf) return 0.0;
        return std::exp(lg[k]) * (lg[k] - lt[k] - 1.0);
    });
}

// Gibbs kernel exp(-(c + v)/eps), the starting coupling for every scheme.
inline Coupling gibbs_kernel(const CostMatrix& cost, const PotentialVector& v, double eps) {
    if (!(eps > 0.0)) throw InvalidConfigError("epsilon must be positive");
    if (!v.values.empty() && static_cast<int>(v.values.size()) != cost.values.cols())
        throw InvalidConfigError("potential length does not match the cost matrix");
    Coupling k(cost.values.rows(), cost.values.cols(), 0.0);
    for (int i = 0; i < cost.values.rows(); ++i) {
        const double* c = cost.values.row(i);
        double* out = k.log_values.row(i);
        for (int j = 0; j < cost.values.cols(); ++j)
            out[j] = -(c[j] + potential_at(v, j)) / eps;
    }
    return k;
}

struct Marginals {
    std::vector<double> alpha;  // row sums, over X
    std::vector<double> nu;     // column sums, over Y
};

inline std::vector<double> log_row_sums(const Coupling& g) {
    std::vector<double> out(g.rows());
    for (int i = 0; i < g.rows(); ++i)
        out[i] = logsumexp(g.log_values.row(i), g.cols());
    return out;
}

inline std::vector<double> log_col_sums(const Coupling& g) {
    std::vector<double> out(g.cols());
    for (int j = 0; j < g.cols(); ++j)
        out[j] = logsumexp_strided(g.log_values.data() + j, g.rows(), g.cols());
    return out;
}

inline Marginals marginals(const Coupling& g) {
    Marginals m;
    m.alpha.reserve(g.rows());
    m.nu.reserve(g.cols());
    for (double lv : log_row_sums(g)) m.alpha.push_back(std::exp(lv));
    for (double lv : log_col_sums(g)) m.nu.push_back(std::exp(lv));
    return m;
}

inline double total_mass(const Coupling& g) {
    auto rows = log_row_sums(g);
    return std::exp(logsumexp(rows));
}

// Dykstra's per-constraint corrections, one log-matrix per prox slot per
// block. All-zero logs mean "no correction yet".
struct CorrectionStack {
    // corrections[slot][block]
    std::vector<std::vector<Mat>> corrections;

    void reset(int slots, const std::vector<Coupling>& shape) {
        corrections.assign(slots, {});
        for (auto& per_block : corrections) {
            per_block.reserve(shape.size());
            for (const auto& g : shape)
                per_block.emplace_back(g.rows(), g.cols(), 0.0);
        }
    }
};

}  // namespace cournot
