#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "cournot/errors.hpp"

namespace cournot {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Dense row-major matrix of doubles. Deliberately minimal: the solvers only
// need indexed access, whole-matrix iteration, and sizes.
class Mat {
public:
    Mat() = default;
    Mat(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), v_(static_cast<size_t>(rows) * cols, fill) {
        assert(rows >= 0 && cols >= 0);
    }

    static Mat of(std::initializer_list<std::initializer_list<double>> rows) {
        Mat m(static_cast<int>(rows.size()),
              rows.size() ? static_cast<int>(rows.begin()->size()) : 0);
        int i = 0;
        for (const auto& row : rows) {
            assert(static_cast<int>(row.size()) == m.cols_);
            int j = 0;
            for (double x : row) m(i, j++) = x;
            ++i;
        }
        return m;
    }

    double& operator()(int i, int j) {
        assert(i >= 0 && i < rows_ && j >= 0 && j < cols_);
        return v_[static_cast<size_t>(i) * cols_ + j];
    }
    double operator()(int i, int j) const {
        assert(i >= 0 && i < rows_ && j >= 0 && j < cols_);
        return v_[static_cast<size_t>(i) * cols_ + j];
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    size_t size() const { return v_.size(); }

    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }
    double* row(int i) { return v_.data() + static_cast<size_t>(i) * cols_; }
    const double* row(int i) const { return v_.data() + static_cast<size_t>(i) * cols_; }

    std::vector<double>& values() { return v_; }
    const std::vector<double>& values() const { return v_; }

    bool same_shape(const Mat& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> v_;
};

namespace detail {

// Fixed-tree pairwise reduction. The summation tree depends only on (n),
// never on thread count or data, so identical inputs give bit-identical
// sums on every run. Accessor maps an index to a term.
template <class Accessor>
double pairwise_sum_impl(const Accessor& at, size_t lo, size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (size_t k = 0; k < n; ++k) s += at(lo + k);
        return s;
    }
    size_t half = n / 2;
    return pairwise_sum_impl(at, lo, half) + pairwise_sum_impl(at, lo + half, n - half);
}

}  // namespace detail

inline double pairwise_sum(const double* x, size_t n) {
    return detail::pairwise_sum_impl([x](size_t k) { return x[k]; }, 0, n);
}

inline double pairwise_sum(const std::vector<double>& x) {
    return pairwise_sum(x.data(), x.size());
}

template <class Accessor>
double pairwise_sum_of(size_t n, const Accessor& at) {
    return detail::pairwise_sum_impl(at, 0, n);
}

// log(sum(exp(x_k))) over a strided range, stable against large negative
// entries. All entries -inf gives -inf. +inf entries are a caller bug.
inline double logsumexp_strided(const double* x, size_t n, size_t stride) {
    double m = kNegInf;
    for (size_t k = 0; k < n; ++k) {
        double v = x[k * stride];
        if (v > m) m = v;
    }
    if (m == kNegInf) return kNegInf;
    double s = detail::pairwise_sum_impl(
        [x, stride, m](size_t k) { return std::exp(x[k * stride] - m); }, 0, n);
    return m + std::log(s);
}

inline double logsumexp(const double* x, size_t n) { return logsumexp_strided(x, n, 1); }
inline double logsumexp(const std::vector<double>& x) { return logsumexp(x.data(), x.size()); }

inline double logsumexp2(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    double m = a > b ? a : b;
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

inline double l1_norm(const std::vector<double>& x) {
    return pairwise_sum_of(x.size(), [&x](size_t k) { return std::abs(x[k]); });
}

inline double l1_diff(const std::vector<double>& a, const std::vector<double>& b) {
    assert(a.size() == b.size());
    return pairwise_sum_of(a.size(), [&](size_t k) { return std::abs(a[k] - b[k]); });
}

inline double sup_norm(const std::vector<double>& x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace cournot
