#pragma once

// Test-only brute-force LP oracle: enumerates candidate vertices (every
// choice of n active constraints among rows-as-equalities and x_i = 0),
// solves the square system by Gaussian elimination, filters by feasibility,
// and returns the best objective. Independent of the simplex implementation.

#include <optional>
#include <vector>

#include "packsim/lp.hpp"

namespace packsim::testing {

template <class T>
std::optional<std::vector<T>> solve_square(std::vector<std::vector<T>> a, std::vector<T> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        auto mag = [](const T& v) { return v < T(0) ? T(-v) : v; };
        for (std::size_t r = col + 1; r < n; ++r)
            if (mag(a[r][col]) > mag(a[piv][col])) piv = r;
        if (!(mag(a[piv][col]) > detail::LpEps<T>::value())) return std::nullopt;  // singular
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            T f = a[r][col] / a[col][col];
            if (f == T(0)) continue;
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<T> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
    return x;
}

template <class T>
struct OracleResult {
    bool feasible = false;
    T objective{};
    std::vector<T> best;
};

template <class T>
OracleResult<T> vertex_enumeration_optimum(const LinearProgramT<T>& lp, const T& feas_tol) {
    const std::size_t n = lp.var_count();
    const std::size_t m = lp.rows.size();
    const std::size_t total = m + n;  // rows, then x_i = 0 bounds

    OracleResult<T> result;

    // Iterate all n-subsets of the constraint pool.
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    auto advance = [&]() -> bool {
        std::size_t i = n;
        while (i-- > 0) {
            if (idx[i] < total - n + i) {
                ++idx[i];
                for (std::size_t j = i + 1; j < n; ++j) idx[j] = idx[j - 1] + 1;
                return true;
            }
        }
        return false;
    };
    for (;;) {
        std::vector<std::vector<T>> a(n, std::vector<T>(n, T(0)));
        std::vector<T> b(n, T(0));
        for (std::size_t r = 0; r < n; ++r) {
            if (idx[r] < m) {
                a[r] = lp.rows[idx[r]].coeffs;
                b[r] = lp.rows[idx[r]].rhs;
            } else {
                a[r][idx[r] - m] = T(1);
            }
        }
        if (auto x = solve_square(a, b)) {
            bool ok = true;
            for (const T& xi : *x)
                if (xi < T(0) - feas_tol) ok = false;
            for (std::size_t r = 0; ok && r < m; ++r) {
                T lhs(0);
                for (std::size_t c = 0; c < n; ++c) lhs += lp.rows[r].coeffs[c] * (*x)[c];
                switch (lp.rows[r].rel) {
                    case Relation::LE: ok = lhs <= lp.rows[r].rhs + feas_tol; break;
                    case Relation::GE: ok = lhs >= lp.rows[r].rhs - feas_tol; break;
                    case Relation::EQ: {
                        T d = lhs - lp.rows[r].rhs;
                        if (d < T(0)) d = -d;
                        ok = d <= feas_tol;
                        break;
                    }
                }
            }
            if (ok) {
                T obj(0);
                for (std::size_t c = 0; c < n; ++c) obj += lp.objective[c] * (*x)[c];
                if (!result.feasible || obj > result.objective) {
                    result.feasible = true;
                    result.objective = obj;
                    result.best = *x;
                }
            }
        }
        if (!advance()) return result;
    }
}

}  // namespace packsim::testing
