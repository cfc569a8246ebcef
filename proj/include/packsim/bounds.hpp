#pragma once

// Builders and solvers for the static optimum F*(L, Yhat) and the normalized
// optimum U*[rho]. Columns default to the maximal configurations only: under
// monotone feasibility a dominated configuration can always be replaced by a
// dominating one without changing the optimum, and the reduction keeps the
// dense tableau within the column cap. Full-column mode stays available.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "packsim/errors.hpp"
#include "packsim/lp.hpp"
#include "packsim/profile.hpp"

namespace packsim {

enum class ColumnMode { Maximal, Full };

inline constexpr std::size_t kLpColumnCap = 50'000;

template <class T>
struct BoundResultT {
    LpStatus status = LpStatus::Optimal;
    T objective{};
    // Nonzero server-assignment entries as (index into profile.config_set, value).
    std::vector<std::pair<int, T>> x_support;
    std::vector<T> y;
    long iterations = 0;
};

using BoundResult = BoundResultT<Rational>;

namespace detail {

template <class T>
T scalar_from_rational(const Rational& r);
template <>
inline double scalar_from_rational<double>(const Rational& r) {
    return r.get_d();
}
template <>
inline Rational scalar_from_rational<Rational>(const Rational& r) {
    return r;
}

template <class T>
BoundResultT<T> solve_reward_lp(const CloudProfile& profile, const T& total_servers,
                                const std::vector<T>& workload, ColumnMode columns,
                                bool slots_as_equality) {
    const int J = profile.type_count();
    if (static_cast<int>(workload.size()) != J)
        throw InputError("workload reference has wrong length");

    std::vector<int> cols;
    if (columns == ColumnMode::Full) {
        cols.resize(profile.config_set.size());
        for (std::size_t i = 0; i < cols.size(); ++i) cols[i] = static_cast<int>(i);
    } else {
        cols = maximal_config_indices(profile);
    }
    if (cols.size() > kLpColumnCap)
        throw InputError("LP would have " + std::to_string(cols.size()) +
                         " configuration columns; cap is " + std::to_string(kLpColumnCap));

    const std::size_t C = cols.size();
    LinearProgramT<T> lp;
    lp.objective.assign(C + J, T(0));
    for (int j = 0; j < J; ++j)
        lp.objective[C + j] = scalar_from_rational<T>(profile.types[j].reward_rate);

    // Y_j <= Yhat_j
    for (int j = 0; j < J; ++j) {
        std::vector<T> row(C + J, T(0));
        row[C + j] = T(1);
        lp.add_row(std::move(row), Relation::LE, workload[j]);
    }
    // sum_k k_j X_k >= Y_j
    for (int j = 0; j < J; ++j) {
        std::vector<T> row(C + J, T(0));
        for (std::size_t c = 0; c < C; ++c) {
            int kj = profile.config_set[cols[c]][j];
            if (kj != 0) row[c] = T(kj);
        }
        row[C + j] = T(-1);
        lp.add_row(std::move(row), slots_as_equality ? Relation::EQ : Relation::GE, T(0));
    }
    // sum_k X_k = L
    {
        std::vector<T> row(C + J, T(0));
        for (std::size_t c = 0; c < C; ++c) row[c] = T(1);
        lp.add_row(std::move(row), Relation::EQ, total_servers);
    }

    LpSolutionT<T> sol = solve_lp(lp);
    BoundResultT<T> out;
    out.status = sol.status;
    out.iterations = sol.iterations;
    if (sol.status != LpStatus::Optimal) return out;
    out.objective = sol.objective_value;
    out.y.assign(J, T(0));
    for (int j = 0; j < J; ++j) out.y[j] = sol.primal[C + j];
    for (std::size_t c = 0; c < C; ++c)
        if (sol.primal[c] != T(0)) out.x_support.emplace_back(cols[c], sol.primal[c]);
    return out;
}

}  // namespace detail

// F*(L, Yhat): continuous relaxation of the static packing optimum.
template <class T>
BoundResultT<T> optimal_static(const T& total_servers, const std::vector<T>& workload,
                               const CloudProfile& profile,
                               ColumnMode columns = ColumnMode::Maximal,
                               bool slots_as_equality = false) {
    return detail::solve_reward_lp(profile, total_servers, workload, columns, slots_as_equality);
}

// U*[rho]: the normalized optimum (L = 1).
template <class T>
BoundResultT<T> optimal_normalized(const std::vector<T>& rho, const CloudProfile& profile,
                                   ColumnMode columns = ColumnMode::Maximal,
                                   bool slots_as_equality = false) {
    return detail::solve_reward_lp(profile, T(1), rho, columns, slots_as_equality);
}

inline std::vector<double> to_doubles(const std::vector<Rational>& v) {
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& r : v) out.push_back(r.get_d());
    return out;
}

}  // namespace packsim
