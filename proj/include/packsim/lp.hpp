#pragma once

// Dense two-phase primal simplex with Bland's rule (guaranteed termination,
// no perturbation). Templated on the scalar: double (1e-9 pivot tolerance)
// or Rational (exact). Variables are implicitly >= 0.

#include <cstddef>
#include <string>
#include <vector>

#include "packsim/errors.hpp"
#include "packsim/rational.hpp"

namespace packsim {

enum class Relation { LE, EQ, GE };
enum class LpStatus { Optimal, Infeasible, Unbounded };

template <class T>
struct LinearProgramT {
    struct Row {
        std::vector<T> coeffs;
        Relation rel = Relation::LE;
        T rhs{};
    };
    std::vector<T> objective;  // maximize objective . x
    std::vector<Row> rows;

    std::size_t var_count() const { return objective.size(); }
    void add_row(std::vector<T> coeffs, Relation rel, T rhs) {
        rows.push_back(Row{std::move(coeffs), rel, std::move(rhs)});
    }
};

template <class T>
struct LpSolutionT {
    LpStatus status = LpStatus::Optimal;
    T objective_value{};
    std::vector<T> primal;
    long iterations = 0;
};

using LinearProgram = LinearProgramT<Rational>;
using LpSolution = LpSolutionT<Rational>;

namespace detail {

template <class T>
struct LpEps {
    static T value() { return T(0); }
};
template <>
struct LpEps<double> {
    static double value() { return 1e-9; }
};

template <class T>
class SimplexTableau {
public:
    explicit SimplexTableau(const LinearProgramT<T>& lp) : eps_(LpEps<T>::value()) {
        n_ = lp.var_count();
        if (n_ == 0) throw InputError("LP needs at least one variable");
        m_ = lp.rows.size();
        for (const auto& row : lp.rows)
            if (row.coeffs.size() != n_) throw InputError("LP row width mismatch");

        std::size_t slacks = 0;
        for (const auto& row : lp.rows)
            if (row.rel != Relation::EQ) ++slacks;
        ncols_ = n_ + slacks + m_;  // structural + slack/surplus + one artificial per row
        first_artificial_ = n_ + slacks;

        tab_.assign(m_, std::vector<T>(ncols_ + 1, T(0)));
        basis_.assign(m_, 0);

        std::size_t scol = n_;
        for (std::size_t i = 0; i < m_; ++i) {
            const auto& row = lp.rows[i];
            bool flip = row.rhs < T(0);
            Relation rel = row.rel;
            if (flip && rel == Relation::LE) rel = Relation::GE;
            else if (flip && rel == Relation::GE) rel = Relation::LE;
            for (std::size_t j = 0; j < n_; ++j) tab_[i][j] = flip ? T(-row.coeffs[j]) : row.coeffs[j];
            tab_[i][ncols_] = flip ? T(-row.rhs) : row.rhs;
            if (row.rel != Relation::EQ) {
                tab_[i][scol] = (rel == Relation::LE) ? T(1) : T(-1);
                if (rel == Relation::LE) {
                    basis_[i] = static_cast<long>(scol);
                } else {
                    tab_[i][first_artificial_ + i] = T(1);
                    basis_[i] = static_cast<long>(first_artificial_ + i);
                }
                ++scol;
            } else {
                tab_[i][first_artificial_ + i] = T(1);
                basis_[i] = static_cast<long>(first_artificial_ + i);
            }
        }
    }

    LpSolutionT<T> solve(const std::vector<T>& objective) {
        LpSolutionT<T> sol;

        // Phase 1: minimize the sum of artificials.
        bool need_phase1 = false;
        for (std::size_t i = 0; i < m_; ++i)
            if (static_cast<std::size_t>(basis_[i]) >= first_artificial_) need_phase1 = true;
        if (need_phase1) {
            std::vector<T> p1(ncols_, T(0));
            for (std::size_t j = first_artificial_; j < ncols_; ++j) p1[j] = T(-1);
            run(p1, /*allow_artificials=*/true, sol.iterations);
            T infeas(0);
            for (std::size_t i = 0; i < m_; ++i)
                if (static_cast<std::size_t>(basis_[i]) >= first_artificial_)
                    infeas += tab_[i][ncols_];
            if (infeas > eps_) {
                sol.status = LpStatus::Infeasible;
                return sol;
            }
            evict_artificials();
        }

        std::vector<T> obj(ncols_, T(0));
        for (std::size_t j = 0; j < n_; ++j) obj[j] = objective[j];
        if (!run(obj, /*allow_artificials=*/false, sol.iterations)) {
            sol.status = LpStatus::Unbounded;
            return sol;
        }

        sol.status = LpStatus::Optimal;
        sol.primal.assign(n_, T(0));
        for (std::size_t i = 0; i < m_; ++i)
            if (static_cast<std::size_t>(basis_[i]) < n_) sol.primal[basis_[i]] = tab_[i][ncols_];
        sol.objective_value = T(0);
        for (std::size_t j = 0; j < n_; ++j) sol.objective_value += objective[j] * sol.primal[j];
        return sol;
    }

private:
    // Returns false on unboundedness.
    bool run(const std::vector<T>& obj, bool allow_artificials, long& iterations) {
        const std::size_t limit = allow_artificials ? ncols_ : first_artificial_;
        for (;;) {
            // Reduced cost r_j = obj_j - c_B . column_j; Bland: smallest
            // improving variable index enters.
            std::size_t enter = ncols_;
            for (std::size_t j = 0; j < limit; ++j) {
                T r = obj[j];
                for (std::size_t i = 0; i < m_; ++i) {
                    const T& cb = obj[basis_[i]];
                    if (cb != T(0)) r -= cb * tab_[i][j];
                }
                if (r > eps_) {
                    enter = j;
                    break;
                }
            }
            if (enter == ncols_) return true;  // optimal

            std::size_t leave = m_;
            for (std::size_t i = 0; i < m_; ++i) {
                if (tab_[i][enter] <= eps_) continue;
                if (leave == m_) {
                    leave = i;
                    continue;
                }
                T lhs = tab_[i][ncols_] * tab_[leave][enter];
                T rhs = tab_[leave][ncols_] * tab_[i][enter];
                if (lhs < rhs || (lhs == rhs && basis_[i] < basis_[leave])) leave = i;
            }
            if (leave == m_) return false;  // unbounded

            pivot(leave, enter);
            ++iterations;
        }
    }

    void pivot(std::size_t row, std::size_t col) {
        T p = tab_[row][col];
        for (std::size_t j = 0; j <= ncols_; ++j) tab_[row][j] /= p;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == row) continue;
            T f = tab_[i][col];
            if (f == T(0)) continue;
            for (std::size_t j = 0; j <= ncols_; ++j) tab_[i][j] -= f * tab_[row][j];
        }
        basis_[row] = static_cast<long>(col);
    }

    // Pivot zero-valued artificials out of the basis; drop rows that turned
    // out redundant so they cannot drift in phase 2.
    void evict_artificials() {
        for (std::size_t i = 0; i < m_;) {
            if (static_cast<std::size_t>(basis_[i]) < first_artificial_) {
                ++i;
                continue;
            }
            std::size_t col = first_artificial_;
            for (std::size_t j = 0; j < first_artificial_; ++j) {
                T v = tab_[i][j] < T(0) ? T(-tab_[i][j]) : tab_[i][j];
                if (v > eps_) {
                    col = j;
                    break;
                }
            }
            if (col < first_artificial_) {
                pivot(i, col);
                ++i;
            } else {
                tab_.erase(tab_.begin() + static_cast<long>(i));
                basis_.erase(basis_.begin() + static_cast<long>(i));
                --m_;
            }
        }
    }

    std::size_t n_ = 0, m_ = 0, ncols_ = 0, first_artificial_ = 0;
    std::vector<std::vector<T>> tab_;
    std::vector<long> basis_;
    T eps_;
};

}  // namespace detail

template <class T>
LpSolutionT<T> solve_lp(const LinearProgramT<T>& lp) {
    detail::SimplexTableau<T> tableau(lp);
    return tableau.solve(lp.objective);
}

// Max violation over rows plus negativity of variables; 0 when exactly feasible.
template <class T>
T feasibility_residual(const LinearProgramT<T>& lp, const std::vector<T>& x) {
    T worst(0);
    for (const auto& row : lp.rows) {
        T lhs(0);
        for (std::size_t j = 0; j < x.size(); ++j) lhs += row.coeffs[j] * x[j];
        T v(0);
        if (row.rel == Relation::LE && lhs > row.rhs) v = lhs - row.rhs;
        if (row.rel == Relation::GE && lhs < row.rhs) v = row.rhs - lhs;
        if (row.rel == Relation::EQ) v = lhs > row.rhs ? T(lhs - row.rhs) : T(row.rhs - lhs);
        if (v > worst) worst = v;
    }
    for (const T& xi : x)
        if (T(-xi) > worst) worst = -xi;
    return worst;
}

}  // namespace packsim
