#pragma once

// Two-phase dense-tableau simplex for  optimize c'x  s.t.  A x = b,  x >= 0.
// Dantzig pricing, switching to Bland's rule during runs of degenerate pivots.

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "hardyqkd/error.hpp"
#include "hardyqkd/sdp.hpp"

namespace hardyqkd::solvers {

struct LPProblem {
    Eigen::VectorXd c;
    Eigen::MatrixXd A_eq;
    Eigen::VectorXd b_eq;
    Sense sense = Sense::minimize;
};

enum class LpStatus { optimal, infeasible, unbounded, max_iterations };

inline const char* to_string(LpStatus s) {
    switch (s) {
        case LpStatus::optimal: return "optimal";
        case LpStatus::infeasible: return "infeasible";
        case LpStatus::unbounded: return "unbounded";
        case LpStatus::max_iterations: return "max-iterations";
    }
    return "unknown";
}

struct LPSolution {
    LpStatus status = LpStatus::max_iterations;
    Eigen::VectorXd x;
    double value = 0.0;
    int iterations = 0;
    std::vector<int> pruned_rows;  // redundant equalities removed after phase 1
};

struct LpOptions {
    int max_iter = 50000;
    double tol = 1e-10;
    int degenerate_switch = 20;
};

namespace detail {

class Tableau {
public:
    Tableau(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) : m_(a.rows()), n_(a.cols()) {
        t_ = Eigen::MatrixXd::Zero(m_, n_ + m_ + 1);
        for (int i = 0; i < m_; ++i) {
            const double s = b(i) < 0 ? -1.0 : 1.0;
            t_.row(i).head(n_) = s * a.row(i);
            t_(i, n_ + i) = 1.0;
            t_(i, n_ + m_) = s * b(i);
        }
        basis_.resize(m_);
        for (int i = 0; i < m_; ++i) basis_[i] = n_ + i;
    }

    int rows() const { return static_cast<int>(t_.rows()); }
    double rhs(int i) const { return t_(i, t_.cols() - 1); }
    const std::vector<int>& basis() const { return basis_; }
    int num_structural() const { return n_; }
    bool is_artificial(int j) const { return j >= n_; }

    void pivot(int r, int c) {
        t_.row(r) /= t_(r, c);
        for (int i = 0; i < t_.rows(); ++i)
            if (i != r && t_(i, c) != 0.0) t_.row(i) -= t_(i, c) * t_.row(r);
        basis_[r] = c;
    }

    void remove_row(int r) {
        const int rows = static_cast<int>(t_.rows()) - 1;
        Eigen::MatrixXd next(rows, t_.cols());
        for (int i = 0, k = 0; i <= rows; ++i)
            if (i != r) next.row(k++) = t_.row(i);
        t_ = std::move(next);
        basis_.erase(basis_.begin() + r);
    }

    double entry(int i, int j) const { return t_(i, j); }

    /// Minimizes cost'x over the allowed columns. Returns status.
    LpStatus optimize(const Eigen::VectorXd& cost, int allowed_cols, const LpOptions& opt, int& iterations) {
        int degenerate_run = 0;
        while (true) {
            if (iterations >= opt.max_iter) return LpStatus::max_iterations;
            // Reduced costs d_j = c_j - c_B' B^{-1} a_j.
            Eigen::RowVectorXd cb(rows());
            for (int i = 0; i < rows(); ++i) cb(i) = cost(basis_[i]);
            const Eigen::RowVectorXd reduced =
                cost.head(allowed_cols).transpose() - cb * t_.leftCols(allowed_cols);
            const bool bland = degenerate_run >= opt.degenerate_switch;
            int enter = -1;
            double best = -opt.tol;
            for (int j = 0; j < allowed_cols; ++j) {
                if (reduced(j) < best) {
                    enter = j;
                    if (bland) break;
                    best = reduced(j);
                }
            }
            if (enter < 0) return LpStatus::optimal;
            int leave = -1;
            double ratio = std::numeric_limits<double>::infinity();
            for (int i = 0; i < rows(); ++i) {
                const double a = t_(i, enter);
                if (a > 1e-11) {
                    const double r = rhs(i) / a;
                    if (r < ratio - 1e-12 || (std::abs(r - ratio) <= 1e-12 && leave >= 0 && basis_[i] < basis_[leave])) {
                        ratio = r;
                        leave = i;
                    }
                }
            }
            if (leave < 0) return LpStatus::unbounded;
            degenerate_run = ratio <= 1e-12 ? degenerate_run + 1 : 0;
            pivot(leave, enter);
            ++iterations;
        }
    }

private:
    int m_;
    int n_;
    Eigen::MatrixXd t_;
    std::vector<int> basis_;
};

}  // namespace detail

inline LPSolution lp_solve(const LPProblem& p, const LpOptions& opt = {}) {
    const int m = static_cast<int>(p.A_eq.rows());
    const int n = static_cast<int>(p.A_eq.cols());
    if (p.c.size() != n || p.b_eq.size() != m)
        throw Error(ErrorCode::invalid_argument, "LP dimensions are inconsistent");
    if (!p.c.allFinite() || !p.A_eq.allFinite() || !p.b_eq.allFinite())
        throw Error(ErrorCode::invalid_argument, "LP data not finite");

    LPSolution sol;
    detail::Tableau tab(p.A_eq, p.b_eq);

    // Phase 1: minimize the sum of artificials.
    Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(n + m);
    phase1.tail(m).setOnes();
    auto status = tab.optimize(phase1, n + m, opt, sol.iterations);
    if (status == LpStatus::max_iterations) {
        sol.status = status;
        return sol;
    }
    double infeas = 0.0;
    for (int i = 0; i < tab.rows(); ++i)
        if (tab.is_artificial(tab.basis()[i])) infeas += tab.rhs(i);
    const double scale = 1.0 + p.b_eq.cwiseAbs().maxCoeff();
    if (infeas > 1e-9 * scale) {
        sol.status = LpStatus::infeasible;
        return sol;
    }

    // Drive artificials out of the basis; rows that cannot be pivoted are redundant.
    std::vector<int> row_origin(m);
    for (int i = 0; i < m; ++i) row_origin[i] = i;
    for (int i = 0; i < tab.rows();) {
        if (!tab.is_artificial(tab.basis()[i])) {
            ++i;
            continue;
        }
        int col = -1;
        double best = 1e-9;
        for (int j = 0; j < n; ++j)
            if (std::abs(tab.entry(i, j)) > best) {
                best = std::abs(tab.entry(i, j));
                col = j;
            }
        if (col >= 0) {
            tab.pivot(i, col);
            ++i;
        } else {
            sol.pruned_rows.push_back(row_origin[i]);
            row_origin.erase(row_origin.begin() + i);
            tab.remove_row(i);
        }
    }

    // Phase 2 over structural columns only.
    const double sign = p.sense == Sense::maximize ? -1.0 : 1.0;
    Eigen::VectorXd cost = Eigen::VectorXd::Zero(n + m);
    cost.head(n) = sign * p.c;
    status = tab.optimize(cost, n, opt, sol.iterations);
    sol.status = status;
    if (status != LpStatus::optimal) return sol;

    // Recover x from the final basis with a direct solve to shed tableau round-off.
    const int r = tab.rows();
    sol.x = Eigen::VectorXd::Zero(n);
    if (r > 0) {
        Eigen::MatrixXd B(r, r);
        Eigen::VectorXd rhs(r);
        for (int i = 0; i < r; ++i) {
            for (int k = 0; k < r; ++k) B(i, k) = p.A_eq(row_origin[i], tab.basis()[k]);
            rhs(i) = p.b_eq(row_origin[i]);
        }
        const Eigen::VectorXd xb = B.fullPivLu().solve(rhs);
        for (int k = 0; k < r; ++k) sol.x(tab.basis()[k]) = std::max(0.0, xb(k));
    }
    sol.value = p.c.dot(sol.x);
    return sol;
}

}  // namespace hardyqkd::solvers
