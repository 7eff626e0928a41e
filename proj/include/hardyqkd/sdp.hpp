#pragma once

// Dense primal-dual interior-point solver for single-block semidefinite programs
//
//     minimize   <C, X> + offset
//     subject to <A_i, X> = b_i,   i = 1..m
//                X  positive semidefinite
//
// with dual   maximize b'y + offset  subject to  Z = C - sum_i y_i A_i  PSD.
// Search directions use Nesterov-Todd scaling with a Mehrotra predictor-corrector.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hardyqkd/error.hpp"

namespace hardyqkd::solvers {

enum class Sense { minimize, maximize };

struct SymEntry {
    int row;
    int col;
    double value;
};

/// Sparse symmetric matrix. Each stored entry (i, j) with i <= j stands for
/// both (i, j) and (j, i).
class SymmetricSparse {
public:
    void add(int i, int j, double v) {
        if (i > j) std::swap(i, j);
        for (auto& e : entries_)
            if (e.row == i && e.col == j) {
                e.value += v;
                return;
            }
        entries_.push_back({i, j, v});
    }

    const std::vector<SymEntry>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }

    double dot(const Eigen::MatrixXd& x) const {
        double s = 0.0;
        for (const auto& e : entries_)
            s += e.row == e.col ? e.value * x(e.row, e.row) : e.value * (x(e.row, e.col) + x(e.col, e.row));
        return s;
    }

    void add_to(Eigen::MatrixXd& m, double scale) const {
        for (const auto& e : entries_) {
            m(e.row, e.col) += scale * e.value;
            if (e.row != e.col) m(e.col, e.row) += scale * e.value;
        }
    }

    Eigen::MatrixXd to_dense(int n) const {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
        add_to(m, 1.0);
        return m;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (const auto& e : entries_) s += (e.row == e.col ? 1.0 : 2.0) * e.value * e.value;
        return std::sqrt(s);
    }

    static SymmetricSparse from_dense(const Eigen::MatrixXd& m, double drop = 0.0) {
        SymmetricSparse s;
        for (int j = 0; j < m.cols(); ++j)
            for (int i = 0; i <= j; ++i)
                if (std::abs(m(i, j)) > drop) s.entries_.push_back({i, j, m(i, j)});
        return s;
    }

private:
    std::vector<SymEntry> entries_;
};

struct SDPProblem {
    int n = 0;
    Eigen::MatrixXd C;
    std::vector<SymmetricSparse> A;
    Eigen::VectorXd b;
    Sense sense = Sense::minimize;
    double offset = 0.0;

    int num_constraints() const { return static_cast<int>(A.size()); }

    double objective(const Eigen::MatrixXd& x) const { return (C.cwiseProduct(x)).sum() + offset; }

    void validate() const {
        if (n <= 0) throw Error(ErrorCode::invalid_argument, "SDP block dimension must be positive");
        if (C.rows() != n || C.cols() != n) throw Error(ErrorCode::invalid_argument, "SDP objective has wrong shape");
        if ((C - C.transpose()).cwiseAbs().maxCoeff() > 1e-12)
            throw Error(ErrorCode::invalid_argument, "SDP objective matrix is not symmetric");
        if (static_cast<Eigen::Index>(A.size()) != b.size())
            throw Error(ErrorCode::invalid_argument, "SDP constraint count differs from |b|");
        for (const auto& a : A)
            for (const auto& e : a.entries())
                if (e.row < 0 || e.col >= n) throw Error(ErrorCode::invalid_argument, "SDP constraint index out of range");
        if (!C.allFinite() || !b.allFinite()) throw Error(ErrorCode::invalid_argument, "SDP data not finite");
    }
};

enum class SdpStatus { optimal, infeasible, unbounded, max_iterations, numerical_breakdown };

inline const char* to_string(SdpStatus s) {
    switch (s) {
        case SdpStatus::optimal: return "optimal";
        case SdpStatus::infeasible: return "infeasible";
        case SdpStatus::unbounded: return "unbounded";
        case SdpStatus::max_iterations: return "max-iterations";
        case SdpStatus::numerical_breakdown: return "numerical-breakdown";
    }
    return "unknown";
}

struct SdpIterate {
    int iteration;
    double primal_objective;  // internal minimization form
    double dual_objective;
    double primal_residual;
    double dual_residual;
    double complementarity;   // <X, Z>
};

/// X is the primal matrix. y and Z refer to the internal minimization form:
/// for a maximization problem they certify the negated objective.
struct SDPSolution {
    SdpStatus status = SdpStatus::max_iterations;
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    Eigen::MatrixXd Z;
    double primal_objective = 0.0;  // in the problem's own sense, offset included
    double dual_objective = 0.0;
    double gap = 0.0;               // relative duality gap
    double primal_residual = 0.0;   // relative
    double dual_residual = 0.0;     // relative
    int iterations = 0;
    std::vector<int> pruned;        // indices of dropped dependent constraints
    std::vector<std::string> warnings;
    std::vector<SdpIterate> history;

    double accuracy() const { return std::max({gap, primal_residual, dual_residual}); }

    /// Bound certified by the dual: an upper bound for maximization, a lower
    /// bound for minimization.
    double certified_bound() const { return dual_objective; }
};

struct SdpOptions {
    double tol = 1e-8;
    int max_iter = 200;
    bool keep_history = false;
    double divergence = 1e10;
};

namespace detail {

inline Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

/// Largest step in [0, inf) keeping chol-factored M + a*D PSD.
inline double max_step(const Eigen::LLT<Eigen::MatrixXd>& chol, const Eigen::MatrixXd& d) {
    const Eigen::MatrixXd l_inv_d = chol.matrixL().solve(d);
    const Eigen::MatrixXd s = chol.matrixL().solve(l_inv_d.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrize(s), Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    return lmin < 0.0 ? -1.0 / lmin : std::numeric_limits<double>::infinity();
}

/// Drops constraints whose svec is a linear combination of earlier ones.
/// Returns false when a dropped constraint contradicts the kept ones.
inline bool prune_dependent(const SDPProblem& p, std::vector<int>& kept, std::vector<int>& dropped) {
    const int n = p.n;
    const int m = p.num_constraints();
    kept.clear();
    dropped.clear();
    if (m == 0) return true;
    const int dim = n * (n + 1) / 2;
    auto svec_index = [n](int i, int j) { return j * (j + 1) / 2 + i; };  // i <= j
    Eigen::MatrixXd cols = Eigen::MatrixXd::Zero(dim, m);
    for (int k = 0; k < m; ++k)
        for (const auto& e : p.A[k].entries())
            cols(svec_index(e.row, e.col), k) += e.row == e.col ? e.value : std::sqrt(2.0) * e.value;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(cols);
    qr.setThreshold(1e-10);
    const int rank = static_cast<int>(qr.rank());
    if (rank == m) {
        for (int k = 0; k < m; ++k) kept.push_back(k);
        return true;
    }
    for (int k = 0; k < rank; ++k) kept.push_back(qr.colsPermutation().indices()(k));
    std::sort(kept.begin(), kept.end());
    Eigen::MatrixXd basis(dim, rank);
    Eigen::VectorXd bk(rank);
    for (int k = 0; k < rank; ++k) {
        basis.col(k) = cols.col(kept[k]);
        bk(k) = p.b(kept[k]);
    }
    const auto basis_qr = basis.colPivHouseholderQr();
    bool consistent = true;
    for (int k = 0; k < m; ++k) {
        if (std::binary_search(kept.begin(), kept.end(), k)) continue;
        dropped.push_back(k);
        const Eigen::VectorXd coef = basis_qr.solve(cols.col(k));
        const double implied = coef.dot(bk);
        if (std::abs(implied - p.b(k)) > 1e-8 * (1.0 + std::abs(p.b(k)) + coef.cwiseAbs().sum())) consistent = false;
    }
    return consistent;
}

}  // namespace detail

inline SDPSolution sdp_solve(const SDPProblem& problem, const SdpOptions& opt = {}) {
    using Eigen::MatrixXd;
    using Eigen::VectorXd;
    problem.validate();

    SDPSolution sol;
    std::vector<int> kept, dropped;
    const bool consistent = detail::prune_dependent(problem, kept, dropped);
    sol.pruned = dropped;
    if (!dropped.empty())
        sol.warnings.push_back("pruned " + std::to_string(dropped.size()) + " linearly dependent constraints");

    const int n = problem.n;
    const int m = static_cast<int>(kept.size());
    const double sign = problem.sense == Sense::maximize ? -1.0 : 1.0;
    const MatrixXd C = sign * problem.C;
    std::vector<const SymmetricSparse*> A;
    VectorXd b(m);
    for (int k = 0; k < m; ++k) {
        A.push_back(&problem.A[kept[k]]);
        b(k) = problem.b(kept[k]);
    }

    auto apply_A = [&](const MatrixXd& x) {
        VectorXd out(m);
        for (int k = 0; k < m; ++k) out(k) = A[k]->dot(x);
        return out;
    };
    auto apply_At = [&](const VectorXd& y) {
        MatrixXd out = MatrixXd::Zero(n, n);
        for (int k = 0; k < m; ++k) A[k]->add_to(out, y(k));
        return out;
    };

    const double norm_b = b.norm();
    const double norm_c = C.norm();
    double max_norm_a = 0.0, xi = std::max(10.0, std::sqrt(static_cast<double>(n)));
    for (int k = 0; k < m; ++k) {
        const double na = A[k]->frobenius_norm();
        max_norm_a = std::max(max_norm_a, na);
        xi = std::max(xi, n * (1.0 + std::abs(b(k))) / (1.0 + na));
    }
    const double zeta = std::max({10.0, std::sqrt(static_cast<double>(n)), max_norm_a, norm_c});

    MatrixXd X = xi * MatrixXd::Identity(n, n);
    MatrixXd Z = zeta * MatrixXd::Identity(n, n);
    VectorXd y = VectorXd::Zero(m);

    struct Best {
        double accuracy = std::numeric_limits<double>::infinity();
        MatrixXd X, Z;
        VectorXd y;
        double pobj = 0, dobj = 0, gap = 0, pinf = 0, dinf = 0;
        int iteration = 0;
    } best;

    auto finish = [&](SdpStatus status, const MatrixXd& x, const VectorXd& yy, const MatrixXd& z, double pobj,
                      double dobj, double gap, double pinf, double dinf, int iters) {
        sol.status = status;
        sol.X = x;
        sol.Z = z;
        sol.y = VectorXd::Zero(problem.num_constraints());
        for (int k = 0; k < m; ++k) sol.y(kept[k]) = yy(k);
        sol.primal_objective = sign * pobj + problem.offset;
        sol.dual_objective = sign * dobj + problem.offset;
        sol.gap = gap;
        sol.primal_residual = pinf;
        sol.dual_residual = dinf;
        sol.iterations = iters;
        return sol;
    };

    if (!consistent) {
        sol.warnings.push_back("dependent constraints have inconsistent right-hand sides");
        return finish(SdpStatus::infeasible, X, y, Z, 0, 0, 1, 1, 1, 0);
    }

    int stall = 0;
    double last_best = best.accuracy;
    for (int iter = 0;; ++iter) {
        const VectorXd rp = b - apply_A(X);
        const MatrixXd Rd = detail::symmetrize(C - Z - apply_At(y));
        const double pobj = (C.cwiseProduct(X)).sum();
        const double dobj = b.dot(y);
        const double xz = (X.cwiseProduct(Z)).sum();
        const double mu = xz / n;
        const double pinf = rp.norm() / (1.0 + norm_b);
        const double dinf = Rd.norm() / (1.0 + norm_c);
        const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
        const double comp = xz / (1.0 + std::abs(pobj) + std::abs(dobj));
        const double acc = std::max({gap, comp, pinf, dinf});
        if (opt.keep_history) sol.history.push_back({iter, pobj, dobj, pinf, dinf, xz});

        if (acc < best.accuracy) {
            best = {acc, X, Z, y, pobj, dobj, std::max(gap, comp), pinf, dinf, iter};
        }
        if (acc <= opt.tol) return finish(SdpStatus::optimal, X, y, Z, pobj, dobj, std::max(gap, comp), pinf, dinf, iter);

        if (std::max(y.norm(), Z.norm()) > opt.divergence && pinf > opt.tol)
            return finish(SdpStatus::infeasible, X, y, Z, pobj, dobj, std::max(gap, comp), pinf, dinf, iter);
        if (X.norm() > opt.divergence && dinf > opt.tol)
            return finish(SdpStatus::unbounded, X, y, Z, pobj, dobj, std::max(gap, comp), pinf, dinf, iter);

        auto best_exit = [&](SdpStatus status) {
            return finish(status, best.X, best.y, best.Z, best.pobj, best.dobj, best.gap, best.pinf, best.dinf, iter);
        };
        if (iter >= opt.max_iter) return best_exit(SdpStatus::max_iterations);
        if (best.accuracy < 0.5 * last_best) {
            last_best = best.accuracy;
            stall = 0;
        } else if (++stall > 25) {
            return best_exit(SdpStatus::max_iterations);
        }

        // Nesterov-Todd scaling: W = G G^T with G^{-1} X G^{-T} = G^T Z G = diag(v).
        Eigen::LLT<MatrixXd> chol_x(X);
        if (chol_x.info() != Eigen::Success) return best_exit(SdpStatus::numerical_breakdown);
        const MatrixXd L = chol_x.matrixL();
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(detail::symmetrize(L.transpose() * Z * L));
        const VectorXd d = es.eigenvalues();
        if (d.minCoeff() <= 0.0) return best_exit(SdpStatus::numerical_breakdown);
        const MatrixXd& U = es.eigenvectors();
        const VectorXd d_m14 = d.array().pow(-0.25);
        const VectorXd d_p14 = d.array().pow(0.25);
        const VectorXd v = d.array().sqrt();
        const MatrixXd G = L * U * d_m14.asDiagonal();
        const MatrixXd L_inv = chol_x.matrixL().solve(MatrixXd::Identity(n, n));
        const MatrixXd G_inv = d_p14.asDiagonal() * U.transpose() * L_inv;
        const MatrixXd W = detail::symmetrize(G * G.transpose());

        // Schur complement M_ij = <A_i, W A_j W>.
        MatrixXd M(m, m);
        {
            MatrixXd T(n, n);
            for (int j = 0; j < m; ++j) {
                T.setZero();
                for (const auto& e : A[j]->entries()) {
                    if (e.row == e.col) {
                        T.noalias() += e.value * W.col(e.row) * W.col(e.row).transpose();
                    } else {
                        T.noalias() += e.value * W.col(e.row) * W.col(e.col).transpose();
                        T.noalias() += e.value * W.col(e.col) * W.col(e.row).transpose();
                    }
                }
                for (int i = 0; i < m; ++i) M(i, j) = A[i]->dot(T);
            }
        }
        M = detail::symmetrize(M);
        Eigen::LDLT<MatrixXd> schur(M);
        if (schur.info() != Eigen::Success) {
            M.diagonal().array() += 1e-14 * (1.0 + M.diagonal().cwiseAbs().maxCoeff());
            schur.compute(M);
            if (schur.info() != Eigen::Success) return best_exit(SdpStatus::numerical_breakdown);
        }

        const VectorXd a_wrdw = apply_A(W * Rd * W);
        auto direction = [&](const MatrixXd& Rc, MatrixXd& dX, VectorXd& dy, MatrixXd& dZ) {
            const VectorXd rhs = rp - apply_A(Rc) + a_wrdw;
            dy = schur.solve(rhs);
            dZ = detail::symmetrize(Rd - apply_At(dy));
            dX = detail::symmetrize(Rc - W * dZ * W);
        };

        Eigen::LLT<MatrixXd> chol_z(Z);
        if (chol_z.info() != Eigen::Success) return best_exit(SdpStatus::numerical_breakdown);

        MatrixXd dX, dZ;
        VectorXd dy;
        direction(-X, dX, dy, dZ);
        const double ap_aff = std::min(1.0, detail::max_step(chol_x, dX));
        const double ad_aff = std::min(1.0, detail::max_step(chol_z, dZ));
        const double xz_aff = ((X + ap_aff * dX).cwiseProduct(Z + ad_aff * dZ)).sum();
        const double sigma = std::clamp(std::pow(std::max(xz_aff, 0.0) / xz, 3.0), 0.0, 1.0);

        const MatrixXd dXs = G_inv * dX * G_inv.transpose();
        const MatrixXd dZs = G.transpose() * dZ * G;
        const MatrixXd Tc = dXs * dZs + dZs * dXs;
        MatrixXd Rcs(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                Rcs(i, j) = ((i == j ? 2.0 * (sigma * mu - v(i) * v(i)) : 0.0) - Tc(i, j)) / (v(i) + v(j));
        direction(detail::symmetrize(G * Rcs * G.transpose()), dX, dy, dZ);

        const double ap_max = detail::max_step(chol_x, dX);
        const double ad_max = detail::max_step(chol_z, dZ);
        const double tau = 0.9 + 0.09 * std::min(ap_aff, ad_aff);
        const double ap = std::min(1.0, tau * ap_max);
        const double ad = std::min(1.0, tau * ad_max);
        if (ap < 1e-12 && ad < 1e-12) return best_exit(SdpStatus::numerical_breakdown);

        X = detail::symmetrize(X + ap * dX);
        y += ad * dy;
        Z = detail::symmetrize(Z + ad * dZ);
    }
}

struct CertificateCheck {
    bool ok = false;
    double primal_residual = 0.0;  // relative
    double dual_residual = 0.0;    // relative
    double x_min_eigenvalue = 0.0;
    double z_min_eigenvalue = 0.0;
    double gap = 0.0;              // relative
};

/// Recomputes residuals, eigenvalue floors and the gap from the raw problem data.
inline CertificateCheck verify_certificate(const SDPProblem& p, const SDPSolution& s, double tol = 1e-6) {
    CertificateCheck c;
    const double sign = p.sense == Sense::maximize ? -1.0 : 1.0;
    const Eigen::MatrixXd C = sign * p.C;
    Eigen::VectorXd rp(p.num_constraints());
    Eigen::MatrixXd aty = Eigen::MatrixXd::Zero(p.n, p.n);
    for (int k = 0; k < p.num_constraints(); ++k) {
        rp(k) = p.b(k) - p.A[k].dot(s.X);
        p.A[k].add_to(aty, s.y(k));
    }
    c.primal_residual = rp.norm() / (1.0 + p.b.norm());
    c.dual_residual = (C - aty - s.Z).norm() / (1.0 + C.norm());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ex(s.X, Eigen::EigenvaluesOnly), ez(s.Z, Eigen::EigenvaluesOnly);
    c.x_min_eigenvalue = ex.eigenvalues().minCoeff();
    c.z_min_eigenvalue = ez.eigenvalues().minCoeff();
    const double pobj = (C.cwiseProduct(s.X)).sum();
    const double dobj = p.b.dot(s.y);
    c.gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    c.ok = c.primal_residual <= tol && c.dual_residual <= tol && c.gap <= tol && c.x_min_eigenvalue >= -1e-8 &&
           c.z_min_eigenvalue >= -1e-8;
    return c;
}

}  // namespace hardyqkd::solvers
