#pragma once

// Independent reference computations used by the tests. Nothing here calls the
// library code it checks.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

/// q = |aA aB|^2 |bA bB|^2 / (1 - |aA aB|^2) with b = sqrt(1 - a^2), real parameters.
inline double q_closed_form(double a, double b) {
    const double aa = a * a * b * b;
    const double bb = (1.0 - a * a) * (1.0 - b * b);
    return aa * bb / (1.0 - aa);
}

inline double lambda_max(const Eigen::MatrixXd& c) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (c + c.transpose()));
    return es.eigenvalues().maxCoeff();
}

/// Brute-force LP: every basis of m columns, keep the nonnegative basic solutions.
/// Assumes A has full row rank. Returns nullopt when no vertex is feasible.
inline std::optional<double> lp_vertex_max(const Eigen::VectorXd& c, const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
    const int m = static_cast<int>(a.rows()), n = static_cast<int>(a.cols());
    std::optional<double> best;
    std::vector<int> pick(m);
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (__builtin_popcount(mask) != m) continue;
        int k = 0;
        for (int j = 0; j < n; ++j)
            if (mask & (1u << j)) pick[k++] = j;
        Eigen::MatrixXd basis(m, m);
        for (int i = 0; i < m; ++i) basis.col(i) = a.col(pick[i]);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(basis);
        if (lu.rank() < m) continue;
        const Eigen::VectorXd xb = lu.solve(b);
        if (xb.minCoeff() < -1e-11) continue;
        double v = 0.0;
        for (int i = 0; i < m; ++i) v += c(pick[i]) * xb(i);
        if (!best || v > *best) best = v;
    }
    return best;
}

/// H(X|Y) over settings given a = b = 0, summed directly from P(a,b,x,y) = px(x) py(y) P(a,b|x,y).
/// cells are indexed ((a*2+b)*2+x)*2+y.
inline double entropy_settings_given_00(const std::array<double, 16>& cells, double pA, double pB) {
    double joint[2][2];
    double total = 0.0;
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) {
            const double px = x == 0 ? pA : 1.0 - pA, py = y == 0 ? pB : 1.0 - pB;
            joint[x][y] = px * py * cells[x * 2 + y];
            total += joint[x][y];
        }
    double h = 0.0;
    for (int y = 0; y < 2; ++y) {
        const double py = (joint[0][y] + joint[1][y]) / total;
        for (int x = 0; x < 2; ++x) {
            const double pxy = joint[x][y] / total;
            if (pxy > 0.0) h -= pxy * std::log2(pxy / py);
        }
    }
    return h;
}

/// Random density matrix on C^d: G G^dagger / tr, G complex Gaussian.
inline Eigen::MatrixXcd random_density(std::mt19937_64& rng, int d = 4) {
    std::normal_distribution<double> g;
    Eigen::MatrixXcd m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = {g(rng), g(rng)};
    Eigen::MatrixXcd rho = m * m.adjoint();
    rho /= rho.trace().real();
    return 0.5 * (rho + rho.adjoint());
}

}  // namespace oracle
