#pragma once

// Device-independent bounds on Eve's knowledge of Alice's setting, the
// decomposition programs over tabulated bounds, and key rates.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "hardyqkd/error.hpp"
#include "hardyqkd/lp.hpp"
#include "hardyqkd/npa.hpp"
#include "hardyqkd/protocol.hpp"
#include "hardyqkd/quantum_core.hpp"

namespace hardyqkd::analysis {

inline constexpr int default_level = 2;

/// Numerator and denominator split of P(A=0 | a=b=0).
struct Posterior {
    double sigma;
    double nu;
    double p0() const { return sigma / (sigma + nu); }
    double p1() const { return nu / (sigma + nu); }
};

inline Posterior posterior_terms(const Behavior& p, const SettingsDistribution& d) {
    return {p.p(0, 0, 0, 0) * d.joint(0, 0) + p.p(0, 0, 0, 1) * d.joint(0, 1),
            p.p(0, 0, 1, 0) * d.joint(1, 0) + p.p(0, 0, 1, 1) * d.joint(1, 1)};
}

/// (P(A=0|00), P(A=1|00)).
inline std::array<double, 2> bayes_setting_posterior(const Behavior& p, const SettingsDistribution& d) {
    const auto t = posterior_terms(p, d);
    if (!(t.sigma + t.nu > 0.0)) throw Error(ErrorCode::zero_posterior, "sigma + nu vanishes");
    return {t.p0(), t.p1()};
}

/// (pA0, pA1) for the dropping strategy; same quantity as the posterior.
inline std::array<double, 2> dropping_params(const Behavior& p, const SettingsDistribution& d) {
    return bayes_setting_posterior(p, d);
}

/// Equalities pinning the four Hardy cells.
inline std::vector<npa::FunctionalEquality> hardy_equalities(const HVector& h) {
    std::vector<npa::FunctionalEquality> eq;
    for (int k = 0; k < 4; ++k) {
        const auto& c = hardy_cells[k];
        eq.push_back({npa::LinearFunctional::single_cell(c[0], c[1], c[2], c[3]), h[k]});
    }
    return eq;
}

/// Range of P(00|11) over the relaxation with h fixed. Independent of the settings distribution.
struct P11Range {
    double min;
    double max;
};

inline P11Range p11_range(const HVector& h, int level) {
    const auto eq = hardy_equalities(h);
    const auto obj = npa::LinearFunctional::single_cell(0, 0, 1, 1);
    const double lo = npa::bound_functional(level, eq, obj, npa::Direction::minimize);
    const double hi = npa::bound_functional(level, eq, obj, npa::Direction::maximize);
    return {std::clamp(lo, 0.0, 1.0), std::clamp(std::max(hi, lo), 0.0, 1.0)};
}

struct GammaBounds {
    double gamma0;
    double gamma1;
};

/// Below this, sigma or nu counts as zero.
inline constexpr double posterior_floor = 1e-12;

/// Gamma~0 = sup sigma/(sigma+nu), Gamma~1 = sup nu/(sigma+nu) over relaxation points with
/// sigma + nu > 0. When no point yields a = b = 0 both are set to 1.
inline GammaBounds gamma_from_range(const HVector& h, const P11Range& r, const SettingsDistribution& d) {
    const double sigma = h[0] * d.joint(0, 0) + h[2] * d.joint(0, 1);
    const double nu_min = h[1] * d.joint(1, 0) + r.min * d.joint(1, 1);
    const double nu_max = h[1] * d.joint(1, 0) + r.max * d.joint(1, 1);
    if (sigma <= posterior_floor) {
        if (nu_max <= posterior_floor) return {1.0, 1.0};
        return {0.0, 1.0};
    }
    return {std::clamp(sigma / (sigma + nu_min), 0.0, 1.0), std::clamp(nu_max / (sigma + nu_max), 0.0, 1.0)};
}

inline GammaBounds gamma_tilde(const HVector& h, const SettingsDistribution& d, int level = default_level) {
    return gamma_from_range(h, p11_range(h, level), d);
}

/// General two-stage bound: the range of sigma given h, then the range of nu on a
/// grid of sigma values. For Hardy constraints sigma is pinned and this
/// reproduces gamma_tilde.
inline GammaBounds gamma_tilde_two_stage(const HVector& h, const SettingsDistribution& d, int level, int sigma_points) {
    if (sigma_points < 1) throw Error(ErrorCode::invalid_argument, "sigma grid needs at least one point");
    auto eq = hardy_equalities(h);
    npa::LinearFunctional sigma_f, nu_f;
    sigma_f.cell(0, 0, 0, 0) = d.joint(0, 0);
    sigma_f.cell(0, 0, 0, 1) = d.joint(0, 1);
    nu_f.cell(0, 0, 1, 0) = d.joint(1, 0);
    nu_f.cell(0, 0, 1, 1) = d.joint(1, 1);
    const double s_lo = std::max(0.0, npa::bound_functional(level, eq, sigma_f, npa::Direction::minimize));
    const double s_hi = std::max(s_lo, npa::bound_functional(level, eq, sigma_f, npa::Direction::maximize));
    GammaBounds g{0.0, 0.0};
    bool any = false;
    eq.push_back({sigma_f, 0.0});
    for (int k = 0; k < sigma_points; ++k) {
        const double s = sigma_points == 1 ? 0.5 * (s_lo + s_hi) : s_lo + (s_hi - s_lo) * k / (sigma_points - 1);
        eq.back().value = s;
        double n_lo = 0.0, n_hi = 0.0;
        try {
            n_lo = std::max(0.0, npa::bound_functional(level, eq, nu_f, npa::Direction::minimize));
            n_hi = std::max(n_lo, npa::bound_functional(level, eq, nu_f, npa::Direction::maximize));
        } catch (const Error& e) {
            if (e.code() == ErrorCode::infeasible) continue;
            throw;
        }
        any = true;
        if (s <= posterior_floor) {
            g.gamma1 = 1.0;
            if (n_hi <= posterior_floor) g.gamma0 = 1.0;
            continue;
        }
        g.gamma0 = std::max(g.gamma0, s / (s + n_lo));
        g.gamma1 = std::max(g.gamma1, n_hi / (s + n_hi));
    }
    if (!any) throw Error(ErrorCode::infeasible, "no sigma value admits a feasible relaxation");
    return g;
}

struct GammaPoint {
    double eta;  // NaN for points off the setup family
    HVector h;
    P11Range range;
    GammaBounds bounds;
};

struct GammaGrid {
    std::vector<GammaPoint> points;
    int level = default_level;
    SettingsDistribution dist;
    int segment_points = 0;
    int box_resolution = 0;
    int box_rejected = 0;  // box points found infeasible or unsolvable
};

/// No-signaling feasibility of h: a necessary condition for quantum feasibility.
inline bool no_signaling_feasible(const HVector& h) {
    // 16 cells, rows: 4 normalizations, 4 no-signaling, 4 Hardy cells.
    solvers::LPProblem lp;
    lp.A_eq = Eigen::MatrixXd::Zero(12, 16);
    lp.b_eq = Eigen::VectorXd::Zero(12);
    lp.c = Eigen::VectorXd::Zero(16);
    int row = 0;
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) {
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) lp.A_eq(row, Behavior::index(a, b, x, y)) = 1.0;
            lp.b_eq(row++) = 1.0;
        }
    for (int x = 0; x < 2; ++x, ++row)
        for (int b = 0; b < 2; ++b) {
            lp.A_eq(row, Behavior::index(0, b, x, 0)) += 1.0;
            lp.A_eq(row, Behavior::index(0, b, x, 1)) -= 1.0;
        }
    for (int y = 0; y < 2; ++y, ++row)
        for (int a = 0; a < 2; ++a) {
            lp.A_eq(row, Behavior::index(a, 0, 0, y)) += 1.0;
            lp.A_eq(row, Behavior::index(a, 0, 1, y)) -= 1.0;
        }
    for (int k = 0; k < 4; ++k, ++row) {
        const auto& c = hardy_cells[k];
        lp.A_eq(row, Behavior::index(c[0], c[1], c[2], c[3])) = 1.0;
        lp.b_eq(row) = h[k];
    }
    return solvers::lp_solve(lp).status == solvers::LpStatus::optimal;
}

namespace detail {

/// Runs f(i) for i in [0, n) over hardware threads. Each index is handled exactly once.
template <class F>
void parallel_for(std::size_t n, F&& f) {
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers) f(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace detail

/// Bounds along the setup family h(eta), eta = k/(resolution-1), optionally
/// augmented with a feasibility-filtered box grid {0, 1/(r-1), ..., 1}^4.
inline GammaGrid build_gamma_grid(int resolution, const SettingsDistribution& d, int level = default_level,
                                  int box_resolution = 0) {
    if (resolution < 1) throw Error(ErrorCode::invalid_argument, "grid resolution must be positive");
    if (box_resolution == 1 || box_resolution < 0)
        throw Error(ErrorCode::invalid_argument, "box resolution must be 0 (off) or at least 2");
    npa::check_level(level);
    d.validate();
    GammaGrid g;
    g.level = level;
    g.dist = d;
    g.segment_points = resolution;
    g.box_resolution = box_resolution;

    std::vector<GammaPoint> seg(static_cast<std::size_t>(resolution));
    detail::parallel_for(seg.size(), [&](std::size_t i) {
        const double eta = resolution == 1 ? 1.0 : static_cast<double>(i) / (resolution - 1);
        const auto h = HVector::setup(eta);
        const auto r = p11_range(h, level);
        seg[i] = {eta, h, r, gamma_from_range(h, r, d)};
    });
    g.points = std::move(seg);

    if (box_resolution >= 2) {
        std::vector<HVector> cand;
        const int r = box_resolution;
        for (int i0 = 0; i0 < r; ++i0)
            for (int i1 = 0; i1 < r; ++i1)
                for (int i2 = 0; i2 < r; ++i2)
                    for (int i3 = 0; i3 < r; ++i3) {
                        const HVector h{{static_cast<double>(i0) / (r - 1), static_cast<double>(i1) / (r - 1),
                                         static_cast<double>(i2) / (r - 1), static_cast<double>(i3) / (r - 1)}};
                        if (no_signaling_feasible(h)) cand.push_back(h);
                        else ++g.box_rejected;
                    }
        std::vector<std::optional<GammaPoint>> box(cand.size());
        detail::parallel_for(cand.size(), [&](std::size_t i) {
            try {
                const auto rg = p11_range(cand[i], level);
                box[i] = GammaPoint{std::numeric_limits<double>::quiet_NaN(), cand[i], rg, gamma_from_range(cand[i], rg, d)};
            } catch (const Error& e) {
                if (e.code() != ErrorCode::infeasible && e.code() != ErrorCode::solver_failure &&
                    e.code() != ErrorCode::unbounded)
                    throw;
            }
        });
        for (auto& p : box) {
            if (p) g.points.push_back(*p);
            else ++g.box_rejected;
        }
    }
    return g;
}

/// Same points under another settings distribution; P(00|11) ranges are reused.
inline GammaGrid regrid(const GammaGrid& g, const SettingsDistribution& d) {
    d.validate();
    GammaGrid out = g;
    out.dist = d;
    for (auto& p : out.points) p.bounds = gamma_from_range(p.h, p.range, d);
    return out;
}

/// max sum_i u_i c_i  s.t.  sum_i u_i g_i = h, sum_i u_i = 1, u >= 0.
inline double decomposition_lp(const HVector& h, const GammaGrid& grid, const std::vector<double>& coef) {
    const int n = static_cast<int>(grid.points.size());
    if (n == 0) throw Error(ErrorCode::decomposition_infeasible, "empty grid");
    solvers::LPProblem lp;
    lp.sense = solvers::Sense::maximize;
    lp.A_eq = Eigen::MatrixXd::Zero(5, n);
    lp.b_eq = Eigen::VectorXd(5);
    lp.c = Eigen::VectorXd(n);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < 4; ++k) lp.A_eq(k, i) = grid.points[i].h[k];
        lp.A_eq(4, i) = 1.0;
        lp.c(i) = coef[i];
    }
    for (int k = 0; k < 4; ++k) lp.b_eq(k) = h[k];
    lp.b_eq(4) = 1.0;
    const auto sol = solvers::lp_solve(lp);
    if (sol.status == solvers::LpStatus::infeasible)
        throw Error(ErrorCode::decomposition_infeasible, "h lies outside the convex hull of the grid");
    if (sol.status != solvers::LpStatus::optimal)
        throw Error(ErrorCode::solver_failure, std::string("decomposition LP ended with status ") + solvers::to_string(sol.status));
    return sol.value;
}

/// Program maximizing p0 Gamma0(h0) + p1 Gamma1(h1) over p0 h0 + p1 h1 = h.
/// Splitting weight at a grid point between the two terms is linear, so each
/// point contributes max(Gamma~0, Gamma~1).
inline double guess1(const HVector& h, const GammaGrid& grid) {
    std::vector<double> c;
    c.reserve(grid.points.size());
    for (const auto& p : grid.points) c.push_back(std::max(p.bounds.gamma0, p.bounds.gamma1));
    return std::min(1.0, decomposition_lp(h, grid, c));
}

/// Guessing probability among rounds kept after Alice balances her key.
/// Eve's components must reproduce Alice's key-bit frequency pA0. A component
/// with bounds (G0, G1) has P(A=0) anywhere in [1-G1, G0]; both ends enter as
/// columns, once for each bit Eve guesses.
inline double guess2(const HVector& h, const GammaGrid& grid, double pA0, double pA1) {
    if (!(pA0 > 0.0 && pA1 > 0.0))
        throw Error(ErrorCode::parameter_out_of_range, "dropping parameters must be positive");
    const int n = static_cast<int>(grid.points.size());
    if (n == 0) throw Error(ErrorCode::decomposition_infeasible, "empty grid");
    solvers::LPProblem lp;
    lp.sense = solvers::Sense::maximize;
    lp.A_eq = Eigen::MatrixXd::Zero(6, 4 * n);
    lp.b_eq = Eigen::VectorXd(6);
    lp.c = Eigen::VectorXd(4 * n);
    for (int i = 0; i < n; ++i) {
        const auto& pt = grid.points[i];
        const double hi0 = pt.bounds.gamma0, lo0 = std::min(hi0, 1.0 - pt.bounds.gamma1);
        const double a0[4] = {hi0, lo0, lo0, hi0};
        const double gain[4] = {hi0 / pA0, lo0 / pA0, (1.0 - lo0) / pA1, (1.0 - hi0) / pA1};
        for (int j = 0; j < 4; ++j) {
            const int col = 4 * i + j;
            for (int k = 0; k < 4; ++k) lp.A_eq(k, col) = pt.h[k];
            lp.A_eq(4, col) = 1.0;
            lp.A_eq(5, col) = a0[j];
            lp.c(col) = 0.5 * gain[j];
        }
    }
    for (int k = 0; k < 4; ++k) lp.b_eq(k) = h[k];
    lp.b_eq(4) = 1.0;
    lp.b_eq(5) = pA0;
    const auto sol = solvers::lp_solve(lp);
    if (sol.status == solvers::LpStatus::infeasible)
        throw Error(ErrorCode::decomposition_infeasible, "no grid decomposition reproduces h and pA0");
    if (sol.status != solvers::LpStatus::optimal)
        throw Error(ErrorCode::solver_failure, std::string("decomposition LP ended with status ") + solvers::to_string(sol.status));
    return std::min(1.0, sol.value);
}

enum class Strategy { basic, dropping };

inline const char* to_string(Strategy s) { return s == Strategy::basic ? "basic" : "dropping"; }

struct KeyRateReport {
    double eta = 0.0;
    std::string dist_label;
    Strategy strategy = Strategy::basic;
    double p00 = 0.0;     // P(a=0, b=0) under the setup
    double factor = 1.0;  // 1, or 2 min(pA0, pA1) when dropping
    double guess = 1.0;
    double hab = 0.0;
    double raw_rate = 0.0;
    double key_rate = 0.0;
    bool clamped = false;

    double recompute() const { return std::max(0.0, p00 * factor * (-std::log2(guess) - hab)); }
};

inline std::string dist_label(const SettingsDistribution& d) {
    const auto u = SettingsDistribution::uniform();
    const auto n = SettingsDistribution::nonuniform();
    if (d.pA == u.pA && d.pB == u.pB) return "uniform";
    if (d.pA == n.pA && d.pB == n.pB) return "nonuniform";
    return "custom";
}

inline double p00_of(const Behavior& p, const SettingsDistribution& d) {
    double s = 0.0;
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) s += d.joint(x, y) * p.p(0, 0, x, y);
    return s;
}

namespace detail {

inline void check_grid(const GammaGrid& grid, const SettingsDistribution& d) {
    if (grid.dist.pA != d.pA || grid.dist.pB != d.pB)
        throw Error(ErrorCode::invalid_argument, "grid was built for a different settings distribution");
}

inline KeyRateReport finish(KeyRateReport r) {
    r.raw_rate = r.p00 * r.factor * (-std::log2(r.guess) - r.hab);
    r.clamped = r.raw_rate < 0.0;
    r.key_rate = std::max(0.0, r.raw_rate);
    return r;
}

}  // namespace detail

inline KeyRateReport key_rate_basic(double eta, const SettingsDistribution& d, const GammaGrid& grid) {
    detail::check_grid(grid, d);
    const auto p = hardy_setup_behavior(eta);
    KeyRateReport r;
    r.eta = eta;
    r.dist_label = dist_label(d);
    r.strategy = Strategy::basic;
    r.p00 = p00_of(p, d);
    r.guess = guess1(HVector::setup(eta), grid);
    r.hab = conditional_entropy(p, d, false);
    return detail::finish(r);
}

inline KeyRateReport key_rate_dropping(double eta, const SettingsDistribution& d, const GammaGrid& grid) {
    detail::check_grid(grid, d);
    const auto p = hardy_setup_behavior(eta);
    const auto [pa0, pa1] = dropping_params(p, d);
    KeyRateReport r;
    r.eta = eta;
    r.dist_label = dist_label(d);
    r.strategy = Strategy::dropping;
    r.p00 = p00_of(p, d);
    r.factor = 2.0 * std::min(pa0, pa1);
    r.guess = guess2(HVector::setup(eta), grid, pa0, pa1);
    r.hab = conditional_entropy(p, d, true);
    return detail::finish(r);
}

/// r with x r^2 = y (1-r)^2.
inline double nonuniform_ratio(double x, double y) {
    if (!(x > 0.0 && y > 0.0)) throw Error(ErrorCode::parameter_out_of_range, "ratio inputs must be positive");
    return std::sqrt(y) / (std::sqrt(x) + std::sqrt(y));
}

struct BiasRow {
    double epsilon;
    double hardy_guess;
    double chsh_guess;
};

/// Hardy column: noiseless guess under the nonuniform distribution. CHSH column:
/// outcome-guessing bound at the Tsirelson value, averaged over the uniform base's branches.
inline std::vector<BiasRow> bias_compare(const std::vector<double>& epsilons, int level = default_level) {
    std::vector<BiasRow> rows;
    for (double eps : epsilons) {
        const double hardy_g = noiseless_bias_guess(eps, SettingsDistribution::nonuniform());
        const auto model = biased_branches(SettingsDistribution::uniform(), eps);
        double chsh_g = 0.0;
        for (const auto& b : model.branches)
            chsh_g += BiasModel::weight *
                      npa::chsh_outcome_guess_bound({b.joint(0, 0), b.joint(0, 1), b.joint(1, 0), b.joint(1, 1)},
                                                    2.0 * std::sqrt(2.0), level);
        rows.push_back({eps, hardy_g, chsh_g});
    }
    return rows;
}

}  // namespace hardyqkd::analysis
