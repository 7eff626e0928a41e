#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "hardyqkd/npa.hpp"
#include "oracles.hpp"

using namespace hardyqkd;
using namespace hardyqkd::npa;

namespace {

const double q_max = hardy::q_max;

std::vector<FunctionalEquality> hardy_zero_equalities() {
    return {{LinearFunctional::single_cell(0, 0, 1, 0), 0.0},
            {LinearFunctional::single_cell(0, 0, 0, 1), 0.0},
            {LinearFunctional::single_cell(1, 1, 1, 1), 0.0}};
}

std::vector<FunctionalEquality> hardy_h_equalities(double eta) {
    const double n = (1 - eta) / 4;
    return {{LinearFunctional::single_cell(0, 0, 0, 0), eta * q_max + n},
            {LinearFunctional::single_cell(0, 0, 1, 0), n},
            {LinearFunctional::single_cell(0, 0, 0, 1), n},
            {LinearFunctional::single_cell(1, 1, 1, 1), n}};
}

ComplexMatrix word_operator(const std::vector<Symbol>& w, const MeasurementSet& m) {
    ComplexMatrix op = ComplexMatrix::Identity(4, 4);
    const ComplexMatrix id = ComplexMatrix::Identity(2, 2);
    for (const auto& s : w) {
        const ComplexMatrix local = m.projector(s.party, s.setting, s.outcome);
        op = op * (s.party == Party::A ? kron(local, id) : kron(id, local));
    }
    return op;
}

}  // namespace

TEST(Npa, MonomialBasisLevels) {
    const auto l1 = monomial_basis(1);
    ASSERT_EQ(l1.size(), 5u);
    std::set<std::string> names;
    for (const auto& m : l1) names.insert(m.to_string());
    EXPECT_EQ(names, (std::set<std::string>{"1", "A0", "A1", "B0", "B1"}));
    for (int level = 1; level <= 3; ++level) EXPECT_TRUE(monomial_basis(level).front().is_identity());

    // Enumeration oracle for level 2.
    const std::array<Symbol, 4> gens{{{Party::A, 0, 0}, {Party::A, 1, 0}, {Party::B, 0, 0}, {Party::B, 1, 0}}};
    std::set<std::string> want{"1"};
    for (const auto& s : gens) want.insert(Monomial::canonical({s}).to_string());
    for (const auto& s : gens)
        for (const auto& t : gens) {
            const auto m = Monomial::canonical({s, t});
            if (!m.is_zero()) want.insert(m.to_string());
        }
    std::set<std::string> got;
    for (const auto& m : monomial_basis(2)) {
        got.insert(m.to_string());
        const auto& w = m.word();
        for (std::size_t i = 1; i < w.size(); ++i) EXPECT_FALSE(w[i] == w[i - 1]);
    }
    EXPECT_EQ(got, want);
    EXPECT_TRUE(got.count("A0A1"));
    EXPECT_TRUE(got.count("B0B1"));
    EXPECT_TRUE(got.count("A0B0"));
    EXPECT_EQ(got.size(), monomial_basis(2).size());
}

TEST(Npa, UnsupportedLevel) {
    for (int level : {0, 4}) {
        try {
            (void)monomial_basis(level);
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::unsupported_level);
        }
    }
}

TEST(Npa, CanonicalRules) {
    const Symbol a0{Party::A, 0, 0}, a1{Party::A, 1, 0}, b0{Party::B, 0, 0}, a0o1{Party::A, 0, 1};
    EXPECT_EQ(Monomial::canonical({b0, a0}).to_string(), "A0B0");
    EXPECT_EQ(Monomial::canonical({a0, a0, a1}).to_string(), "A0A1");
    EXPECT_TRUE(Monomial::canonical({a0, a0o1}).is_zero());
    EXPECT_TRUE(Monomial::canonical({a0, b0, a0o1}).is_zero());
}

TEST(NpaProperty, CanonicalizationIdempotent) {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> bit(0, 1), len(0, 6);
    for (int k = 0; k < 2000; ++k) {
        std::vector<Symbol> w(len(rng));
        for (auto& s : w) s = {bit(rng) ? Party::A : Party::B, bit(rng), bit(rng)};
        const auto once = Monomial::canonical(w);
        const auto twice = once.is_zero() ? once : Monomial::canonical(once.word());
        EXPECT_EQ(once, twice);
    }
}

TEST(NpaProperty, LayoutSymmetric) {
    for (int level = 1; level <= 3; ++level) {
        const auto& lay = layout_for(level);
        EXPECT_EQ(lay.class_of(0, 0), lay.identity_class);
        for (int i = 0; i < lay.dim(); ++i)
            for (int j = 0; j < lay.dim(); ++j) EXPECT_EQ(lay.class_of(i, j), lay.class_of(j, i));
    }
}

TEST(NpaProperty, RealizationMomentsFeasible) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.05, 0.95), ph(0, 2 * M_PI);
    for (int k = 0; k < 50; ++k) {
        const auto m = local_bases(std::polar(u(rng), ph(rng)), std::polar(u(rng), ph(rng)));
        const DensityMatrix rho(oracle::random_density(rng));
        for (int level = 1; level <= 2; ++level) {
            const auto& lay = layout_for(level);
            const auto vals = realization_moments(lay, rho, m);
            const Eigen::MatrixXd mm = moment_matrix(lay, vals);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mm);
            EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10);
            // Each entry equals the direct expectation <m_i^dagger m_j>.
            for (int i = 0; i < lay.dim(); ++i)
                for (int j = 0; j < lay.dim(); ++j) {
                    const auto& wi = lay.monomials[i].word();
                    std::vector<Symbol> w(wi.rbegin(), wi.rend());
                    const auto& wj = lay.monomials[j].word();
                    w.insert(w.end(), wj.begin(), wj.end());
                    const double direct = (word_operator(w, m) * rho.matrix()).trace().real();
                    EXPECT_NEAR(mm(i, j), direct, 1e-10);
                }
            // Every cell of the realized behavior is reproduced by the moment expression.
            const auto p = born_behavior(rho, m);
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    for (int x = 0; x < 2; ++x)
                        for (int y = 0; y < 2; ++y) {
                            const auto e = to_moments(LinearFunctional::single_cell(a, b, x, y), lay);
                            EXPECT_NEAR(e.evaluate(vals), p.p(a, b, x, y), 1e-10);
                        }
        }
    }
}

TEST(Npa, TsirelsonLevelOne) {
    const double v = bound_functional(1, std::vector<FunctionalEquality>{}, LinearFunctional::chsh(), Direction::maximize);
    EXPECT_NEAR(v, 2 * std::sqrt(2.0), 1e-4);
}

TEST(Npa, FullyPinnedBehavior) {
    std::vector<FunctionalEquality> eq;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int x = 0; x < 2; ++x)
                for (int y = 0; y < 2; ++y) eq.push_back({LinearFunctional::single_cell(a, b, x, y), 0.25});
    const auto obj = LinearFunctional::single_cell(0, 0, 0, 0);
    EXPECT_NEAR(bound_functional(1, eq, obj, Direction::maximize), 0.25, 1e-7);
    EXPECT_NEAR(bound_functional(1, eq, obj, Direction::minimize), 0.25, 1e-7);
}

TEST(Npa, NuMaxAtHardyPoint) {
    LinearFunctional nu;
    nu.cell(0, 0, 1, 0) = 0.25;
    nu.cell(0, 0, 1, 1) = 0.25;
    const double nu_max = bound_functional(2, hardy_h_equalities(1.0), nu, Direction::maximize);
    const double sigma = 0.25 * q_max;
    EXPECT_NEAR(nu_max / (sigma + nu_max), 0.72361, 1e-3);
}

TEST(Npa, BoundFunctionalExamples) {
    const auto obj = LinearFunctional::single_cell(0, 0, 0, 0);
    const double free_max = bound_functional(2, std::vector<FunctionalEquality>{}, obj, Direction::maximize);
    EXPECT_LE(free_max, 1 + 1e-6);
    EXPECT_GE(free_max, 1 - 1e-4);
    EXPECT_NEAR(bound_functional(2, hardy_zero_equalities(), obj, Direction::maximize), q_max, 2e-3);
    EXPECT_NEAR(bound_functional(2, hardy_zero_equalities(), obj, Direction::minimize), 0.0, 1e-6);
}

TEST(Npa, HardyMaximumByLevel) {
    const auto obj = LinearFunctional::single_cell(0, 0, 0, 0);
    const double l1 = bound_functional(1, hardy_zero_equalities(), obj, Direction::maximize);
    const double l2 = bound_functional(2, hardy_zero_equalities(), obj, Direction::maximize);
    const double l3 = bound_functional(3, hardy_zero_equalities(), obj, Direction::maximize);
    EXPECT_GE(l1, l2 - 1e-7);
    EXPECT_GE(l2, l3 - 1e-7);
    EXPECT_NEAR(l3, q_max, 2e-3);
}

TEST(Npa, FaceReductionMatchesFullProblem) {
    const auto obj = LinearFunctional::single_cell(0, 0, 0, 0);
    const auto eq = hardy_zero_equalities();
    const auto reduced = build_moment_sdp(2, eq, obj, true, true);
    const auto full = build_moment_sdp(2, eq, obj, true, false);
    EXPECT_LT(reduced.problem.n, full.problem.n);
    const auto s = solvers::sdp_solve(reduced.problem);
    ASSERT_EQ(s.status, solvers::SdpStatus::optimal);
    const Eigen::MatrixXd x = reduced.lift(s.X);
    ASSERT_EQ(x.rows(), full.problem.n);
    for (int k = 0; k < full.problem.num_constraints(); ++k)
        EXPECT_NEAR(full.problem.A[k].dot(x), full.problem.b(k), 1e-7);
    EXPECT_NEAR(full.problem.objective(x), s.primal_objective, 1e-7);
}

TEST(NpaProperty, LevelMonotoneOnRandomObjectives) {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g;
    for (int k = 0; k < 20; ++k) {
        LinearFunctional f;
        for (auto& c : f.cells) c = g(rng);
        const std::vector<FunctionalEquality> none;
        const double b1 = bound_functional(1, none, f, Direction::maximize);
        const double b2 = bound_functional(2, none, f, Direction::maximize);
        EXPECT_LE(b2, b1 + 1e-6);
    }
}

TEST(NpaProperty, BoundsDominateHardyRealization) {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g;
    const auto p = hardy_setup_behavior(1.0);
    for (int k = 0; k < 20; ++k) {
        LinearFunctional f;
        for (auto& c : f.cells) c = g(rng);
        const double val = f.evaluate(p);
        for (int level = 1; level <= 2; ++level) {
            EXPECT_GE(bound_functional(level, std::vector<FunctionalEquality>{}, f, Direction::maximize), val - 1e-6);
            EXPECT_LE(bound_functional(level, std::vector<FunctionalEquality>{}, f, Direction::minimize), val + 1e-6);
        }
        EXPECT_GE(bound_functional(2, hardy_h_equalities(1.0), f, Direction::maximize), val - 1e-4);
        EXPECT_LE(bound_functional(2, hardy_h_equalities(1.0), f, Direction::minimize), val + 1e-4);
    }
}

TEST(Npa, InfeasibleConstraints) {
    std::vector<FunctionalEquality> eq{{LinearFunctional::single_cell(0, 0, 0, 0), 0.9},
                                       {LinearFunctional::single_cell(0, 1, 0, 0), 0.9}};
    try {
        (void)bound_functional(2, eq, LinearFunctional::single_cell(0, 0, 1, 1), Direction::maximize);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::infeasible);
    }
}

TEST(Npa, ChshOutcomeGuessExamples) {
    const std::array<double, 4> flat{0.25, 0.25, 0.25, 0.25};
    const double g0 = chsh_outcome_guess_bound(flat, 2 * std::sqrt(2.0), 2);
    EXPECT_NEAR(g0, 0.5, 1e-3);
    EXPECT_NEAR(chsh_outcome_guess_bound(flat, 2.0, 2), 1.0, 1e-6);
    const double p = 0.55;
    const std::array<double, 4> pp{p * p, p * (1 - p), (1 - p) * p, (1 - p) * (1 - p)};
    const double g = chsh_outcome_guess_bound(pp, 2 * std::sqrt(2.0), 2);
    EXPECT_GT(g, 0.5);
    EXPECT_LT(g, 1.0);
    EXPECT_GT(g, g0);
    try {
        (void)chsh_outcome_guess_bound(flat, 3.0, 2);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::infeasible);
    }
}

TEST(Npa, SdpTextRoundTrip) {
    const auto prog = build_moment_sdp(2, hardy_zero_equalities(), LinearFunctional::single_cell(0, 0, 0, 0), true);
    std::stringstream ss;
    write_sdp_text(ss, prog.problem);
    const auto back = read_sdp_text(ss);
    ASSERT_EQ(back.n, prog.problem.n);
    ASSERT_EQ(back.num_constraints(), prog.problem.num_constraints());
    EXPECT_EQ(back.sense, prog.problem.sense);
    EXPECT_NEAR((back.C - prog.problem.C).norm(), 0.0, 1e-15);
    EXPECT_NEAR((back.b - prog.problem.b).norm(), 0.0, 1e-15);
    for (int k = 0; k < back.num_constraints(); ++k)
        EXPECT_NEAR((back.A[k].to_dense(back.n) - prog.problem.A[k].to_dense(back.n)).norm(), 0.0, 1e-15);
}
