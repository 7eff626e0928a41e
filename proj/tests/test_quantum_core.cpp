#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "hardyqkd/quantum_core.hpp"
#include "oracles.hpp"

using namespace hardyqkd;

namespace {

const double a_opt = hardy::optimal_alpha;

Behavior hardy_behavior(double a, double b) {
    return born_behavior(noisy_state(1.0, hardy_state(a, b)), local_bases(a, b));
}

}  // namespace

TEST(QuantumCore, ConstantsMatchClosedForms) {
    EXPECT_NEAR(hardy::q_max, (5 * std::sqrt(5.0) - 11) / 2, 1e-15);
    EXPECT_NEAR(hardy::q_max, 0.0901699437, 1e-9);
    EXPECT_NEAR(hardy::q_tilde, 0.2360679775, 1e-9);
    EXPECT_NEAR(hardy::nonuniform_r, 0.6180339887, 1e-9);
}

TEST(QuantumCore, HardyOptimumValues) {
    const auto p = hardy_behavior(a_opt, a_opt);
    EXPECT_NEAR(p.p(0, 0, 0, 0), (5 * std::sqrt(5.0) - 11) / 2, 1e-10);
    EXPECT_NEAR(p.p(0, 0, 1, 1), std::sqrt(5.0) - 2, 1e-10);
    EXPECT_NEAR(p.p(0, 0, 1, 0), 0.0, 1e-10);
    EXPECT_NEAR(p.p(0, 0, 0, 1), 0.0, 1e-10);
    EXPECT_NEAR(p.p(1, 1, 1, 1), 0.0, 1e-10);
}

TEST(QuantumCore, HalfAlphaGivesOneTwelfth) {
    const double a = 1.0 / std::sqrt(2.0);
    EXPECT_NEAR(q_value(a, a), 1.0 / 12.0, 1e-10);
    EXPECT_NEAR(hardy_behavior(a, a).p(0, 0, 0, 0), 1.0 / 12.0, 1e-10);
    EXPECT_NEAR(oracle::q_closed_form(a, a), 1.0 / 12.0, 1e-12);
}

TEST(QuantumCore, QValueGridMaximum) {
    double best = -1, ba = 0, bb = 0;
    for (int i = 1; i <= 100; ++i)
        for (int j = 1; j <= 100; ++j) {
            const double a = i / 101.0, b = j / 101.0;
            const double q = q_value(a, b);
            if (q > best) best = q, ba = a, bb = b;
        }
    EXPECT_NEAR(ba, a_opt, 1.0 / 101);
    EXPECT_NEAR(bb, a_opt, 1.0 / 101);
    EXPECT_LE(best, hardy::q_max + 1e-15);
}

TEST(QuantumCore, OutOfRangeAlpha) {
    for (double a : {0.0, 1.0, 1.5, -1.2}) {
        try {
            (void)q_value(a, 0.5);
            FAIL() << "alpha " << a << " accepted";
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::parameter_out_of_range);
            EXPECT_TRUE(e.is_config_error());
        }
    }
}

TEST(QuantumCore, UniquenessDimension) {
    EXPECT_EQ(uniqueness_check(local_bases(a_opt, a_opt)), 1);
    EXPECT_EQ(uniqueness_check(local_bases(1 / std::sqrt(2.0), 1 / std::sqrt(2.0))), 1);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    for (int k = 0; k < 50; ++k) EXPECT_EQ(uniqueness_check(local_bases(u(rng), u(rng))), 1);
}

TEST(QuantumCore, NoisyStateSpectrum) {
    const auto psi = hardy_state(a_opt, a_opt);
    auto ev = noisy_state(0.0, psi).eigenvalues();
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(ev(i), 0.25, 1e-12);
    EXPECT_NEAR(noisy_state(1.0, psi).purity(), 1.0, 1e-12);
    ev = noisy_state(0.5, psi).eigenvalues();
    std::sort(ev.data(), ev.data() + 4);
    EXPECT_NEAR(ev(0), 0.125, 1e-10);
    EXPECT_NEAR(ev(1), 0.125, 1e-10);
    EXPECT_NEAR(ev(2), 0.125, 1e-10);
    EXPECT_NEAR(ev(3), 0.625, 1e-10);
    EXPECT_THROW(noisy_state(1.1, psi), Error);
}

TEST(QuantumCore, BornBehaviorExamples) {
    const auto m = local_bases(a_opt, a_opt);
    const auto mixed = born_behavior(DensityMatrix(ComplexMatrix::Identity(4, 4) / 4.0), m);
    for (double v : mixed.cells) EXPECT_NEAR(v, 0.25, 1e-12);
    for (double eta : {0.0, 0.3, 0.8, 1.0})
        EXPECT_NEAR(hardy_setup_behavior(eta).p(0, 0, 1, 0), (1 - eta) / 4, 1e-10);
}

TEST(QuantumCoreProperty, GramSchmidtOrthonormal) {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g;
    for (int seed = 0; seed < 120; ++seed) {
        const int d = 2 + seed % 5, k = 1 + seed % d;
        std::vector<StateVector> in;
        for (int i = 0; i < k; ++i) {
            Eigen::VectorXcd v(d);
            for (int j = 0; j < d; ++j) v(j) = {g(rng), g(rng)};
            in.push_back(StateVector::normalized(v));
        }
        const auto out = gram_schmidt(in);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j)
                EXPECT_NEAR(std::abs(out[i].inner(out[j]) - (i == j ? 1.0 : 0.0)), 0.0, 1e-12);
    }
}

TEST(QuantumCoreProperty, GramSchmidtDetectsDependence) {
    Eigen::VectorXcd v(2);
    v << 1, 0;
    const std::vector<StateVector> in{StateVector(v), StateVector(v)};
    try {
        (void)gram_schmidt(in);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::linear_dependence);
    }
}

TEST(QuantumCoreProperty, HardyZerosAndClosedFormOnGrid) {
    for (int i = 1; i <= 20; ++i)
        for (int j = 1; j <= 20; ++j) {
            const double a = i / 21.0, b = j / 21.0;
            const auto p = hardy_behavior(a, b);
            EXPECT_LE(std::abs(p.p(0, 0, 1, 0)), 1e-10);
            EXPECT_LE(std::abs(p.p(0, 0, 0, 1)), 1e-10);
            EXPECT_LE(std::abs(p.p(1, 1, 1, 1)), 1e-10);
            EXPECT_NEAR(p.p(0, 0, 0, 0), q_value(a, b), 1e-10);
            EXPECT_NEAR(q_value(a, b), oracle::q_closed_form(a, b), 1e-12);
        }
}

TEST(QuantumCoreProperty, RandomStatesGiveValidBehaviors) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.05, 0.95), ph(0, 2 * M_PI);
    for (int k = 0; k < 100; ++k) {
        const auto m = local_bases(std::polar(u(rng), ph(rng)), std::polar(u(rng), ph(rng)));
        const auto p = born_behavior(DensityMatrix(oracle::random_density(rng)), m);
        EXPECT_TRUE(p.is_normalized());
        EXPECT_TRUE(p.is_no_signaling());
        for (double v : p.cells) EXPECT_GE(v, -1e-12);
    }
}

TEST(QuantumCoreProperty, NoisyStateLinearity) {
    const auto m = local_bases(a_opt, a_opt);
    const auto psi = hardy_state(a_opt, a_opt);
    const auto pure = born_behavior(noisy_state(1.0, psi), m);
    for (int k = 0; k <= 10; ++k) {
        const double eta = k / 10.0;
        const auto p = born_behavior(noisy_state(eta, psi), m);
        for (int c = 0; c < 16; ++c) EXPECT_NEAR(p.cells[c], (1 - eta) * 0.25 + eta * pure.cells[c], 1e-12);
    }
}

TEST(QuantumCoreProperty, MatrixPredicates) {
    const auto m = local_bases(0.4, 0.7);
    for (auto party : {Party::A, Party::B})
        for (int s = 0; s < 2; ++s) {
            const ComplexMatrix p0 = m.projector(party, s, 0), p1 = m.projector(party, s, 1);
            EXPECT_TRUE(is_hermitian(p0));
            EXPECT_TRUE(is_idempotent(p0));
            EXPECT_NEAR((p0 + p1 - ComplexMatrix::Identity(2, 2)).norm(), 0.0, 1e-12);
        }
    ComplexMatrix h(2, 2);
    h << 1, 1, 1, -1;
    EXPECT_TRUE(is_unitary(h / std::sqrt(2.0)));
    EXPECT_FALSE(is_unitary(h));
    EXPECT_EQ(kron(h, h).rows(), 4);
}
