#pragma once

// Protocol simulation: settings distributions, RNG bias branches, rounds,
// sifting, parameter estimation and setting-entropy bookkeeping.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "hardyqkd/error.hpp"
#include "hardyqkd/quantum_core.hpp"
#include "hardyqkd/rng.hpp"

namespace hardyqkd {

/// Product distribution of settings: P(A=0) = pA, P(B=0) = pB.
struct SettingsDistribution {
    double pA = 0.5;
    double pB = 0.5;

    static SettingsDistribution uniform() { return {0.5, 0.5}; }
    static SettingsDistribution nonuniform() { return {hardy::nonuniform_r, hardy::nonuniform_r}; }

    double alice(int x) const { return x == 0 ? pA : 1.0 - pA; }
    double bob(int y) const { return y == 0 ? pB : 1.0 - pB; }
    double joint(int x, int y) const { return alice(x) * bob(y); }

    void validate() const {
        if (!(pA >= 0.0 && pA <= 1.0 && pB >= 0.0 && pB <= 1.0))
            throw Error(ErrorCode::parameter_out_of_range, "setting probabilities must lie in [0, 1]");
    }
};

/// Four equally likely branches (pA + sA*eps, pB + sB*eps), sA, sB in {+1, -1},
/// ordered (+,+), (+,-), (-,+), (-,-).
struct BiasModel {
    SettingsDistribution base;
    double epsilon = 0.0;
    std::array<SettingsDistribution, 4> branches;

    static constexpr double weight = 0.25;
};

inline BiasModel biased_branches(const SettingsDistribution& base, double epsilon) {
    base.validate();
    if (!(epsilon >= 0.0)) throw Error(ErrorCode::parameter_out_of_range, "epsilon must be nonnegative");
    BiasModel m{base, epsilon, {}};
    int k = 0;
    for (double sa : {1.0, -1.0})
        for (double sb : {1.0, -1.0}) {
            const SettingsDistribution d{base.pA + sa * epsilon, base.pB + sb * epsilon};
            if (d.pA < 0.0 || d.pA > 1.0 || d.pB < 0.0 || d.pB > 1.0)
                throw Error(ErrorCode::epsilon_too_large,
                            "epsilon " + std::to_string(epsilon) + " pushes a branch outside [0, 1]");
            m.branches[k++] = d;
        }
    return m;
}

/// Values of the four Hardy cells: P(00|00), P(00|10), P(00|01), P(11|11).
struct HVector {
    std::array<double, 4> h{};

    double& operator[](int k) { return h[k]; }
    double operator[](int k) const { return h[k]; }

    static HVector of(const Behavior& p) {
        return {{p.p(0, 0, 0, 0), p.p(0, 0, 1, 0), p.p(0, 0, 0, 1), p.p(1, 1, 1, 1)}};
    }

    /// Setup family: h1 = eta q + (1 - eta)/4, h2 = h3 = h4 = (1 - eta)/4.
    static HVector setup(double eta) {
        const double n = (1.0 - eta) / 4.0;
        return {{eta * hardy::q_max + n, n, n, n}};
    }
};

/// (a, b, x, y) of each Hardy cell in HVector order.
inline constexpr std::array<std::array<int, 4>, 4> hardy_cells{{{0, 0, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}, {1, 1, 1, 1}}};

struct RoundRecord {
    std::int64_t index = 0;
    int settingA = 0;
    int settingB = 0;
    int outcomeA = 0;
    int outcomeB = 0;
    bool revealed = false;

    bool operator==(const RoundRecord&) const = default;
};

struct Transcript {
    std::vector<RoundRecord> rounds;
    std::uint64_t seed = 0;
    Behavior behavior;
    std::variant<SettingsDistribution, BiasModel> distribution;
};

/// Each round draws from its own stream keyed by (seed, round index):
/// branch, settings, outcome pair, reveal flag.
inline Transcript simulate(std::int64_t n, const Behavior& behavior,
                           const std::variant<SettingsDistribution, BiasModel>& dist, double reveal_fraction,
                           std::uint64_t seed) {
    if (n <= 0) throw Error(ErrorCode::invalid_argument, "round count must be positive");
    if (!(reveal_fraction >= 0.0 && reveal_fraction <= 1.0))
        throw Error(ErrorCode::parameter_out_of_range, "reveal fraction must lie in [0, 1]");
    Transcript t;
    t.seed = seed;
    t.behavior = behavior;
    t.distribution = dist;
    t.rounds.resize(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
        rng::Stream s(seed, static_cast<std::uint64_t>(i));
        const double u_branch = s.uniform();
        SettingsDistribution d;
        if (const auto* m = std::get_if<BiasModel>(&dist))
            d = m->branches[std::min(3, static_cast<int>(u_branch * 4.0))];
        else
            d = std::get<SettingsDistribution>(dist);
        RoundRecord& r = t.rounds[static_cast<std::size_t>(i)];
        r.index = i;
        r.settingA = s.uniform() < d.pA ? 0 : 1;
        r.settingB = s.uniform() < d.pB ? 0 : 1;
        const double u = s.uniform();
        double acc = 0.0;
        int cell = 3;
        for (int k = 0; k < 4; ++k) {
            acc += std::max(0.0, behavior.p(k / 2, k % 2, r.settingA, r.settingB));
            if (u < acc) {
                cell = k;
                break;
            }
        }
        r.outcomeA = cell / 2;
        r.outcomeB = cell % 2;
        r.revealed = s.uniform() < reveal_fraction;
    }
    return t;
}

inline void write_transcript_csv(std::ostream& os, const Transcript& t) {
    os << "index,settingA,settingB,outcomeA,outcomeB,revealed\n";
    for (const auto& r : t.rounds)
        os << r.index << ',' << r.settingA << ',' << r.settingB << ',' << r.outcomeA << ',' << r.outcomeB << ','
           << (r.revealed ? 1 : 0) << '\n';
}

/// Unrevealed rounds where both outcomes are 0. Alice's key bit is settingA, Bob's is settingB.
inline std::vector<RoundRecord> sift(const Transcript& t) {
    std::vector<RoundRecord> out;
    for (const auto& r : t.rounds)
        if (!r.revealed && r.outcomeA == 0 && r.outcomeB == 0) out.push_back(r);
    return out;
}

/// Fraction of sifted rounds whose key bits differ.
inline double key_disagreement(const std::vector<RoundRecord>& sifted) {
    if (sifted.empty()) return 0.0;
    const auto bad = std::count_if(sifted.begin(), sifted.end(), [](const RoundRecord& r) { return r.settingA != r.settingB; });
    return static_cast<double>(bad) / static_cast<double>(sifted.size());
}

struct HEstimate {
    HVector h;
    std::array<double, 4> stderr_{};
    std::array<std::int64_t, 4> hits{};
    std::array<std::int64_t, 4> trials{};
};

/// Empirical Hardy cells from the revealed rounds, with binomial standard errors.
inline HEstimate estimate_h(const std::vector<RoundRecord>& rounds) {
    HEstimate e;
    for (const auto& r : rounds) {
        if (!r.revealed) continue;
        for (int k = 0; k < 4; ++k) {
            const auto& c = hardy_cells[k];
            if (r.settingA == c[2] && r.settingB == c[3]) {
                ++e.trials[k];
                if (r.outcomeA == c[0] && r.outcomeB == c[1]) ++e.hits[k];
            }
        }
    }
    for (int k = 0; k < 4; ++k) {
        if (e.trials[k] == 0)
            throw Error(ErrorCode::insufficient_data, "no revealed rounds for setting pair of h" + std::to_string(k + 1));
        const double n = static_cast<double>(e.trials[k]);
        const double p = static_cast<double>(e.hits[k]) / n;
        e.h[k] = p;
        e.stderr_[k] = std::sqrt(p * (1.0 - p) / n);
    }
    return e;
}

inline HEstimate estimate_h(const Transcript& t) { return estimate_h(t.rounds); }

/// Joint settings distribution conditioned on a = b = 0.
inline std::array<double, 4> settings_given_00(const Behavior& p, const SettingsDistribution& d) {
    std::array<double, 4> j{};
    double total = 0.0;
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) {
            j[x * 2 + y] = d.joint(x, y) * std::max(0.0, p.p(0, 0, x, y));
            total += j[x * 2 + y];
        }
    if (!(total > 0.0)) throw Error(ErrorCode::zero_posterior, "P(a=0, b=0) vanishes");
    for (auto& v : j) v /= total;
    return j;
}

/// Alice's majority setting value is thinned uniformly so both values are equally likely.
inline std::array<double, 4> balance_alice(std::array<double, 4> j) {
    const double a0 = j[0] + j[1], a1 = j[2] + j[3];
    if (a0 <= 0.0 || a1 <= 0.0) return j;
    const int major = a0 >= a1 ? 0 : 1;
    const double keep = std::min(a0, a1) / std::max(a0, a1);
    j[major * 2] *= keep;
    j[major * 2 + 1] *= keep;
    const double total = j[0] + j[1] + j[2] + j[3];
    for (auto& v : j) v /= total;
    return j;
}

inline double xlog2x(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

/// H(A|B) = H(A,B) - H(B) of a joint table indexed x*2 + y.
inline double conditional_entropy(const std::array<double, 4>& j) {
    double hab = 0.0, hb = 0.0;
    for (double v : j) hab -= xlog2x(v);
    for (int y = 0; y < 2; ++y) hb -= xlog2x(j[y] + j[2 + y]);
    return std::max(0.0, hab - hb);
}

/// Entropy of Alice's setting given Bob's, among rounds with a = b = 0.
inline double conditional_entropy(const Behavior& p, const SettingsDistribution& d, bool dropping) {
    auto j = settings_given_00(p, d);
    if (dropping) j = balance_alice(j);
    return conditional_entropy(j);
}

/// P_obs = P_actual * P_branch(x,y) / P_average(x,y), cell by cell. Not normalized.
inline Behavior observed_behavior(const Behavior& actual, const SettingsDistribution& branch,
                                  const SettingsDistribution& average) {
    Behavior out;
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) {
            const double avg = average.joint(x, y);
            if (avg <= 0.0) throw Error(ErrorCode::division_by_zero, "average settings distribution has a zero cell");
            const double s = branch.joint(x, y) / avg;
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) out.p(a, b, x, y) = actual.p(a, b, x, y) * s;
        }
    return out;
}

/// Eve's key guess in the noiseless protocol when she knows which bias branch is active.
inline double noiseless_bias_guess(double epsilon, const SettingsDistribution& dist) {
    const auto model = biased_branches(dist, epsilon);
    double g = 0.0;
    for (const auto& b : model.branches) {
        const double s = hardy::q_max * b.joint(0, 0);
        const double v = hardy::q_tilde * b.joint(1, 1);
        if (s + v <= 0.0) throw Error(ErrorCode::zero_posterior, "branch never yields a key bit");
        const double p0 = s / (s + v);
        g += BiasModel::weight * std::max(p0, 1.0 - p0);
    }
    return g;
}

struct DropResult {
    std::vector<RoundRecord> kept;
    std::vector<std::int64_t> dropped;  // published round indices
};

/// Alice removes uniformly chosen rounds carrying her majority key value until both values are equally frequent.
inline DropResult apply_dropping(const std::vector<RoundRecord>& sifted, std::uint64_t seed) {
    std::array<std::vector<std::size_t>, 2> by_value;
    for (std::size_t i = 0; i < sifted.size(); ++i) by_value[sifted[i].settingA].push_back(i);
    const int major = by_value[0].size() >= by_value[1].size() ? 0 : 1;
    auto& pool = by_value[major];
    const std::size_t excess = pool.size() - by_value[1 - major].size();
    rng::Stream s(seed, 0);
    // Partial Fisher-Yates: the first `excess` entries become the dropped set.
    for (std::size_t i = 0; i < excess; ++i) {
        const auto j = i + static_cast<std::size_t>(s.uniform() * static_cast<double>(pool.size() - i));
        std::swap(pool[i], pool[std::min(j, pool.size() - 1)]);
    }
    std::vector<bool> drop(sifted.size(), false);
    for (std::size_t i = 0; i < excess; ++i) drop[pool[i]] = true;
    DropResult out;
    for (std::size_t i = 0; i < sifted.size(); ++i) {
        if (drop[i])
            out.dropped.push_back(sifted[i].index);
        else
            out.kept.push_back(sifted[i]);
    }
    std::sort(out.dropped.begin(), out.dropped.end());
    return out;
}

}  // namespace hardyqkd
