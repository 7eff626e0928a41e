#pragma once

// Moment-matrix (NPA) relaxations of the set of quantum behaviors for two
// parties with two binary measurements each.

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <iosfwd>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "hardyqkd/error.hpp"
#include "hardyqkd/quantum_core.hpp"
#include "hardyqkd/sdp.hpp"

namespace hardyqkd::npa {

/// Projector label: party, setting and outcome.
struct Symbol {
    Party party;
    int setting;
    int outcome;

    auto operator<=>(const Symbol&) const = default;
};

inline std::string to_string(const Symbol& s) {
    std::string out(1, s.party == Party::A ? 'A' : 'B');
    out += std::to_string(s.setting);
    if (s.outcome != 0) out += "|" + std::to_string(s.outcome);
    return out;
}

/// Canonical operator word. Alice's symbols precede Bob's, adjacent repeats are
/// collapsed and orthogonal neighbours annihilate the word.
class Monomial {
public:
    Monomial() = default;

    static Monomial identity() { return Monomial(); }

    static Monomial zero() {
        Monomial m;
        m.zero_ = true;
        return m;
    }

    static Monomial canonical(std::span<const Symbol> word) {
        Monomial m;
        for (Party party : {Party::A, Party::B}) {
            std::vector<Symbol> stack;
            for (const auto& s : word) {
                if (s.party != party) continue;
                if (!stack.empty() && stack.back() == s) continue;
                if (!stack.empty() && stack.back().setting == s.setting) return zero();
                stack.push_back(s);
            }
            m.word_.insert(m.word_.end(), stack.begin(), stack.end());
        }
        return m;
    }

    static Monomial canonical(std::initializer_list<Symbol> word) {
        return canonical(std::span<const Symbol>(word.begin(), word.size()));
    }

    bool is_zero() const { return zero_; }
    bool is_identity() const { return !zero_ && word_.empty(); }
    std::size_t size() const { return word_.size(); }
    const std::vector<Symbol>& word() const { return word_; }

    /// Hermitian conjugate: the reversed word, recanonicalized.
    Monomial adjoint() const {
        if (zero_) return *this;
        std::vector<Symbol> rev(word_.rbegin(), word_.rend());
        return canonical(rev);
    }

    /// Product this * other.
    Monomial times(const Monomial& other) const {
        if (zero_ || other.zero_) return zero();
        std::vector<Symbol> w = word_;
        w.insert(w.end(), other.word_.begin(), other.word_.end());
        return canonical(w);
    }

    std::string to_string() const {
        if (zero_) return "0";
        if (word_.empty()) return "1";
        std::string out;
        for (const auto& s : word_) out += npa::to_string(s);
        return out;
    }

    auto operator<=>(const Monomial&) const = default;

private:
    std::vector<Symbol> word_;
    bool zero_ = false;
};

/// Outcome-0 projector symbols A0, A1, B0, B1.
inline std::array<Symbol, 4> generators() {
    return {Symbol{Party::A, 0, 0}, Symbol{Party::A, 1, 0}, Symbol{Party::B, 0, 0}, Symbol{Party::B, 1, 0}};
}

inline void check_level(int level) {
    if (level < 1 || level > 3)
        throw Error(ErrorCode::unsupported_level, "NPA level must be 1, 2 or 3; got " + std::to_string(level));
}

/// Canonical words of length <= level over the outcome-0 projectors, identity first.
inline std::vector<Monomial> monomial_basis(int level) {
    check_level(level);
    const auto gens = generators();
    std::vector<Monomial> out{Monomial::identity()};
    std::vector<std::vector<Symbol>> frontier{{}};
    for (int len = 1; len <= level; ++len) {
        std::vector<std::vector<Symbol>> next;
        for (const auto& w : frontier)
            for (const auto& g : gens) {
                auto nw = w;
                nw.push_back(g);
                next.push_back(nw);
                const auto m = Monomial::canonical(nw);
                if (!m.is_zero() && std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
            }
        frontier = std::move(next);
    }
    std::stable_sort(out.begin() + 1, out.end(), [](const Monomial& a, const Monomial& b) {
        return a.size() != b.size() ? a.size() < b.size() : a < b;
    });
    return out;
}

/// Key under which moment entries are identified for a real symmetric moment
/// matrix: a word and its adjoint share one variable.
inline Monomial moment_key(const Monomial& m) {
    if (m.is_zero()) return m;
    return std::min(m, m.adjoint());
}

struct MomentMatrixLayout {
    int level = 0;
    std::vector<Monomial> monomials;
    std::vector<Monomial> classes;              // one representative word per shared variable
    std::vector<std::vector<std::pair<int, int>>> members;  // upper-triangular entries of each class
    std::vector<int> entry_class;               // n*n, row-major
    int identity_class = -1;
    int zero_class = -1;

    int dim() const { return static_cast<int>(monomials.size()); }
    int class_of(int i, int j) const { return entry_class[i * dim() + j]; }

    std::optional<int> find_class(const Monomial& m) const {
        const auto key = moment_key(m);
        for (std::size_t k = 0; k < classes.size(); ++k)
            if (classes[k] == key) return static_cast<int>(k);
        return std::nullopt;
    }
};

inline MomentMatrixLayout build_layout(int level) {
    MomentMatrixLayout lay;
    lay.level = level;
    lay.monomials = monomial_basis(level);
    const int n = lay.dim();
    lay.entry_class.assign(n * n, -1);
    std::map<Monomial, int> index;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const auto key = moment_key(lay.monomials[i].adjoint().times(lay.monomials[j]));
            auto [it, inserted] = index.try_emplace(key, static_cast<int>(lay.classes.size()));
            if (inserted) {
                lay.classes.push_back(key);
                lay.members.emplace_back();
                if (key.is_identity()) lay.identity_class = it->second;
                if (key.is_zero()) lay.zero_class = it->second;
            }
            lay.members[it->second].emplace_back(i, j);
            lay.entry_class[i * n + j] = it->second;
            lay.entry_class[j * n + i] = it->second;
        }
    return lay;
}

/// Layouts are immutable; one shared instance per level.
inline const MomentMatrixLayout& layout_for(int level) {
    check_level(level);
    static const std::array<MomentMatrixLayout, 3> cache{build_layout(1), build_layout(2), build_layout(3)};
    return cache[level - 1];
}

/// Linear functional on behaviors: sum of cell coefficients, optional
/// single-party marginal coefficients and a constant.
struct LinearFunctional {
    std::array<double, 16> cells{};
    std::array<double, 4> alice{};  // index a*2 + x, coefficient of P_A(a|x)
    std::array<double, 4> bob{};    // index b*2 + y, coefficient of P_B(b|y)
    double constant = 0.0;

    double& cell(int a, int b, int x, int y) { return cells[Behavior::index(a, b, x, y)]; }
    double cell(int a, int b, int x, int y) const { return cells[Behavior::index(a, b, x, y)]; }

    static LinearFunctional single_cell(int a, int b, int x, int y, double coef = 1.0) {
        LinearFunctional f;
        f.cell(a, b, x, y) = coef;
        return f;
    }

    static LinearFunctional alice_marginal(int a, int x, double coef = 1.0) {
        LinearFunctional f;
        f.alice[a * 2 + x] = coef;
        return f;
    }

    /// sum_xy weight_xy * sign_xy * C(x, y) with sign -1 on (1, 1).
    static LinearFunctional chsh(const std::array<double, 4>& weights = {1, 1, 1, 1}) {
        LinearFunctional f;
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y) {
                const double w = weights[x * 2 + y] * (x == 1 && y == 1 ? -1.0 : 1.0);
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b) f.cell(a, b, x, y) += (a == b ? w : -w);
            }
        return f;
    }

    LinearFunctional& operator+=(const LinearFunctional& o) {
        for (int i = 0; i < 16; ++i) cells[i] += o.cells[i];
        for (int i = 0; i < 4; ++i) {
            alice[i] += o.alice[i];
            bob[i] += o.bob[i];
        }
        constant += o.constant;
        return *this;
    }

    LinearFunctional operator*(double s) const {
        LinearFunctional f = *this;
        for (auto& c : f.cells) c *= s;
        for (auto& c : f.alice) c *= s;
        for (auto& c : f.bob) c *= s;
        f.constant *= s;
        return f;
    }

    double evaluate(const Behavior& p) const {
        double v = constant;
        for (int i = 0; i < 16; ++i) v += cells[i] * p.cells[i];
        for (int a = 0; a < 2; ++a)
            for (int x = 0; x < 2; ++x) {
                v += alice[a * 2 + x] * p.alice_marginal(a, x, 0);
                v += bob[a * 2 + x] * p.bob_marginal(a, 0, x);
            }
        return v;
    }
};

/// Functional expressed on moment classes: constant + sum_k coef_k * m_k.
struct MomentExpression {
    double constant = 0.0;
    std::map<int, double> terms;

    void add(int cls, double c) {
        if (c != 0.0) terms[cls] += c;
    }

    double evaluate(std::span<const double> class_values) const {
        double v = constant;
        for (const auto& [k, c] : terms) v += c * class_values[k];
        return v;
    }
};

inline MomentExpression to_moments(const LinearFunctional& f, const MomentMatrixLayout& lay) {
    auto cls = [&](std::initializer_list<Symbol> w) {
        const auto found = lay.find_class(Monomial::canonical(w));
        if (!found)
            throw Error(ErrorCode::inexpressible_functional,
                        "moment " + Monomial::canonical(w).to_string() + " absent at level " + std::to_string(lay.level));
        return *found;
    };
    MomentExpression e;
    e.constant = f.constant;
    auto add_alice = [&](int a, int x, double c) {
        // P_A(0|x) = <E_x>, P_A(1|x) = 1 - <E_x>
        const int ex = cls({{Party::A, x, 0}});
        if (a == 0) {
            e.add(ex, c);
        } else {
            e.constant += c;
            e.add(ex, -c);
        }
    };
    auto add_bob = [&](int b, int y, double c) {
        const int fy = cls({{Party::B, y, 0}});
        if (b == 0) {
            e.add(fy, c);
        } else {
            e.constant += c;
            e.add(fy, -c);
        }
    };
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) {
            const int exfy = cls({{Party::A, x, 0}, {Party::B, y, 0}});
            const double c00 = f.cell(0, 0, x, y), c01 = f.cell(0, 1, x, y);
            const double c10 = f.cell(1, 0, x, y), c11 = f.cell(1, 1, x, y);
            // P(00) = <EF>, P(01) = <E> - <EF>, P(10) = <F> - <EF>, P(11) = 1 - <E> - <F> + <EF>
            e.add(exfy, c00 - c01 - c10 + c11);
            if (c01 - c11 != 0.0) e.add(cls({{Party::A, x, 0}}), c01 - c11);
            if (c10 - c11 != 0.0) e.add(cls({{Party::B, y, 0}}), c10 - c11);
            e.constant += c11;
        }
    for (int a = 0; a < 2; ++a)
        for (int x = 0; x < 2; ++x) {
            if (f.alice[a * 2 + x] != 0.0) add_alice(a, x, f.alice[a * 2 + x]);
            if (f.bob[a * 2 + x] != 0.0) add_bob(a, x, f.bob[a * 2 + x]);
        }
    for (auto it = e.terms.begin(); it != e.terms.end();) {
        if (it->first == lay.identity_class) {
            e.constant += it->second;
            it = e.terms.erase(it);
        } else if (it->first == lay.zero_class || it->second == 0.0) {
            it = e.terms.erase(it);
        } else {
            ++it;
        }
    }
    return e;
}

/// Matrix F with <F, X> equal to the non-constant part of the expression.
inline solvers::SymmetricSparse to_matrix(const MomentExpression& e, const MomentMatrixLayout& lay) {
    solvers::SymmetricSparse s;
    for (const auto& [k, c] : e.terms) {
        const auto [i, j] = lay.members[k].front();
        s.add(i, j, i == j ? c : 0.5 * c);
    }
    return s;
}

struct FunctionalEquality {
    LinearFunctional functional;
    double value;
};

/// Moment matrix is V Y V' where Y is the SDP variable. V is empty when no
/// reduction applies.
struct MomentProgram {
    solvers::SDPProblem problem;
    const MomentMatrixLayout* layout = nullptr;
    Eigen::MatrixXd face;

    Eigen::MatrixXd lift(const Eigen::MatrixXd& y) const {
        if (face.size() == 0) return y;
        return solvers::detail::symmetrize(face * y * face.transpose());
    }
};

/// Coefficients u over the monomial basis with u'Xu = P(a,b|x,y): the cell is
/// <v'v> for v = Pi_a^x Pi_b^y, expanded through Pi_1 = 1 - Pi_0.
inline std::optional<Eigen::VectorXd> cell_vector(const MomentMatrixLayout& lay, int a, int b, int x, int y) {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(lay.dim());
    for (int ta = 0; ta < 2; ++ta)
        for (int tb = 0; tb < 2; ++tb) {
            if ((!ta && a == 0) || (!tb && b == 0)) continue;
            std::vector<Symbol> w;
            double c = 1.0;
            if (ta) {
                w.push_back({Party::A, x, 0});
                if (a == 1) c = -c;
            }
            if (tb) {
                w.push_back({Party::B, y, 0});
                if (b == 1) c = -c;
            }
            const auto m = Monomial::canonical(w);
            const auto it = std::find(lay.monomials.begin(), lay.monomials.end(), m);
            if (it == lay.monomials.end()) return std::nullopt;
            u(it - lay.monomials.begin()) += c;
        }
    return u;
}

/// Orthonormal basis of the complement of all vectors the moment matrix must
/// annihilate because a nonnegative cell combination is pinned to zero.
inline Eigen::MatrixXd zero_cell_face(const MomentMatrixLayout& lay, std::span<const FunctionalEquality> equalities) {
    std::vector<Eigen::VectorXd> kernel;
    for (const auto& eq : equalities) {
        const auto& f = eq.functional;
        if (eq.value != 0.0 || f.constant != 0.0) continue;
        if (std::any_of(f.alice.begin(), f.alice.end(), [](double c) { return c != 0.0; }) ||
            std::any_of(f.bob.begin(), f.bob.end(), [](double c) { return c != 0.0; }) ||
            std::any_of(f.cells.begin(), f.cells.end(), [](double c) { return c < 0.0; }))
            continue;
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y)
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b)
                        if (f.cell(a, b, x, y) > 0.0)
                            if (auto u = cell_vector(lay, a, b, x, y)) kernel.push_back(*u);
    }
    if (kernel.empty()) return {};
    Eigen::MatrixXd k(lay.dim(), static_cast<Eigen::Index>(kernel.size()));
    for (std::size_t i = 0; i < kernel.size(); ++i) k.col(static_cast<Eigen::Index>(i)) = kernel[i].normalized();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(k, Eigen::ComputeFullU);
    svd.setThreshold(1e-10);
    const auto rank = svd.rank();
    return svd.matrixU().rightCols(lay.dim() - rank);
}

/// Restricts a problem in X to X = V Y V'.
inline solvers::SDPProblem restrict_to_face(const solvers::SDPProblem& p, const Eigen::MatrixXd& v) {
    solvers::SDPProblem r;
    r.n = static_cast<int>(v.cols());
    r.sense = p.sense;
    r.offset = p.offset;
    r.b = p.b;
    r.C = solvers::detail::symmetrize(v.transpose() * p.C * v);
    r.A.reserve(p.A.size());
    for (const auto& a : p.A)
        r.A.push_back(solvers::SymmetricSparse::from_dense(
            solvers::detail::symmetrize(v.transpose() * a.to_dense(p.n) * v), 1e-14));
    return r;
}

/// Standard-form SDP whose primal variable is the moment matrix.
inline MomentProgram build_moment_sdp(int level, std::span<const FunctionalEquality> equalities,
                                      const LinearFunctional& objective, bool maximize, bool reduce = true) {
    const auto& lay = layout_for(level);
    const int n = lay.dim();
    solvers::SDPProblem p;
    p.n = n;
    p.sense = maximize ? solvers::Sense::maximize : solvers::Sense::minimize;
    std::vector<double> rhs;
    auto push = [&](solvers::SymmetricSparse a, double b) {
        p.A.push_back(std::move(a));
        rhs.push_back(b);
    };
    for (std::size_t k = 0; k < lay.classes.size(); ++k) {
        const auto& mem = lay.members[k];
        const auto [ri, rj] = mem.front();
        auto unit = [](int i, int j) {
            solvers::SymmetricSparse s;
            s.add(i, j, i == j ? 1.0 : 0.5);
            return s;
        };
        if (static_cast<int>(k) == lay.identity_class || static_cast<int>(k) == lay.zero_class) {
            const double v = static_cast<int>(k) == lay.identity_class ? 1.0 : 0.0;
            for (const auto& [i, j] : mem) push(unit(i, j), v);
            continue;
        }
        for (std::size_t t = 1; t < mem.size(); ++t) {
            auto s = unit(ri, rj);
            const auto [i, j] = mem[t];
            s.add(i, j, i == j ? -1.0 : -0.5);
            push(std::move(s), 0.0);
        }
    }
    for (const auto& eq : equalities) {
        const auto e = to_moments(eq.functional, lay);
        auto a = to_matrix(e, lay);
        if (a.empty()) {
            if (std::abs(e.constant - eq.value) > 1e-12)
                throw Error(ErrorCode::infeasible, "constant functional cannot meet its required value");
            continue;
        }
        push(std::move(a), eq.value - e.constant);
    }
    const auto obj = to_moments(objective, lay);
    p.C = to_matrix(obj, lay).to_dense(n);
    p.offset = obj.constant;
    p.b = Eigen::Map<Eigen::VectorXd>(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
    MomentProgram prog{std::move(p), &lay, {}};
    if (reduce) {
        prog.face = zero_cell_face(lay, equalities);
        if (prog.face.size() != 0) {
            if (prog.face.cols() == 0) throw Error(ErrorCode::infeasible, "zero constraints annihilate the moment matrix");
            prog.problem = restrict_to_face(prog.problem, prog.face);
        }
    }
    return prog;
}

inline MomentProgram build_moment_sdp(int level, const std::vector<FunctionalEquality>& equalities,
                                      const LinearFunctional& objective, bool maximize, bool reduce = true) {
    return build_moment_sdp(level, std::span<const FunctionalEquality>(equalities), objective, maximize, reduce);
}

/// Solutions no worse than this are accepted even if the solver stalled short of its tolerance.
inline constexpr double acceptable_accuracy = 1e-3;

enum class Direction { minimize, maximize };

struct BoundResult {
    double bound;          // dual (certified) value
    double primal_value;   // objective at the primal moment matrix
    solvers::SDPSolution solution;  // of the possibly face-reduced problem
    Eigen::MatrixXd moments;        // full moment matrix
};

inline BoundResult solve_bound(int level, std::span<const FunctionalEquality> equalities, const LinearFunctional& objective,
                               Direction direction, const solvers::SdpOptions& opt = {}) {
    const auto prog = build_moment_sdp(level, equalities, objective, direction == Direction::maximize);
    auto sol = solvers::sdp_solve(prog.problem, opt);
    if (sol.status == solvers::SdpStatus::infeasible)
        throw Error(ErrorCode::infeasible, "moment relaxation is infeasible");
    if (sol.status == solvers::SdpStatus::unbounded)
        throw Error(ErrorCode::unbounded, "moment relaxation is unbounded");
    if (sol.status != solvers::SdpStatus::optimal && sol.accuracy() > acceptable_accuracy)
        throw Error(ErrorCode::solver_failure, std::string("SDP solve ended with status ") + solvers::to_string(sol.status) +
                                                   " at accuracy " + std::to_string(sol.accuracy()));
    const double bound = sol.certified_bound();
    const double primal = sol.primal_objective;
    auto moments = prog.lift(sol.X);
    return {bound, primal, std::move(sol), std::move(moments)};
}

/// Certified bound on the objective over the level-k relaxation.
inline double bound_functional(int level, std::span<const FunctionalEquality> equalities,
                               const LinearFunctional& objective, Direction direction) {
    return solve_bound(level, equalities, objective, direction).bound;
}

inline double bound_functional(int level, const std::vector<FunctionalEquality>& equalities,
                               const LinearFunctional& objective, Direction direction) {
    return bound_functional(level, std::span<const FunctionalEquality>(equalities), objective, direction);
}

/// Moment class values of an explicit realization (state + projectors).
inline std::vector<double> realization_moments(const MomentMatrixLayout& lay, const DensityMatrix& rho,
                                               const MeasurementSet& m) {
    std::vector<double> out(lay.classes.size(), 0.0);
    for (std::size_t k = 0; k < lay.classes.size(); ++k) {
        const auto& w = lay.classes[k];
        if (w.is_zero()) continue;
        ComplexMatrix op = ComplexMatrix::Identity(4, 4);
        for (const auto& s : w.word()) {
            const ComplexMatrix local = m.projector(s.party, s.setting, s.outcome);
            op = op * (s.party == Party::A ? kron(local, ComplexMatrix::Identity(2, 2)) : kron(ComplexMatrix::Identity(2, 2), local));
        }
        out[k] = (op * rho.matrix()).trace().real();
    }
    return out;
}

/// Moment matrix assembled from class values.
inline Eigen::MatrixXd moment_matrix(const MomentMatrixLayout& lay, std::span<const double> class_values) {
    const int n = lay.dim();
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = class_values[lay.class_of(i, j)];
    return m;
}

/// Class values read off a primal moment matrix (representative entries).
inline std::vector<double> class_values(const MomentMatrixLayout& lay, const Eigen::MatrixXd& x) {
    std::vector<double> out(lay.classes.size());
    for (std::size_t k = 0; k < lay.classes.size(); ++k) {
        const auto [i, j] = lay.members[k].front();
        out[k] = x(i, j);
    }
    return out;
}

/// Guessing bound on Alice's setting-0 outcome under an observed, branch-reweighted
/// CHSH value 4 * sum_xy P_branch(x,y) s_xy C(x,y).
inline double chsh_outcome_guess_bound(const std::array<double, 4>& branch_joint, double observed_value, int level) {
    std::array<double, 4> w{};
    for (int i = 0; i < 4; ++i) w[i] = 4.0 * branch_joint[i];
    const auto expr = LinearFunctional::chsh(w);
    const double quantum_max = bound_functional(level, std::vector<FunctionalEquality>{}, expr, Direction::maximize);
    if (observed_value > quantum_max + 1e-6)
        throw Error(ErrorCode::infeasible, "observed CHSH value " + std::to_string(observed_value) +
                                               " exceeds the relaxation maximum " + std::to_string(quantum_max));
    const std::vector<FunctionalEquality> eq{{expr, std::min(observed_value, quantum_max)}};
    const auto p0 = LinearFunctional::alice_marginal(0, 0);
    const double hi = bound_functional(level, eq, p0, Direction::maximize);
    const double lo = bound_functional(level, eq, p0, Direction::minimize);
    return std::clamp(std::max(hi, 1.0 - lo), 0.0, 1.0);
}

/// Plain-text sparse dump: "n m", then sections "C", "A k" and "b" with lines "i j value" / "k value".
inline void write_sdp_text(std::ostream& os, const solvers::SDPProblem& p) {
    os.precision(17);
    os << p.n << ' ' << p.num_constraints() << ' ' << (p.sense == solvers::Sense::maximize ? "max" : "min") << ' '
       << p.offset << '\n';
    os << "C\n";
    for (int j = 0; j < p.n; ++j)
        for (int i = 0; i <= j; ++i)
            if (p.C(i, j) != 0.0) os << i << ' ' << j << ' ' << p.C(i, j) << '\n';
    for (int k = 0; k < p.num_constraints(); ++k) {
        os << "A " << k << '\n';
        for (const auto& e : p.A[k].entries()) os << e.row << ' ' << e.col << ' ' << e.value << '\n';
    }
    os << "b\n";
    for (int k = 0; k < p.num_constraints(); ++k) os << k << ' ' << p.b(k) << '\n';
}

inline solvers::SDPProblem read_sdp_text(std::istream& is) {
    solvers::SDPProblem p;
    int m = 0;
    std::string sense;
    if (!(is >> p.n >> m >> sense >> p.offset)) throw Error(ErrorCode::io_error, "bad SDP dump header");
    p.sense = sense == "max" ? solvers::Sense::maximize : solvers::Sense::minimize;
    p.C = Eigen::MatrixXd::Zero(p.n, p.n);
    p.A.resize(m);
    p.b = Eigen::VectorXd::Zero(m);
    std::string line;
    std::getline(is, line);
    enum { none, c, a, b } section = none;
    int current = -1;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        if (line == "C") {
            section = c;
        } else if (line == "b") {
            section = b;
        } else if (line.rfind("A ", 0) == 0) {
            std::string tag;
            ls >> tag >> current;
            section = a;
        } else if (section == b) {
            int k;
            double v;
            ls >> k >> v;
            p.b(k) = v;
        } else {
            int i, j;
            double v;
            if (!(ls >> i >> j >> v)) throw Error(ErrorCode::io_error, "bad SDP dump line: " + line);
            if (section == c) {
                p.C(i, j) = v;
                p.C(j, i) = v;
            } else if (section == a) {
                p.A[current].add(i, j, v);
            }
        }
    }
    return p;
}

}  // namespace hardyqkd::npa
