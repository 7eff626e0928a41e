#pragma once

// Two-qubit linear algebra, Hardy-state construction and Born-rule behaviors.

#include <array>
#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hardyqkd/error.hpp"

namespace hardyqkd {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

/// Hardy-paradox constants at the optimal measurement angles.
namespace hardy {
inline const double q_max = (5.0 * std::sqrt(5.0) - 11.0) / 2.0;
inline const double q_tilde = std::sqrt(5.0) - 2.0;
inline const double optimal_alpha = std::sqrt((std::sqrt(5.0) - 1.0) / 2.0);
/// Setting-0 probability that balances the sifted key without dropping.
inline const double nonuniform_r = (std::sqrt(5.0) - 1.0) / 2.0;
}  // namespace hardy

inline bool is_hermitian(const ComplexMatrix& m, double tol = 1e-12) {
    if (m.rows() != m.cols()) return false;
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

inline bool is_unitary(const ComplexMatrix& m, double tol = 1e-12) {
    if (m.rows() != m.cols()) return false;
    const auto id = ComplexMatrix::Identity(m.rows(), m.cols());
    return (m.adjoint() * m - id).cwiseAbs().maxCoeff() <= tol;
}

inline bool is_idempotent(const ComplexMatrix& m, double tol = 1e-12) {
    if (m.rows() != m.cols()) return false;
    return (m * m - m).cwiseAbs().maxCoeff() <= tol;
}

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

/// Normalized ket. Construction fails unless the squared norm is 1 within 1e-12.
class StateVector {
public:
    explicit StateVector(Eigen::VectorXcd amplitudes) : amps_(std::move(amplitudes)) {
        if (amps_.size() == 0)
            throw Error(ErrorCode::invalid_argument, "state vector must have positive dimension");
        if (std::abs(amps_.squaredNorm() - 1.0) > 1e-12)
            throw Error(ErrorCode::invalid_argument, "state vector is not normalized");
    }

    /// Builds a state from an arbitrary nonzero vector by rescaling it.
    static StateVector normalized(const Eigen::VectorXcd& v) {
        const double n = v.norm();
        if (n <= 1e-300) throw Error(ErrorCode::invalid_argument, "cannot normalize the zero vector");
        return StateVector(v / n);
    }

    Eigen::Index dim() const { return amps_.size(); }
    const Eigen::VectorXcd& amplitudes() const { return amps_; }
    Complex operator[](Eigen::Index i) const { return amps_(i); }

    Complex inner(const StateVector& other) const { return amps_.dot(other.amps_); }
    ComplexMatrix projector() const { return amps_ * amps_.adjoint(); }

private:
    Eigen::VectorXcd amps_;
};

/// Hermitian, unit-trace, positive semidefinite operator.
class DensityMatrix {
public:
    explicit DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {
        if (m_.rows() == 0 || m_.rows() != m_.cols())
            throw Error(ErrorCode::invalid_argument, "density matrix must be square");
        if (!is_hermitian(m_, 1e-12))
            throw Error(ErrorCode::invalid_argument, "density matrix is not Hermitian");
        if (std::abs(m_.trace() - Complex(1.0)) > 1e-12)
            throw Error(ErrorCode::invalid_argument, "density matrix trace differs from 1");
        if (eigenvalues().minCoeff() < -1e-10)
            throw Error(ErrorCode::invalid_argument, "density matrix has a negative eigenvalue");
    }

    Eigen::Index dim() const { return m_.rows(); }
    const ComplexMatrix& matrix() const { return m_; }

    Eigen::VectorXd eigenvalues() const {
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m_, Eigen::EigenvaluesOnly);
        return es.eigenvalues();
    }

    double purity() const { return (m_ * m_).trace().real(); }

private:
    ComplexMatrix m_;
};

enum class Party { A = 0, B = 1 };

/// Parameters of the rotated basis |0'> = alpha|0> + beta|1>, |1'> = beta*|0> - alpha*|1>.
struct LocalBasisParams {
    Complex alpha;
    Complex beta;
    Party party;

    /// beta is taken real and nonnegative.
    static LocalBasisParams from_alpha(Complex alpha, Party party) {
        const double mag = std::abs(alpha);
        if (!(mag > 1e-10 && mag < 1.0 - 1e-10))
            throw Error(ErrorCode::parameter_out_of_range,
                        "|alpha| must lie strictly inside (0, 1); got " + std::to_string(mag));
        return {alpha, Complex(std::sqrt(1.0 - mag * mag), 0.0), party};
    }
};

/// Rank-one projectors for both parties, both settings and both outcomes.
class MeasurementSet {
public:
    MeasurementSet(const LocalBasisParams& a, const LocalBasisParams& b) {
        set_party(Party::A, a);
        set_party(Party::B, b);
    }

    const Eigen::Vector2cd& ket(Party party, int setting, int outcome) const {
        return kets_[index(party, setting, outcome)];
    }

    Eigen::Matrix2cd projector(Party party, int setting, int outcome) const {
        const auto& k = ket(party, setting, outcome);
        return k * k.adjoint();
    }

    const LocalBasisParams& params(Party party) const { return params_[static_cast<int>(party)]; }

private:
    static int index(Party party, int setting, int outcome) {
        return static_cast<int>(party) * 4 + setting * 2 + outcome;
    }

    void set_party(Party party, const LocalBasisParams& p) {
        params_[static_cast<int>(party)] = p;
        kets_[index(party, 0, 0)] = Eigen::Vector2cd(1.0, 0.0);
        kets_[index(party, 0, 1)] = Eigen::Vector2cd(0.0, 1.0);
        kets_[index(party, 1, 0)] = Eigen::Vector2cd(p.alpha, p.beta);
        kets_[index(party, 1, 1)] = Eigen::Vector2cd(std::conj(p.beta), -std::conj(p.alpha));
    }

    std::array<Eigen::Vector2cd, 8> kets_;
    std::array<LocalBasisParams, 2> params_;
};

/// Conditional probabilities P(a,b|A,B) for two binary settings and outcomes.
struct Behavior {
    std::array<double, 16> cells{};

    static constexpr int index(int a, int b, int x, int y) { return ((a * 2 + b) * 2 + x) * 2 + y; }

    double& p(int a, int b, int x, int y) { return cells[index(a, b, x, y)]; }
    double p(int a, int b, int x, int y) const { return cells[index(a, b, x, y)]; }

    double alice_marginal(int a, int x, int y) const { return p(a, 0, x, y) + p(a, 1, x, y); }
    double bob_marginal(int b, int x, int y) const { return p(0, b, x, y) + p(1, b, x, y); }

    /// Correlator E[(-1)^(a+b)] for the setting pair.
    double correlator(int x, int y) const {
        return p(0, 0, x, y) - p(0, 1, x, y) - p(1, 0, x, y) + p(1, 1, x, y);
    }

    static Behavior uniform() {
        Behavior b;
        b.cells.fill(0.25);
        return b;
    }

    bool is_normalized(double tol = 1e-10) const {
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y) {
                double s = 0.0;
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b) {
                        const double v = p(a, b, x, y);
                        if (v < -tol || v > 1.0 + tol) return false;
                        s += v;
                    }
                if (std::abs(s - 1.0) > tol) return false;
            }
        return true;
    }

    bool is_no_signaling(double tol = 1e-10) const {
        for (int x = 0; x < 2; ++x)
            for (int a = 0; a < 2; ++a)
                if (std::abs(alice_marginal(a, x, 0) - alice_marginal(a, x, 1)) > tol) return false;
        for (int y = 0; y < 2; ++y)
            for (int b = 0; b < 2; ++b)
                if (std::abs(bob_marginal(b, 0, y) - bob_marginal(b, 1, y)) > tol) return false;
        return true;
    }
};

inline MeasurementSet local_bases(Complex alpha_a, Complex alpha_b) {
    return MeasurementSet(LocalBasisParams::from_alpha(alpha_a, Party::A),
                          LocalBasisParams::from_alpha(alpha_b, Party::B));
}

/// Product state |u>_A |v>_B in the basis index 2a + b.
inline StateVector product_state(const Eigen::Vector2cd& u, const Eigen::Vector2cd& v) {
    Eigen::VectorXcd out(4);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) out(2 * i + j) = u(i) * v(j);
    return StateVector::normalized(out);
}

/// The product states attached to the four Hardy conditions, in the order
/// |1'>|1'>, |0>|0'>, |0'>|0>, |0>|0>.
inline std::vector<StateVector> hardy_product_states(const MeasurementSet& m) {
    return {
        product_state(m.ket(Party::A, 1, 1), m.ket(Party::B, 1, 1)),
        product_state(m.ket(Party::A, 0, 0), m.ket(Party::B, 1, 0)),
        product_state(m.ket(Party::A, 1, 0), m.ket(Party::B, 0, 0)),
        product_state(m.ket(Party::A, 0, 0), m.ket(Party::B, 0, 0)),
    };
}

/// Classical Gram-Schmidt with one reorthogonalization pass. The k-th output
/// lies in the span of the first k inputs.
inline std::vector<StateVector> gram_schmidt(std::span<const StateVector> vectors) {
    std::vector<StateVector> out;
    out.reserve(vectors.size());
    for (const auto& v : vectors) {
        if (!out.empty() && v.dim() != out.front().dim())
            throw Error(ErrorCode::invalid_argument, "gram_schmidt: mixed dimensions");
        Eigen::VectorXcd w = v.amplitudes();
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& e : out) w -= e.amplitudes().dot(w) * e.amplitudes();
        const double norm = w.norm();
        if (norm < 1e-12)
            throw Error(ErrorCode::linear_dependence,
                        "input vectors are linearly dependent (residual norm " + std::to_string(norm) + ")");
        out.emplace_back(w / norm);
    }
    return out;
}

inline std::vector<StateVector> gram_schmidt(const std::vector<StateVector>& vectors) {
    return gram_schmidt(std::span<const StateVector>(vectors));
}

/// The unique state satisfying the three Hardy zero conditions.
inline StateVector hardy_state(Complex alpha_a, Complex alpha_b) {
    const auto basis = gram_schmidt(hardy_product_states(local_bases(alpha_a, alpha_b)));
    return basis.back();
}

/// Closed form |alpha_A alpha_B|^2 |beta_A beta_B|^2 / (1 - |alpha_A alpha_B|^2).
inline double q_value(Complex alpha_a, Complex alpha_b) {
    const auto pa = LocalBasisParams::from_alpha(alpha_a, Party::A);
    const auto pb = LocalBasisParams::from_alpha(alpha_b, Party::B);
    const double aa = std::norm(pa.alpha * pb.alpha);
    const double bb = std::norm(pa.beta * pb.beta);
    return aa * bb / (1.0 - aa);
}

/// Dimension of the orthocomplement of span{phi0, phi1, phi2} in C^4.
inline int uniqueness_check(const MeasurementSet& m) {
    const auto states = hardy_product_states(m);
    ComplexMatrix span(4, 3);
    for (int i = 0; i < 3; ++i) span.col(i) = states[i].amplitudes();
    Eigen::JacobiSVD<ComplexMatrix> svd(span);
    int rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > 1e-10) ++rank;
    return 4 - rank;
}

/// (1 - eta) I/d + eta |psi><psi|
inline DensityMatrix noisy_state(double eta, const StateVector& psi) {
    if (!(eta >= 0.0 && eta <= 1.0))
        throw Error(ErrorCode::parameter_out_of_range, "eta must lie in [0, 1]");
    const auto d = psi.dim();
    ComplexMatrix rho = (1.0 - eta) / static_cast<double>(d) * ComplexMatrix::Identity(d, d) + eta * psi.projector();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return DensityMatrix(std::move(rho));
}

inline Behavior born_behavior(const DensityMatrix& rho, const MeasurementSet& m) {
    if (rho.dim() != 4) throw Error(ErrorCode::invalid_argument, "born_behavior expects a two-qubit state");
    Behavior out;
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    const ComplexMatrix op = kron(m.projector(Party::A, x, a), m.projector(Party::B, y, b));
                    out.p(a, b, x, y) = (op * rho.matrix()).trace().real();
                }
    return out;
}

/// Behavior of the noisy Hardy setup at the optimal angles.
inline Behavior hardy_setup_behavior(double eta) {
    const auto bases = local_bases(hardy::optimal_alpha, hardy::optimal_alpha);
    const auto psi = hardy_state(hardy::optimal_alpha, hardy::optimal_alpha);
    return born_behavior(noisy_state(eta, psi), bases);
}

}  // namespace hardyqkd
