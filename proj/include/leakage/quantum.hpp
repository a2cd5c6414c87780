#ifndef LEAKAGE_QUANTUM_HPP
#define LEAKAGE_QUANTUM_HPP

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>

namespace leakage {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Dense operator over a truncated level basis. Hermiticity is checkable,
/// never assumed.
class Operator {
public:
    explicit Operator(Matrix entries);

    int dim() const { return static_cast<int>(m_.rows()); }
    const Matrix& entries() const { return m_; }
    Complex operator()(int row, int col) const { return m_(row, col); }

    Operator adjoint() const { return Operator(m_.adjoint()); }
    bool is_hermitian(double tol = 1e-12) const;

    Operator operator+(const Operator& other) const;
    Operator operator-(const Operator& other) const;
    Operator operator*(const Operator& other) const;
    friend Operator operator*(Complex scalar, const Operator& op) {
        return Operator(scalar * op.m_);
    }
    Vector apply(const Vector& v) const;

private:
    Matrix m_;
};

/// Normalized complex amplitude vector. The raw constructor requires the
/// norm to already be 1 within 1e-12; use normalized() to rescale input.
class StateVector {
public:
    explicit StateVector(Vector amplitudes);
    static StateVector normalized(Vector amplitudes, double* factor = nullptr);

    int dim() const { return static_cast<int>(v_.size()); }
    const Vector& amplitudes() const { return v_; }

private:
    Vector v_;
};

/// Spectrum of a diagonal system Hamiltonian, angular frequencies in fs^-1
/// (hbar = 1 internally).
class DiagonalEnergies {
public:
    explicit DiagonalEnergies(Eigen::VectorXd energies);

    int dim() const { return static_cast<int>(e_.size()); }
    const Eigen::VectorXd& values() const { return e_; }
    double operator[](int n) const { return e_(n); }

private:
    Eigen::VectorXd e_;
};

enum class Pauli { x, y, z, plus, minus };

Operator build_annihilation(int dim);

/// 2x2 Pauli matrices in the basis {index 0 = excited (sigma_z eigenvalue +1),
/// index 1 = ground}. sigma_plus = [[0,1],[0,0]].
Operator build_pauli(Pauli kind);

Complex expectation(const StateVector& state, const Operator& op);

/// Conjugation by exp(i H_S t) for diagonal H_S: entry (m,n) picks up
/// exp(i (E_m - E_n) t).
Operator interaction_picture(const Operator& op, const DiagonalEnergies& energies,
                             double t);

}  // namespace leakage

#endif
