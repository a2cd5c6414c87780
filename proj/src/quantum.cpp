#include "leakage/quantum.hpp"

#include <cmath>

namespace leakage {

Operator::Operator(Matrix entries) : m_(std::move(entries)) {
    if (m_.rows() != m_.cols() || m_.rows() < 1) {
        throw std::invalid_argument("Operator: entries must be a square matrix");
    }
}

bool Operator::is_hermitian(double tol) const {
    return (m_ - m_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

Operator Operator::operator+(const Operator& other) const {
    if (other.dim() != dim()) throw std::invalid_argument("Operator: dimension mismatch");
    return Operator(m_ + other.m_);
}

Operator Operator::operator-(const Operator& other) const {
    if (other.dim() != dim()) throw std::invalid_argument("Operator: dimension mismatch");
    return Operator(m_ - other.m_);
}

Operator Operator::operator*(const Operator& other) const {
    if (other.dim() != dim()) throw std::invalid_argument("Operator: dimension mismatch");
    return Operator(m_ * other.m_);
}

Vector Operator::apply(const Vector& v) const {
    if (v.size() != dim()) throw std::invalid_argument("Operator: vector dimension mismatch");
    return m_ * v;
}

StateVector::StateVector(Vector amplitudes) : v_(std::move(amplitudes)) {
    if (v_.size() < 1) throw std::invalid_argument("StateVector: empty amplitude vector");
    if (std::abs(v_.norm() - 1.0) > 1e-12) {
        throw std::invalid_argument("StateVector: amplitudes are not normalized");
    }
}

StateVector StateVector::normalized(Vector amplitudes, double* factor) {
    double n = amplitudes.norm();
    if (n == 0.0) throw std::invalid_argument("StateVector: cannot normalize the zero vector");
    if (factor) *factor = 1.0 / n;
    return StateVector(Vector(amplitudes / n));
}

DiagonalEnergies::DiagonalEnergies(Eigen::VectorXd energies) : e_(std::move(energies)) {
    if (e_.size() < 1) throw std::invalid_argument("DiagonalEnergies: empty spectrum");
}

Operator build_annihilation(int dim) {
    if (dim < 2) throw std::invalid_argument("build_annihilation: dim must be >= 2");
    Matrix m = Matrix::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) m(n - 1, n) = std::sqrt(static_cast<double>(n));
    return Operator(std::move(m));
}

Operator build_pauli(Pauli kind) {
    Matrix m = Matrix::Zero(2, 2);
    const Complex i(0.0, 1.0);
    switch (kind) {
        case Pauli::x: m(0, 1) = 1.0; m(1, 0) = 1.0; break;
        case Pauli::y: m(0, 1) = -i; m(1, 0) = i; break;
        case Pauli::z: m(0, 0) = 1.0; m(1, 1) = -1.0; break;
        case Pauli::plus: m(0, 1) = 1.0; break;
        case Pauli::minus: m(1, 0) = 1.0; break;
    }
    return Operator(std::move(m));
}

Complex expectation(const StateVector& state, const Operator& op) {
    if (state.dim() != op.dim()) throw std::invalid_argument("expectation: dimension mismatch");
    return state.amplitudes().dot(op.entries() * state.amplitudes());
}

Operator interaction_picture(const Operator& op, const DiagonalEnergies& energies,
                             double t) {
    if (energies.dim() != op.dim()) {
        throw std::invalid_argument("interaction_picture: dimension mismatch");
    }
    const int d = op.dim();
    Matrix m(d, d);
    for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c) {
            m(r, c) = op(r, c) * std::exp(Complex(0.0, (energies[r] - energies[c]) * t));
        }
    }
    return Operator(std::move(m));
}

}  // namespace leakage
