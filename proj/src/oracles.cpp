#include "leakage/oracles.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace leakage {
namespace oracles {

namespace {

double sin2_half(double w, double t) {
    double s = std::sin(0.5 * w * t);
    return s * s;
}

double survival_from_state(StateKind kind, double lambda, double omega, double t, int dim) {
    using Eigen::SelfAdjointEigenSolver;
    Matrix H = Matrix::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) H(k, k) = omega * k;
    for (int k = 1; k < dim; ++k) {
        double c = lambda * std::sqrt(static_cast<double>(k));
        H(k - 1, k) += c;
        H(k, k - 1) += c;
    }
    Vector phi = Vector::Zero(dim);
    switch (kind) {
        case StateKind::ground: phi(0) = 1.0; break;
        case StateKind::first: phi(1) = 1.0; break;
        case StateKind::superposition:
            phi(0) = 1.0 / std::sqrt(2.0);
            phi(1) = 1.0 / std::sqrt(2.0);
            break;
    }
    SelfAdjointEigenSolver<Matrix> es(H);
    Vector psi = es.eigenvectors() *
                 (Eigen::VectorXcd((-Complex(0.0, 1.0) * t * es.eigenvalues().array()).exp())
                      .asDiagonal() *
                  (es.eigenvectors().adjoint() * phi));
    // interaction picture: compare against exp(-i H_S t) |phi>
    Vector chi = phi;
    for (int k = 0; k < dim; ++k) chi(k) *= std::exp(Complex(0.0, -omega * k * t));
    Complex amp = chi.dot(psi);
    return std::norm(amp);
}

}  // namespace

double example1_exact(StateKind kind, double lambda, double omega, double t) {
    const double x = lambda * lambda / (omega * omega);
    const double s2 = sin2_half(omega, t);
    const double envelope = std::exp(-4.0 * x * s2);
    switch (kind) {
        case StateKind::ground:
            return envelope;
        case StateKind::first: {
            double pre = 1.0 - 4.0 * x * s2;
            return pre * pre * envelope;
        }
        case StateKind::superposition:
            return (1.0 - 4.0 * x * (1.0 - x) * s2 * s2) * envelope;
    }
    throw std::invalid_argument("example1_exact: unknown state kind");
}

double example1_tcl2(StateKind kind, double lambda, double omega, double t) {
    const double x = lambda * lambda / (omega * omega);
    const double s2 = sin2_half(omega, t);
    switch (kind) {
        case StateKind::ground: return std::exp(-4.0 * x * s2);
        case StateKind::first: return std::exp(-12.0 * x * s2);
        case StateKind::superposition: return std::exp(-4.0 * x * (s2 + s2 * s2));
    }
    throw std::invalid_argument("example1_tcl2: unknown state kind");
}

double example2_exact(double lambda, double epsilon, double omega, double t) {
    const double half_det = 0.5 * (epsilon - omega);
    const double rabi2 = half_det * half_det + lambda * lambda;
    if (rabi2 == 0.0) return 1.0;
    const double s = std::sin(t * std::sqrt(rabi2));
    return 1.0 - s * s * lambda * lambda / rabi2;
}

double jc_numeric(double lambda, double epsilon, double omega, double t, int occupation) {
    if (occupation < 1) throw std::invalid_argument("jc_numeric: occupation must be >= 1");
    // rotating frame over {|down, m>, |up, m-1>}
    const double half_det = 0.5 * (epsilon - omega);
    const double g = lambda * std::sqrt(static_cast<double>(occupation));
    Eigen::Matrix2cd H;
    H << -half_det, g, g, half_det;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(H);
    Eigen::Vector2cd psi0(1.0, 0.0);
    Eigen::Vector2cd psi =
        es.eigenvectors() *
        (Eigen::Vector2cd((-Complex(0.0, 1.0) * t * es.eigenvalues().array()).exp())
             .asDiagonal() *
         (es.eigenvectors().adjoint() * psi0));
    return std::norm(psi(0));
}

double example2_tcl2(double lambda, double epsilon, double omega, double t) {
    const double det = epsilon - omega;
    if (det == 0.0) {
        throw std::domain_error(
            "example2_tcl2: resonant case epsilon == omega has no closed form; use jc_numeric");
    }
    const double x = lambda * lambda / (det * det);
    return std::exp(-example2_coefficient * x * sin2_half(det, t));
}

double displaced_oscillator_numeric(StateKind kind, double lambda, double omega, double t,
                                    int dim) {
    if (dim < 16) throw std::invalid_argument("displaced_oscillator_numeric: dim must be >= 16");
    double prev = survival_from_state(kind, lambda, omega, t, dim);
    for (int d = 2 * dim; d <= 256; d *= 2) {
        double next = survival_from_state(kind, lambda, omega, t, d);
        if (std::abs(next - prev) < 1e-10) return next;
        prev = next;
    }
    throw std::runtime_error("displaced_oscillator_numeric: truncation did not converge by dim 256");
}

}  // namespace oracles
}  // namespace leakage
