#include "leakage/control.hpp"

#include <cmath>
#include <stdexcept>

namespace leakage {

PulseTrain::PulseTrain(double tau_, double delta_, double phi0_, PulseShape shape_)
    : tau(tau_), delta(delta_), phi0(phi0_), shape(shape_) {
    if (tau <= 0.0) throw std::invalid_argument("PulseTrain: tau must be positive");
    if (delta < 0.0 || delta > tau) throw std::invalid_argument("PulseTrain: need 0 <= delta <= tau");
    if ((shape == PulseShape::impulse) != (delta == 0.0)) {
        throw std::invalid_argument("PulseTrain: impulse shape iff delta == 0");
    }
}

double control_field(const PulseTrain& train, double t) {
    if (train.shape == PulseShape::impulse) {
        throw std::domain_error("control_field: impulse trains have no pointwise field");
    }
    if (t < 0.0) throw std::domain_error("control_field: t must be >= 0");
    // window n = [n tau - delta, n tau)
    double n = std::floor(t / train.tau);
    if (t - n * train.tau >= train.tau - train.delta) return train.phi0 / train.delta;
    return 0.0;
}

double accumulated_phase(const PulseTrain& train, double t) {
    if (t <= 0.0) return 0.0;
    if (train.shape == PulseShape::impulse) {
        return train.phi0 * std::floor(t / train.tau);
    }
    if (train.delta == train.tau) {
        return (train.phi0 / train.tau) * t;
    }
    double n = std::floor(t / train.tau);  // completed windows
    double theta = n * train.phi0;
    double window_start = (n + 1.0) * train.tau - train.delta;
    if (t > window_start) theta += (train.phi0 / train.delta) * (t - window_start);
    return theta;
}

double PhaseProfile::operator()(double t) const {
    return train_ ? accumulated_phase(*train_, t) : 0.0;
}

std::optional<double> PhaseProfile::constant_rate() const {
    if (!train_) return 0.0;
    if (train_->shape == PulseShape::rectangular && train_->delta == train_->tau) {
        return train_->phi0 / train_->tau;
    }
    return std::nullopt;
}

Operator controlled_system_operator(double Omega, const std::optional<PulseTrain>& train,
                                    double t, int dim) {
    double phi = Omega * t + (train ? accumulated_phase(*train, t) : 0.0);
    Operator a = build_annihilation(dim);
    return std::exp(Complex(0.0, -phi)) * a + std::exp(Complex(0.0, phi)) * a.adjoint();
}

}  // namespace leakage
