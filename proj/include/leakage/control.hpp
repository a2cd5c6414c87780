#ifndef LEAKAGE_CONTROL_HPP
#define LEAKAGE_CONTROL_HPP

#include <optional>

#include "leakage/quantum.hpp"

namespace leakage {

enum class PulseShape { rectangular, impulse };

/// Periodic pulse train shifting the oscillator frequency: pulse n occupies
/// the half-open window [n tau - delta, n tau), n >= 1, with pulse area phi0.
/// delta = 0 (impulse shape) means analytic phase jumps of phi0 at t = n tau,
/// never a tall rectangle.
struct PulseTrain {
    double tau;    // period, fs
    double delta;  // width, fs
    double phi0;   // pulse area, rad, signed
    PulseShape shape;

    PulseTrain(double tau_, double delta_, double phi0_, PulseShape shape_);
};

/// Pointwise control field f(t): phi0/delta inside pulse windows, 0 outside.
/// Impulse trains have no pointwise field.
double control_field(const PulseTrain& train, double t);

/// Accumulated phase theta(t) = int_0^t f, in closed piecewise form.
/// Impulse: theta(t) = phi0 * floor(t/tau), jump at t = n tau included for
/// t >= n tau. delta = tau reduces to (phi0/tau) * t exactly.
double accumulated_phase(const PulseTrain& train, double t);

/// theta(t) evaluator with theta(0) = 0; the no-control profile is theta == 0.
class PhaseProfile {
public:
    PhaseProfile() = default;
    explicit PhaseProfile(PulseTrain train) : train_(train) {}

    double operator()(double t) const;

    /// phi0/tau when the train is a constant frequency shift (delta == tau),
    /// 0 when there is no control; nullopt otherwise.
    std::optional<double> constant_rate() const;

    const std::optional<PulseTrain>& train() const { return train_; }

private:
    std::optional<PulseTrain> train_;
};

/// e^{-i phi(t)} a + e^{+i phi(t)} a^dagger with phi(t) = Omega t + theta(t).
Operator controlled_system_operator(double Omega, const std::optional<PulseTrain>& train,
                                    double t, int dim);

}  // namespace leakage

#endif
