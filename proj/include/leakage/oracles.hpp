#ifndef LEAKAGE_ORACLES_HPP
#define LEAKAGE_ORACLES_HPP

#include "leakage/quantum.hpp"

namespace leakage {
namespace oracles {

enum class StateKind { ground, first, superposition };

/// Exact survival probability for the polarized oscillator (system
/// H = omega a^dag a, interaction lambda (a + a^dag), bath trivial).
double example1_exact(StateKind kind, double lambda, double omega, double t);

/// Second-order (leakage-function) solution for the same model.
double example1_tcl2(StateKind kind, double lambda, double omega, double t);

/// Exact Rabi survival probability for the resonant spin + single-mode
/// problem, detuning epsilon - omega, bath in the one-photon state. The
/// denominator is the squared form (delta^2/4 + lambda^2); the printed
/// square-root variant is not probability conserving and is rejected by
/// jc_numeric.
double example2_exact(double lambda, double epsilon, double omega, double t);

/// Brute-force evolution in the invariant subspace {|down, m>, |up, m-1>}
/// by direct 2x2 diagonalization; returns the spin-down probability.
double jc_numeric(double lambda, double epsilon, double omega, double t, int occupation = 1);

/// Second-order closed form exp(-K lambda^2/(eps-omega)^2 sin^2((eps-omega)t/2)).
/// The model constant is K = 4, fixed empirically against jc_numeric and the
/// engine (the printed value 16 disagrees with both at order lambda^2).
double example2_tcl2(double lambda, double epsilon, double omega, double t);

inline constexpr double example2_coefficient = 4.0;

/// Direct propagation of H = omega a^dag a + lambda (a + a^dag) in a
/// truncated Fock space (interaction-picture overlap |<phi| e^{iH_S t}
/// e^{-iHt} |phi>|^2), truncation doubled until the change is < 1e-10.
double displaced_oscillator_numeric(StateKind kind, double lambda, double omega, double t,
                                    int dim = 32);

}  // namespace oracles
}  // namespace leakage

#endif
