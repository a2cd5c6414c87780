#ifndef LEAKAGE_BATH_HPP
#define LEAKAGE_BATH_HPP

#include <functional>
#include <vector>

#include "leakage/quantum.hpp"

namespace leakage {

/// One bath oscillator: frequency omega_j (fs^-1) and coupling alpha(omega_j)
/// chosen so alpha^2 carries fs^-2. The overall coupling lambda is factored
/// out and set to 1.
struct BathMode {
    double omega;
    double alpha;
};

struct DiscreteThermalBath {
    std::vector<BathMode> modes;
    double beta;  // inverse temperature, fs

    DiscreteThermalBath(std::vector<BathMode> modes_, double beta_);
};

/// Single bosonic mode prepared in the m-photon Fock state. The mode
/// frequency may be detuned from the system splitting; that is the point.
struct SingleModeFockBath {
    double omega;
    int occupation;

    SingleModeFockBath(double omega_, int occupation_);
};

struct TrivialBath {};

/// Two-time bath correlation Phi_{ab}(t,s) = tr_B[B_a(t) B_b(s) rho_B],
/// units fs^-2, indices 0-based over the interaction terms.
class CorrelationKernel {
public:
    using Eval = std::function<Complex(int a, int b, double t, double s)>;

    CorrelationKernel(int terms, bool stationary, Eval eval);

    int terms() const { return terms_; }
    bool stationary() const { return stationary_; }
    Complex operator()(int a, int b, double t, double s) const;

private:
    int terms_;
    bool stationary_;
    Eval eval_;
};

/// Log-discretized spectrum: omega_j = -(omega_d/2) ln(1 - j(1-e^-5)/ell),
/// alpha(omega_j) = sqrt(omega_j omega_d (1-e^-5) / (40 pi ell)), j = 1..ell.
std::vector<BathMode> discretize_spectrum(int ell, double omega_d);

double thermal_occupation(double omega, double beta);

CorrelationKernel thermal_kernel(const DiscreteThermalBath& bath);
CorrelationKernel fock_kernel(const SingleModeFockBath& bath);
CorrelationKernel trivial_kernel();

}  // namespace leakage

#endif
