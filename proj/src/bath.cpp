#include "leakage/bath.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>

namespace leakage {

DiscreteThermalBath::DiscreteThermalBath(std::vector<BathMode> modes_, double beta_)
    : modes(std::move(modes_)), beta(beta_) {
    if (modes.empty()) throw std::invalid_argument("DiscreteThermalBath: no modes");
    if (beta <= 0.0) throw std::invalid_argument("DiscreteThermalBath: beta must be positive");
    for (size_t j = 0; j < modes.size(); ++j) {
        if (modes[j].omega <= 0.0 || modes[j].alpha < 0.0) {
            throw std::invalid_argument("DiscreteThermalBath: invalid mode parameters");
        }
        if (j > 0 && modes[j].omega <= modes[j - 1].omega) {
            throw std::invalid_argument(
                "DiscreteThermalBath: mode frequencies must be strictly increasing");
        }
    }
}

SingleModeFockBath::SingleModeFockBath(double omega_, int occupation_)
    : omega(omega_), occupation(occupation_) {
    if (occupation < 0) throw std::invalid_argument("SingleModeFockBath: occupation must be >= 0");
}

CorrelationKernel::CorrelationKernel(int terms, bool stationary, Eval eval)
    : terms_(terms), stationary_(stationary), eval_(std::move(eval)) {
    if (terms_ < 1) throw std::invalid_argument("CorrelationKernel: need at least one term");
}

Complex CorrelationKernel::operator()(int a, int b, double t, double s) const {
    if (a < 0 || a >= terms_ || b < 0 || b >= terms_) {
        throw std::out_of_range("CorrelationKernel: term index out of range");
    }
    return eval_(a, b, t, s);
}

std::vector<BathMode> discretize_spectrum(int ell, double omega_d) {
    if (ell < 1) throw std::invalid_argument("discretize_spectrum: ell must be >= 1");
    if (omega_d <= 0.0) throw std::invalid_argument("discretize_spectrum: omega_d must be positive");
    const double span = 1.0 - std::exp(-5.0);
    std::vector<BathMode> modes;
    modes.reserve(ell);
    for (int j = 1; j <= ell; ++j) {
        double omega = -0.5 * omega_d * std::log(1.0 - j * span / ell);
        double alpha = std::sqrt(omega * omega_d * span / (40.0 * std::numbers::pi * ell));
        modes.push_back({omega, alpha});
    }
    return modes;
}

double thermal_occupation(double omega, double beta) {
    if (omega <= 0.0 || beta <= 0.0) {
        throw std::invalid_argument("thermal_occupation: omega and beta must be positive");
    }
    double x = beta * omega;
    if (x > 700.0) return 0.0;  // deep quantum limit, exp would overflow
    return 1.0 / std::expm1(x);
}

CorrelationKernel thermal_kernel(const DiscreteThermalBath& bath) {
    struct ModeData {
        double alpha2;
        double n;
        double omega;
    };
    auto data = std::make_shared<std::vector<ModeData>>();
    data->reserve(bath.modes.size());
    for (const auto& m : bath.modes) {
        data->push_back({m.alpha * m.alpha, thermal_occupation(m.omega, bath.beta), m.omega});
    }
    return CorrelationKernel(1, true, [data](int, int, double t, double s) {
        const double u = t - s;
        Complex sum(0.0, 0.0);
        for (const auto& m : *data) {
            double c = std::cos(m.omega * u);
            double sn = std::sin(m.omega * u);
            // (1+n) e^{-i w u} + n e^{+i w u}
            sum += m.alpha2 * Complex((2.0 * m.n + 1.0) * c, -sn);
        }
        return sum;
    });
}

CorrelationKernel fock_kernel(const SingleModeFockBath& bath) {
    const double w = bath.omega;
    const double m = static_cast<double>(bath.occupation);
    // Term 0 couples to B_0 = a_bath, term 1 to B_1 = a_bath^dagger.
    return CorrelationKernel(2, true, [w, m](int a, int b, double t, double s) {
        const double u = t - s;
        if (a == 0 && b == 1) return (m + 1.0) * std::exp(Complex(0.0, -w * u));
        if (a == 1 && b == 0) return m * std::exp(Complex(0.0, w * u));
        return Complex(0.0, 0.0);
    });
}

CorrelationKernel trivial_kernel() {
    return CorrelationKernel(1, true, [](int, int, double, double) {
        return Complex(1.0, 0.0);
    });
}

}  // namespace leakage
