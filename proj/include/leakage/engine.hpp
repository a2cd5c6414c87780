#ifndef LEAKAGE_ENGINE_HPP
#define LEAKAGE_ENGINE_HPP

#include <optional>
#include <vector>

#include "leakage/bath.hpp"
#include "leakage/control.hpp"
#include "leakage/quantum.hpp"

namespace leakage {

/// Uniform time grid t_k = k dt, k = 0..n_steps.
struct SimulationGrid {
    double t_max;  // fs
    int n_steps;

    SimulationGrid(double t_max_, int n_steps_);
    double dt() const { return t_max / n_steps; }
    double time(int k) const { return k * dt(); }
};

/// Interaction-picture phase of the (possibly controlled) diagonal system
/// Hamiltonian: phi(t) = Omega t + theta(t). When the control is a constant
/// shift (delta == tau) the rate is folded into Omega before evaluation, so
/// the controlled and the shifted-frequency runs produce bitwise-equal
/// phases.
struct SystemPhase {
    double omega;       // fs^-1
    PhaseProfile theta;

    double operator()(double t) const;
    /// Total slope when phi is linear in t, nullopt otherwise.
    std::optional<double> linear_rate() const;
};

/// One phase-carrying piece of an interaction term:
/// contributes e^{i direction phi(t)} op to S_alpha(t). direction is +1/-1.
struct PhaseComponent {
    Operator op;
    int direction;
};

/// S_alpha(t) = sum of its components; bath_index selects the row/column of
/// the correlation kernel this term pairs with.
struct InteractionTerm {
    std::vector<PhaseComponent> components;
    int bath_index;
};

/// Everything the leakage engine needs: stored state, interaction terms,
/// system phase, and the bath correlation kernel.
struct EngineSetup {
    StateVector phi;
    std::vector<InteractionTerm> terms;
    SystemPhase phase;
    CorrelationKernel kernel;
};

/// Sampled leakage data; C and L are reported per lambda^2.
struct LeakageSeries {
    std::vector<double> times;  // fs
    std::vector<double> C;      // fs^-1
    std::vector<double> L;      // dimensionless
    double max_imag_residue = 0.0;

    std::vector<double> b(double lambda) const;
};

/// Projected density block eta in an orthonormal subspace basis.
struct SubspaceDensity {
    int d;
    Matrix eta;

    SubspaceDensity(int d_, Matrix eta_);
    double trace_real() const;
};

/// System covariance kernel S_{ab}(s, sprime) = <phi| dS_a(s) dS_b(sprime) |phi>
/// with the means subtracted, as an n_terms x n_terms matrix.
Matrix system_kernel(const StateVector& phi, const std::vector<InteractionTerm>& terms,
                     const SystemPhase& phase, double s, double sprime);

/// 2 Re sum_{ab} S_{ab}(s, s - sprime) Phi_{ab}(s, s - sprime); for
/// stationary kernels the Phi argument reduces to sprime.
double integrand(double s, double sprime, const EngineSetup& setup);

/// Trapezoid of the integrand over sprime in [0, s]; s must sit on the grid.
double compute_C(const EngineSetup& setup, const SimulationGrid& grid, double s);

/// Full series: C(t_k) for every grid point, cumulative trapezoid L(t_k),
/// O(N^2) kernel evaluations from immutable per-grid caches. Output is
/// bit-identical for any worker count.
LeakageSeries compute_L(const EngineSetup& setup, const SimulationGrid& grid,
                        int workers = 1);

struct StationaryRate {
    double rate;  // fs^-1 per lambda^2
    std::vector<double> times;
    std::vector<double> L_dom;
};

/// Dominant part: keeps only the (s - sprime)-stationary component of the
/// system kernel (opposite-direction phase pairs, means excluded) and
/// returns L_dom(t) = R t with R the truncated integral of the stationary
/// integrand over [0, transient_cut]. Requires a stationary bath kernel and
/// a linear system phase.
StationaryRate stationary_rate(const EngineSetup& setup, const SimulationGrid& grid,
                               double transient_cut);

/// Second-order d x d propagation of the projected density block. The
/// subspace is spanned by the orthonormal columns of subspace_basis (full
/// dim x d); the memory integral is evaluated by trapezoid on the grid with
/// eta frozen at the current time (time-local form), stepped with classical
/// RK4. Returns eta at every grid point.
std::vector<SubspaceDensity> propagate_subspace(const Matrix& subspace_basis,
                                                const SubspaceDensity& eta0,
                                                const SimulationGrid& grid,
                                                const EngineSetup& setup, double lambda);

}  // namespace leakage

#endif
