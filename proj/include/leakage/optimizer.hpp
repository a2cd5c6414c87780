#ifndef LEAKAGE_OPTIMIZER_HPP
#define LEAKAGE_OPTIMIZER_HPP

#include <functional>
#include <utility>
#include <vector>

#include "leakage/scenario.hpp"

namespace leakage {

/// Box constraints for the three pulse-train parameters, with the linked
/// constraint delta <= tau enforced during the search.
struct ParameterBox {
    double tau_lo, tau_hi;
    double delta_lo, delta_hi;
    double phi0_lo, phi0_hi;

    ParameterBox(double tau_lo_, double tau_hi_, double delta_lo_, double delta_hi_,
                 double phi0_lo_, double phi0_hi_);
};

struct Evaluation {
    double tau, delta, phi0;
    double value;
};

struct OptimizationResult {
    double tau = 0.0, delta = 0.0, phi0 = 0.0;
    double value = 0.0;
    int evaluations = 0;
    std::vector<Evaluation> trace;

    PulseTrain best_train() const;
};

using Objective3 = std::function<double(double tau, double delta, double phi0)>;

/// Deterministic compass search: start at the box center, cycle the
/// coordinates (tau, delta, phi0) polling +step then -step, accept the first
/// strict improvement, halve all steps when a full cycle fails, clamp to the
/// box and to delta <= tau. Stops at the evaluation budget or when every
/// step falls below 1e-4 of its range.
OptimizationResult pattern_search(const ParameterBox& box, const Objective3& objective,
                                  int budget);

/// L(T)/lambda^2 for the scenario run under the given control.
double objective(const PulseTrain& params, const Scenario& sc, double T, int workers = 1);

OptimizationResult minimize(const ParameterBox& box, const Scenario& sc, double T, int budget,
                            int workers = 1);

enum class SweepParam { tau, delta, phi0 };

/// One engine run per value, order preserving; returns (value, L(T)) pairs.
std::vector<std::pair<double, double>> sweep(SweepParam param, const std::vector<double>& values,
                                             const Scenario& sc, double T, int workers = 1);

}  // namespace leakage

#endif
