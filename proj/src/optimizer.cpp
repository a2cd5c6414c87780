#include "leakage/optimizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace leakage {

ParameterBox::ParameterBox(double tau_lo_, double tau_hi_, double delta_lo_, double delta_hi_,
                           double phi0_lo_, double phi0_hi_)
    : tau_lo(tau_lo_), tau_hi(tau_hi_), delta_lo(delta_lo_), delta_hi(delta_hi_),
      phi0_lo(phi0_lo_), phi0_hi(phi0_hi_) {
    if (tau_lo > tau_hi || delta_lo > delta_hi || phi0_lo > phi0_hi) {
        throw std::invalid_argument("ParameterBox: empty range");
    }
    if (tau_lo <= 0.0) throw std::invalid_argument("ParameterBox: tau must stay positive");
    if (delta_lo < 0.0) throw std::invalid_argument("ParameterBox: delta must stay nonnegative");
}

PulseTrain OptimizationResult::best_train() const {
    return PulseTrain(tau, delta, phi0,
                      delta == 0.0 ? PulseShape::impulse : PulseShape::rectangular);
}

OptimizationResult pattern_search(const ParameterBox& box, const Objective3& objective,
                                  int budget) {
    if (budget < 1) throw std::invalid_argument("pattern_search: budget must be >= 1");

    const std::array<double, 3> lo = {box.tau_lo, box.delta_lo, box.phi0_lo};
    const std::array<double, 3> hi = {box.tau_hi, box.delta_hi, box.phi0_hi};
    std::array<double, 3> range;
    for (int i = 0; i < 3; ++i) range[i] = hi[i] - lo[i];

    auto clamp_point = [&](std::array<double, 3> p) {
        for (int i = 0; i < 3; ++i) p[i] = std::clamp(p[i], lo[i], hi[i]);
        p[1] = std::min(p[1], p[0]);  // delta <= tau
        return p;
    };

    OptimizationResult result;
    std::array<double, 3> point =
        clamp_point({0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1]), 0.5 * (lo[2] + hi[2])});

    auto evaluate = [&](const std::array<double, 3>& p) {
        double v = objective(p[0], p[1], p[2]);
        result.trace.push_back({p[0], p[1], p[2], v});
        ++result.evaluations;
        return v;
    };

    double best = evaluate(point);
    std::array<double, 3> step;
    for (int i = 0; i < 3; ++i) step[i] = 0.25 * range[i];

    auto steps_exhausted = [&]() {
        for (int i = 0; i < 3; ++i) {
            if (range[i] > 0.0 && step[i] >= 1e-4 * range[i]) return false;
        }
        return true;
    };

    while (result.evaluations < budget && !steps_exhausted()) {
        bool improved = false;
        for (int i = 0; i < 3 && result.evaluations < budget; ++i) {
            if (range[i] == 0.0) continue;
            for (double sign : {1.0, -1.0}) {
                if (result.evaluations >= budget) break;
                std::array<double, 3> cand = point;
                cand[i] += sign * step[i];
                cand = clamp_point(cand);
                if (cand == point) continue;
                double v = evaluate(cand);
                if (v < best) {
                    best = v;
                    point = cand;
                    improved = true;
                    break;
                }
            }
        }
        if (!improved) {
            for (int i = 0; i < 3; ++i) step[i] *= 0.5;
        }
    }

    result.tau = point[0];
    result.delta = point[1];
    result.phi0 = point[2];
    result.value = best;
    return result;
}

double objective(const PulseTrain& params, const Scenario& sc, double T, int workers) {
    if (T <= 0.0) throw std::invalid_argument("objective: horizon T must be positive");
    Scenario run = sc;
    run.control = params;
    double dt = sc.grid.t_max / sc.grid.n_steps;
    int n = std::max(1, static_cast<int>(std::llround(T / dt)));
    SimulationGrid grid(T, n);
    LeakageSeries series = compute_L(make_setup(run), grid, workers);
    return series.L.back();
}

OptimizationResult minimize(const ParameterBox& box, const Scenario& sc, double T, int budget,
                            int workers) {
    auto f = [&](double tau, double delta, double phi0) {
        PulseTrain train(tau, delta, phi0,
                         delta == 0.0 ? PulseShape::impulse : PulseShape::rectangular);
        return objective(train, sc, T, workers);
    };
    return pattern_search(box, f, budget);
}

std::vector<std::pair<double, double>> sweep(SweepParam param, const std::vector<double>& values,
                                             const Scenario& sc, double T, int workers) {
    if (values.empty()) throw std::invalid_argument("sweep: values must be nonempty");
    if (!sc.control) throw std::invalid_argument("sweep: scenario has no control to vary");
    std::vector<std::pair<double, double>> out;
    out.reserve(values.size());
    for (double v : values) {
        PulseTrain base = *sc.control;
        double tau = base.tau, delta = base.delta, phi0 = base.phi0;
        switch (param) {
            case SweepParam::tau: tau = v; break;
            case SweepParam::delta: delta = v; break;
            case SweepParam::phi0: phi0 = v; break;
        }
        PulseShape shape = delta == 0.0 ? PulseShape::impulse : PulseShape::rectangular;
        out.emplace_back(v, objective(PulseTrain(tau, delta, phi0, shape), sc, T, workers));
    }
    return out;
}

}  // namespace leakage
