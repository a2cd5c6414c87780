#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numbers>

#include "leakage/optimizer.hpp"
#include "leakage/oracles.hpp"
#include "leakage/scenario.hpp"

namespace {

using namespace leakage;

constexpr double pi = std::numbers::pi;

struct GlobalOpts {
    int workers = 1;
    std::string format;  // empty = keep scenario setting
};

void apply_format(Scenario& sc, const GlobalOpts& g) {
    if (!g.format.empty()) sc.output.format = g.format;
}

int cmd_run(const std::string& config_path, const GlobalOpts& g) {
    Scenario sc = load_scenario(config_path);
    apply_format(sc, g);
    RunFiles files = run_and_write(sc, g.workers);
    std::printf("wrote %s (checksum %016llx)\n", files.data_path.c_str(),
                static_cast<unsigned long long>(files.checksum));
    return 0;
}

LeakageSeries dominant_series(const Scenario& sc) {
    EngineSetup setup = make_setup(sc);
    SimulationGrid grid = make_grid(sc);
    StationaryRate sr = stationary_rate(setup, grid, sc.grid.t_max);
    LeakageSeries series;
    series.times = sr.times;
    series.L = sr.L_dom;
    series.C.assign(sr.times.size(), sr.rate);
    return series;
}

int cmd_fig1(const std::string& panel, const std::string& outdir, double t_max, int n_steps,
             const GlobalOpts& g) {
    std::filesystem::create_directories(outdir);
    Scenario base = fig1_scenario();
    base.grid.t_max = t_max;
    base.grid.n_steps = n_steps;
    const double Omega = base.system.omega;

    auto emit = [&](const std::string& name, const std::optional<PulseTrain>& control) {
        Scenario sc = base;
        sc.control = control;
        sc.output.path = outdir + "/" + name + (sc.output.format == "json" ? ".json" : ".csv");
        apply_format(sc, g);
        RunFiles files = run_and_write(sc, g.workers);
        std::printf("wrote %s\n", files.data_path.c_str());
    };
    auto emit_dominant = [&](const std::string& name) {
        Scenario sc = base;
        sc.control.reset();
        LeakageSeries series = dominant_series(sc);
        std::string path = outdir + "/" + name + ".csv";
        std::string data = format_csv(series);
        std::FILE* f = std::fopen(path.c_str(), "wb");
        if (!f) throw std::runtime_error("cannot write " + path);
        std::fwrite(data.data(), 1, data.size(), f);
        std::fclose(f);
        std::printf("wrote %s\n", path.c_str());
    };

    if (panel == "A") {
        emit("fig1A_uncontrolled", std::nullopt);
        emit_dominant("fig1A_dominant");
        emit("fig1A_impulse_tau20", PulseTrain(pi / (20.0 * Omega), 0.0, pi, PulseShape::impulse));
        emit("fig1A_impulse_tau10", PulseTrain(pi / (10.0 * Omega), 0.0, pi, PulseShape::impulse));
        emit("fig1A_impulse_tau5", PulseTrain(pi / (5.0 * Omega), 0.0, pi, PulseShape::impulse));
    } else if (panel == "B") {
        double tau = pi / (10.0 * Omega);
        emit("fig1B_delta_tau_over_5",
             PulseTrain(tau, tau / 5.0, pi, PulseShape::rectangular));
        emit("fig1B_delta_tau_over_2",
             PulseTrain(tau, tau / 2.0, pi, PulseShape::rectangular));
        emit("fig1B_delta_tau", PulseTrain(tau, tau, pi, PulseShape::rectangular));
    } else if (panel == "C") {
        double tau = pi / (10.0 * Omega);
        emit("fig1C_phi0_pi_over_10",
             PulseTrain(tau, tau / 2.0, pi / 10.0, PulseShape::rectangular));
        emit("fig1C_phi0_pi_over_5",
             PulseTrain(tau, tau / 2.0, pi / 5.0, PulseShape::rectangular));
        emit("fig1C_phi0_pi_over_2",
             PulseTrain(tau, tau / 2.0, pi / 2.0, PulseShape::rectangular));
    } else if (panel == "D") {
        double tau0 = pi / (10.0 * Omega);
        double tau1 = tau0 / 100.0, tau2 = tau0 / 10.0;
        emit("fig1D_phi0_pi_over_100",
             PulseTrain(tau1, tau1 / 2.0, pi / 100.0, PulseShape::rectangular));
        emit("fig1D_phi0_pi_over_10",
             PulseTrain(tau2, tau2 / 2.0, pi / 10.0, PulseShape::rectangular));
        emit("fig1D_phi0_minus_pi_over_100",
             PulseTrain(tau1, tau1 / 2.0, -pi / 100.0, PulseShape::rectangular));
        emit("fig1D_phi0_minus_pi_over_10",
             PulseTrain(tau2, tau2 / 2.0, -pi / 10.0, PulseShape::rectangular));
    } else {
        std::fprintf(stderr, "unknown panel '%s' (expected A|B|C|D)\n", panel.c_str());
        return 2;
    }
    return 0;
}

Scenario example1_scenario(double lambda_over_omega, double omega, int n_steps) {
    (void)lambda_over_omega;
    Scenario sc;
    sc.system.dim = 12;
    sc.system.omega = omega;
    sc.bath.type = BathType::trivial;
    sc.grid.t_max = 4.0 * pi / omega;
    sc.grid.n_steps = n_steps;
    return sc;
}

int cmd_oracle_pure_leakage(double lambda_over_omega, double omega, int n_steps,
                            const GlobalOpts& g) {
    using namespace oracles;
    const double lambda = lambda_over_omega * omega;
    int status = 0;
    std::printf("model pure_leakage: lambda/omega = %g, omega = %g fs^-1, n_steps = %d\n",
                lambda_over_omega, omega, n_steps);
    struct Case { StateKind kind; const char* name; std::vector<Complex> amps; };
    const double r = 1.0 / std::sqrt(2.0);
    std::vector<Case> cases = {{StateKind::ground, "ground", {1.0}},
                               {StateKind::first, "first", {0.0, 1.0}},
                               {StateKind::superposition, "superposition", {r, r}}};
    for (const auto& c : cases) {
        Scenario sc = example1_scenario(lambda_over_omega, omega, n_steps);
        sc.state.amplitudes = c.amps;
        LeakageSeries series = compute_L(make_setup(sc), make_grid(sc), g.workers);

        double lmax = 0.0;
        for (size_t k = 0; k < series.times.size(); ++k) {
            double Lex = -std::log(example1_tcl2(c.kind, 1.0, omega, series.times[k]));
            lmax = std::max(lmax, std::abs(Lex));
        }
        double max_abs_tcl2 = 0.0, max_abs_exact = 0.0;
        for (size_t k = 0; k < series.times.size(); ++k) {
            double t = series.times[k];
            double b_eng = std::exp(-lambda * lambda * series.L[k]);
            max_abs_tcl2 = std::max(max_abs_tcl2,
                                    std::abs(b_eng - example1_tcl2(c.kind, lambda, omega, t)));
            max_abs_exact = std::max(max_abs_exact,
                                     std::abs(b_eng - example1_exact(c.kind, lambda, omega, t)));
        }
        // scaled-relative check of L against the closed form
        double max_rel = 0.0;
        for (size_t k = 0; k < series.times.size(); ++k) {
            double Lex = -std::log(example1_tcl2(c.kind, 1.0, omega, series.times[k]));
            max_rel = std::max(max_rel, std::abs(series.L[k] - Lex) / lmax);
        }
        bool pass = max_rel <= 1e-3;
        if (!pass) status = 1;
        std::printf("  %-13s engine-vs-tcl2 rel %.3e (%s)  |b-b_tcl2| %.3e  |b-b_exact| %.3e\n",
                    c.name, max_rel, pass ? "PASS" : "FAIL", max_abs_tcl2, max_abs_exact);
    }
    // lambda^4 scaling of the second-order error, superposition state
    auto err = [&](double lam) {
        double e = 0.0;
        Scenario sc = example1_scenario(lambda_over_omega, omega, n_steps);
        SimulationGrid grid = make_grid(sc);
        for (int k = 0; k <= grid.n_steps; ++k) {
            double t = grid.time(k);
            e = std::max(e, std::abs(example1_tcl2(StateKind::superposition, lam, omega, t) -
                                     example1_exact(StateKind::superposition, lam, omega, t)));
        }
        return e;
    };
    std::printf("  second-order error scaling e(lambda)/e(lambda/2) = %.2f (expect ~16)\n",
                err(lambda) / err(0.5 * lambda));
    return status;
}

int cmd_oracle_spin_bath(double lambda, double epsilon, double omega, int occupation,
                         int n_steps, const GlobalOpts& g) {
    using namespace oracles;
    const double det = epsilon - omega;
    if (det == 0.0) {
        std::fprintf(stderr, "oracle spin_bath_rwa: epsilon == omega not supported\n");
        return 2;
    }
    const double x = lambda * lambda / (det * det);
    std::printf("model spin_bath_rwa: lambda = %g, epsilon = %g, omega = %g, m = %d "
                "(lambda^2/det^2 = %g)\n", lambda, epsilon, omega, occupation, x);

    Scenario sc;
    sc.system.dim = 2;
    sc.system.omega = epsilon;
    sc.state.amplitudes = {1.0};
    sc.bath.type = BathType::fock;
    sc.bath.omega = omega;
    sc.bath.occupation = occupation;
    sc.grid.t_max = 4.0 * pi / std::abs(det);
    sc.grid.n_steps = n_steps;
    LeakageSeries series = compute_L(make_setup(sc), make_grid(sc), g.workers);

    double max_jc = 0.0, max_tcl2 = 0.0;
    for (size_t k = 0; k < series.times.size(); ++k) {
        double t = series.times[k];
        double b_eng = std::exp(-lambda * lambda * series.L[k]);
        max_jc = std::max(max_jc, std::abs(b_eng - jc_numeric(lambda, epsilon, omega, t,
                                                              occupation)));
        if (occupation == 1) {
            max_tcl2 = std::max(max_tcl2,
                                std::abs(b_eng - example2_tcl2(lambda, epsilon, omega, t)));
        }
    }
    double tol = std::max(100.0 * x * x, 1e-6);
    bool pass = max_jc <= tol;
    std::printf("  engine-vs-jc_numeric max |db| = %.3e (tol %.3e, %s)\n", max_jc, tol,
                pass ? "PASS" : "FAIL");
    if (occupation == 1) {
        std::printf("  engine-vs-closed-form (K = %g) max |db| = %.3e\n",
                    example2_coefficient, max_tcl2);
    }
    return pass ? 0 : 1;
}

int cmd_optimize(const std::string& config_path, int budget, double horizon,
                 std::vector<double> tau_range, std::vector<double> delta_range,
                 std::vector<double> phi0_range, const GlobalOpts& g) {
    Scenario sc = load_scenario(config_path);
    apply_format(sc, g);
    const double Omega = sc.system.omega;
    if (tau_range.empty()) tau_range = {pi / (40.0 * Omega), pi / (2.0 * Omega)};
    if (delta_range.empty()) delta_range = {0.0, tau_range[1]};
    if (phi0_range.empty()) phi0_range = {pi / 10.0, pi};
    ParameterBox box(tau_range[0], tau_range[1], delta_range[0], delta_range[1], phi0_range[0],
                     phi0_range[1]);
    OptimizationResult result = minimize(box, sc, horizon, budget, g.workers);

    std::printf("optimize: %d evaluations, best L(T)/lambda^2 = %.6e\n", result.evaluations,
                result.value);
    std::printf("  tau = %.6g fs, delta = %.6g fs, phi0 = %.6g rad\n", result.tau, result.delta,
                result.phi0);
    Scenario best = sc;
    best.control = result.best_train();
    best.output.path = sc.output.path.empty() ? "optimize_best.csv" : sc.output.path;
    RunFiles files = run_and_write(best, g.workers);
    std::printf("wrote best run to %s\n", files.data_path.c_str());
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& param,
              const std::vector<double>& values, double horizon, const GlobalOpts& g) {
    Scenario sc = load_scenario(config_path);
    SweepParam p;
    if (param == "tau") p = SweepParam::tau;
    else if (param == "delta") p = SweepParam::delta;
    else if (param == "phi0") p = SweepParam::phi0;
    else {
        std::fprintf(stderr, "unknown sweep parameter '%s'\n", param.c_str());
        return 2;
    }
    double T = horizon > 0.0 ? horizon : sc.grid.t_max;
    auto table = sweep(p, values, sc, T, g.workers);
    std::printf("%s,L_per_lambda2\n", param.c_str());
    for (const auto& [v, L] : table) std::printf("%.11e,%.11e\n", v, L);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"leakage-function simulator and pulse-train control optimizer"};
    app.require_subcommand(1);
    GlobalOpts g;
    app.add_option("--workers", g.workers, "worker threads for engine runs")
        ->check(CLI::PositiveNumber);
    app.add_option("--format", g.format, "output format: csv|json")
        ->check(CLI::IsMember({"csv", "json"}));

    std::string config_path, panel, outdir = "fig1_out", model, param;
    double t_max = 1500.0, horizon = 700.0;
    int n_steps = 1500, budget = 200, occupation = 1;
    double lam_over_omega = 0.1, omega1 = 1.0;
    double lambda2 = 0.02, epsilon2 = 1.0, omega2 = 0.8;
    int oracle_steps = 2000;
    std::vector<double> values, tau_range, delta_range, phi0_range;

    auto* run = app.add_subcommand("run", "run a scenario config and emit data files");
    run->add_option("config", config_path, "scenario config file")->required();

    auto* fig1 = app.add_subcommand("fig1", "emit the leakage curves of one figure panel");
    fig1->add_option("panel", panel, "panel: A|B|C|D")->required();
    fig1->add_option("--out", outdir, "output directory");
    fig1->add_option("--tmax", t_max, "grid horizon, fs");
    fig1->add_option("--steps", n_steps, "grid steps");

    auto* oracle = app.add_subcommand("oracle", "check the engine against closed-form oracles");
    oracle->add_option("model", model, "pure_leakage|spin_bath_rwa")->required();
    oracle->add_option("--lambda-over-omega", lam_over_omega, "pure_leakage coupling ratio");
    oracle->add_option("--omega", omega1, "pure_leakage oscillator frequency, fs^-1");
    oracle->add_option("--lambda", lambda2, "spin_bath_rwa coupling");
    oracle->add_option("--epsilon", epsilon2, "spin splitting, fs^-1");
    oracle->add_option("--bath-omega", omega2, "bath mode frequency, fs^-1");
    oracle->add_option("--occupation", occupation, "bath Fock occupation");
    oracle->add_option("--steps", oracle_steps, "grid steps");

    auto* optimize = app.add_subcommand("optimize", "minimize L(T) over pulse-train parameters");
    optimize->add_option("config", config_path, "scenario config file")->required();
    optimize->add_option("--budget", budget, "objective evaluation budget");
    optimize->add_option("--horizon", horizon, "protection horizon T, fs");
    optimize->add_option("--tau", tau_range, "tau range: lo hi")->expected(2);
    optimize->add_option("--delta", delta_range, "delta range: lo hi")->expected(2);
    optimize->add_option("--phi0", phi0_range, "phi0 range: lo hi")->expected(2);

    auto* sweep_cmd = app.add_subcommand("sweep", "L(T) for a list of one parameter's values");
    sweep_cmd->add_option("config", config_path, "scenario config file")->required();
    sweep_cmd->add_option("--param", param, "tau|delta|phi0")->required();
    sweep_cmd->add_option("--values", values, "comma-separated parameter values")
        ->required()
        ->delimiter(',');
    sweep_cmd->add_option("--horizon", horizon, "protection horizon T, fs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) return cmd_run(config_path, g);
        if (fig1->parsed()) return cmd_fig1(panel, outdir, t_max, n_steps, g);
        if (oracle->parsed()) {
            if (model == "pure_leakage") {
                return cmd_oracle_pure_leakage(lam_over_omega, omega1, oracle_steps, g);
            }
            if (model == "spin_bath_rwa") {
                return cmd_oracle_spin_bath(lambda2, epsilon2, omega2, occupation, oracle_steps,
                                            g);
            }
            std::fprintf(stderr, "unknown oracle model '%s'\n", model.c_str());
            return 2;
        }
        if (optimize->parsed()) {
            return cmd_optimize(config_path, budget, horizon, tau_range, delta_range, phi0_range,
                                g);
        }
        if (sweep_cmd->parsed()) return cmd_sweep(config_path, param, values, horizon, g);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
