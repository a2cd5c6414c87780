#ifndef LEAKAGE_SCENARIO_HPP
#define LEAKAGE_SCENARIO_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "leakage/engine.hpp"

namespace leakage {

// unit conversion constants (CODATA)
inline constexpr double hbar_ev_fs = 0.6582119;    // eV fs
inline constexpr double kb_ev_per_k = 8.617333e-5; // eV/K

/// beta = hbar / (k_B T), in fs.
double beta_from_temperature(double kelvin);

struct SystemConfig {
    int dim = 12;
    double omega = 0.0;  // fs^-1
};

struct StateConfig {
    std::vector<Complex> amplitudes;   // over the Fock basis, normalized after parsing
    double normalization = 1.0;        // factor that was applied
};

enum class BathType { trivial, thermal, fock };

struct BathConfig {
    BathType type = BathType::trivial;
    // thermal
    int ell = 1000;
    double omega_d = 0.01;
    double beta = 0.0;
    std::optional<double> temperature;  // K, converted to beta at parse time
    // fock
    double omega = 0.0;
    int occupation = 1;
    // prefactor on the correlation function (1 = as constructed)
    double scale = 1.0;
};

struct GridConfig {
    double t_max = 0.0;
    int n_steps = 0;
};

struct OutputConfig {
    std::string path = "leakage.csv";
    std::string format = "csv";  // csv | json
};

/// Full run description parsed from a sectioned key-value config file.
struct Scenario {
    SystemConfig system;
    StateConfig state;
    BathConfig bath;
    std::optional<PulseTrain> control;
    GridConfig grid;
    OutputConfig output;
};

/// Parse the documented config format. Unknown sections or keys are hard
/// errors; parse errors carry the line number, validation errors name the
/// field. A missing [control] section means f == 0.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

/// Canonical config text for a scenario (parseable by parse_scenario, used
/// for the metadata echo of programmatic runs).
std::string serialize_scenario(const Scenario& sc);

EngineSetup make_setup(const Scenario& sc);
SimulationGrid make_grid(const Scenario& sc);

/// Fig-1 defaults: omega_d = 0.01 fs^-1, Omega = omega_d/1.5, 1000 bath
/// modes at 300 K, state (|0> + |1>)/sqrt(2), 1500 fs grid.
Scenario fig1_scenario();

std::string format_csv(const LeakageSeries& series);
std::string format_json(const LeakageSeries& series);

uint64_t fnv1a64(std::string_view bytes);

struct RunFiles {
    std::string data_path;
    std::string meta_path;
    uint64_t checksum = 0;
};

inline constexpr const char* engine_version = "0.1.0";

/// Run the scenario and emit the data file plus metadata sidecar
/// ("<path>.meta"). The checksum covers the data file bytes exactly.
RunFiles run_and_write(const Scenario& sc, int workers = 1);

}  // namespace leakage

#endif
