#include "leakage/scenario.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace leakage {

double beta_from_temperature(double kelvin) {
    if (kelvin <= 0.0) throw std::invalid_argument("temperature must be positive");
    return hbar_ev_fs / (kb_ev_per_k * kelvin);
}

namespace {

struct KeyValue {
    std::string value;
    int line;
    bool used = false;
};

using Section = std::map<std::string, KeyValue>;

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void parse_error(int line, const std::string& msg) {
    throw std::runtime_error("config parse error at line " + std::to_string(line) + ": " + msg);
}

[[noreturn]] void validation_error(const std::string& field, const std::string& msg) {
    throw std::runtime_error("config validation error: " + field + ": " + msg);
}

std::map<std::string, Section> read_sections(const std::string& text) {
    std::map<std::string, Section> sections;
    std::istringstream in(text);
    std::string raw;
    std::string current;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = raw;
        size_t hash = s.find('#');
        if (hash != std::string::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') parse_error(line, "unterminated section header");
            current = trim(s.substr(1, s.size() - 2));
            if (current.empty()) parse_error(line, "empty section name");
            sections[current];
            continue;
        }
        size_t eq = s.find('=');
        if (eq == std::string::npos) parse_error(line, "expected 'key = value'");
        if (current.empty()) parse_error(line, "key outside any section");
        std::string key = trim(s.substr(0, eq));
        std::string value = trim(s.substr(eq + 1));
        if (key.empty()) parse_error(line, "empty key");
        if (sections[current].count(key)) parse_error(line, "duplicate key '" + key + "'");
        sections[current][key] = {value, line, false};
    }
    return sections;
}

double to_double(const KeyValue& kv, const std::string& field) {
    size_t pos = 0;
    double v;
    try {
        v = std::stod(kv.value, &pos);
    } catch (const std::exception&) {
        parse_error(kv.line, field + ": not a number: '" + kv.value + "'");
    }
    if (pos != kv.value.size()) parse_error(kv.line, field + ": trailing characters");
    return v;
}

int to_int(const KeyValue& kv, const std::string& field) {
    double v = to_double(kv, field);
    if (v != std::floor(v)) parse_error(kv.line, field + ": expected an integer");
    return static_cast<int>(v);
}

std::vector<double> to_list(const KeyValue& kv, const std::string& field) {
    std::vector<double> out;
    std::stringstream ss(kv.value);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) parse_error(kv.line, field + ": empty list element");
        try {
            out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            parse_error(kv.line, field + ": not a number: '" + tok + "'");
        }
    }
    if (out.empty()) parse_error(kv.line, field + ": empty list");
    return out;
}

class SectionReader {
public:
    SectionReader(std::map<std::string, Section>& all, const std::string& name)
        : name_(name), sec_(all.count(name) ? &all.at(name) : nullptr) {}

    bool present() const { return sec_ != nullptr; }
    bool has(const std::string& key) const { return sec_ && sec_->count(key); }

    const KeyValue& get(const std::string& key) {
        if (!has(key)) validation_error(name_ + "." + key, "missing required key");
        auto& kv = sec_->at(key);
        kv.used = true;
        return kv;
    }
    std::optional<KeyValue> maybe(const std::string& key) {
        if (!has(key)) return std::nullopt;
        auto& kv = sec_->at(key);
        kv.used = true;
        return kv;
    }
    void finish() {
        if (!sec_) return;
        for (const auto& [key, kv] : *sec_) {
            if (!kv.used) parse_error(kv.line, "unknown key '" + name_ + "." + key + "'");
        }
    }

private:
    std::string name_;
    Section* sec_;
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt12(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.11e", v);
    return buf;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
    auto sections = read_sections(text);
    for (const auto& [name, _] : sections) {
        if (name != "system" && name != "state" && name != "bath" && name != "control" &&
            name != "grid" && name != "output") {
            validation_error(name, "unknown section");
        }
    }
    Scenario sc;

    SectionReader system(sections, "system");
    if (!system.present()) validation_error("system", "missing section");
    if (auto kv = system.maybe("dim")) sc.system.dim = to_int(*kv, "system.dim");
    sc.system.omega = to_double(system.get("omega"), "system.omega");
    system.finish();
    if (sc.system.dim < 2) validation_error("system.dim", "must be >= 2");

    SectionReader state(sections, "state");
    if (!state.present()) validation_error("state", "missing section");
    if (state.has("kind") && state.has("amplitudes_re")) {
        validation_error("state", "give either kind or amplitudes, not both");
    }
    if (auto kv = state.maybe("kind")) {
        const std::string& k = kv->value;
        if (k == "ground") sc.state.amplitudes = {1.0};
        else if (k == "first") sc.state.amplitudes = {0.0, 1.0};
        else if (k == "superposition") sc.state.amplitudes = {1.0, 1.0};
        else parse_error(kv->line, "state.kind: expected ground|first|superposition");
    } else {
        auto re = to_list(state.get("amplitudes_re"), "state.amplitudes_re");
        std::vector<double> im(re.size(), 0.0);
        if (auto kv = state.maybe("amplitudes_im")) {
            im = to_list(*kv, "state.amplitudes_im");
            if (im.size() != re.size()) {
                validation_error("state.amplitudes_im", "length differs from amplitudes_re");
            }
        }
        for (size_t k = 0; k < re.size(); ++k) sc.state.amplitudes.emplace_back(re[k], im[k]);
    }
    state.finish();
    {
        double norm2 = 0.0;
        for (auto c : sc.state.amplitudes) norm2 += std::norm(c);
        if (norm2 == 0.0) validation_error("state.amplitudes", "all amplitudes are zero");
        double factor = 1.0 / std::sqrt(norm2);
        for (auto& c : sc.state.amplitudes) c *= factor;
        sc.state.normalization = factor;
        if (static_cast<int>(sc.state.amplitudes.size()) > sc.system.dim) {
            validation_error("state.amplitudes", "more amplitudes than system levels");
        }
    }

    SectionReader bath(sections, "bath");
    if (!bath.present()) validation_error("bath", "missing section");
    {
        const std::string& type = bath.get("type").value;
        if (type == "trivial") {
            sc.bath.type = BathType::trivial;
        } else if (type == "thermal") {
            sc.bath.type = BathType::thermal;
            sc.bath.ell = to_int(bath.get("ell"), "bath.ell");
            sc.bath.omega_d = to_double(bath.get("omega_d"), "bath.omega_d");
            bool has_beta = bath.has("beta"), has_temp = bath.has("temperature");
            if (has_beta == has_temp) {
                validation_error("bath", "thermal bath needs exactly one of beta, temperature");
            }
            if (has_temp) {
                sc.bath.temperature = to_double(bath.get("temperature"), "bath.temperature");
                sc.bath.beta = beta_from_temperature(*sc.bath.temperature);
            } else {
                sc.bath.beta = to_double(bath.get("beta"), "bath.beta");
            }
            if (sc.bath.ell < 1) validation_error("bath.ell", "must be >= 1");
            if (sc.bath.omega_d <= 0.0) validation_error("bath.omega_d", "must be positive");
            if (sc.bath.beta <= 0.0) validation_error("bath.beta", "must be positive");
        } else if (type == "fock") {
            sc.bath.type = BathType::fock;
            sc.bath.omega = to_double(bath.get("omega"), "bath.omega");
            sc.bath.occupation = to_int(bath.get("occupation"), "bath.occupation");
            if (sc.bath.occupation < 0) validation_error("bath.occupation", "must be >= 0");
        } else {
            validation_error("bath.type", "expected trivial|thermal|fock");
        }
        if (auto kv = bath.maybe("scale")) sc.bath.scale = to_double(*kv, "bath.scale");
        if (sc.bath.scale < 0.0) validation_error("bath.scale", "must be >= 0");
    }
    bath.finish();

    SectionReader control(sections, "control");
    if (control.present()) {
        const std::string& shape = control.get("shape").value;
        double tau = to_double(control.get("tau"), "control.tau");
        double phi0 = to_double(control.get("phi0"), "control.phi0");
        double delta = 0.0;
        PulseShape ps;
        if (shape == "rectangular") {
            ps = PulseShape::rectangular;
            delta = to_double(control.get("delta"), "control.delta");
        } else if (shape == "impulse") {
            ps = PulseShape::impulse;
            if (auto kv = control.maybe("delta")) {
                if (to_double(*kv, "control.delta") != 0.0) {
                    validation_error("control.delta", "impulse shape requires delta = 0");
                }
            }
        } else {
            validation_error("control.shape", "expected rectangular|impulse");
        }
        control.finish();
        try {
            sc.control.emplace(tau, delta, phi0, ps);
        } catch (const std::invalid_argument& e) {
            validation_error("control", e.what());
        }
    }

    SectionReader grid(sections, "grid");
    if (!grid.present()) validation_error("grid", "missing section");
    sc.grid.t_max = to_double(grid.get("t_max"), "grid.t_max");
    sc.grid.n_steps = to_int(grid.get("n_steps"), "grid.n_steps");
    grid.finish();
    if (sc.grid.t_max <= 0.0) validation_error("grid.t_max", "must be positive");
    if (sc.grid.n_steps < 1) validation_error("grid.n_steps", "must be >= 1");

    SectionReader output(sections, "output");
    if (output.present()) {
        if (auto kv = output.maybe("path")) sc.output.path = kv->value;
        if (auto kv = output.maybe("format")) sc.output.format = kv->value;
        output.finish();
    }
    if (sc.output.format != "csv" && sc.output.format != "json") {
        validation_error("output.format", "expected csv|json");
    }
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

std::string serialize_scenario(const Scenario& sc) {
    std::ostringstream out;
    out << "[system]\n";
    out << "dim = " << sc.system.dim << "\n";
    out << "omega = " << fmt(sc.system.omega) << "\n";
    out << "\n[state]\n";
    out << "amplitudes_re =";
    for (size_t k = 0; k < sc.state.amplitudes.size(); ++k) {
        out << (k ? ", " : " ") << fmt(sc.state.amplitudes[k].real());
    }
    out << "\namplitudes_im =";
    for (size_t k = 0; k < sc.state.amplitudes.size(); ++k) {
        out << (k ? ", " : " ") << fmt(sc.state.amplitudes[k].imag());
    }
    out << "\n\n[bath]\n";
    switch (sc.bath.type) {
        case BathType::trivial:
            out << "type = trivial\n";
            break;
        case BathType::thermal:
            out << "type = thermal\n";
            out << "ell = " << sc.bath.ell << "\n";
            out << "omega_d = " << fmt(sc.bath.omega_d) << "\n";
            out << "beta = " << fmt(sc.bath.beta) << "\n";
            break;
        case BathType::fock:
            out << "type = fock\n";
            out << "omega = " << fmt(sc.bath.omega) << "\n";
            out << "occupation = " << sc.bath.occupation << "\n";
            break;
    }
    if (sc.bath.scale != 1.0) out << "scale = " << fmt(sc.bath.scale) << "\n";
    if (sc.control) {
        out << "\n[control]\n";
        out << "shape = "
            << (sc.control->shape == PulseShape::impulse ? "impulse" : "rectangular") << "\n";
        out << "tau = " << fmt(sc.control->tau) << "\n";
        if (sc.control->shape == PulseShape::rectangular) {
            out << "delta = " << fmt(sc.control->delta) << "\n";
        }
        out << "phi0 = " << fmt(sc.control->phi0) << "\n";
    }
    out << "\n[grid]\n";
    out << "t_max = " << fmt(sc.grid.t_max) << "\n";
    out << "n_steps = " << sc.grid.n_steps << "\n";
    out << "\n[output]\n";
    out << "path = " << sc.output.path << "\n";
    out << "format = " << sc.output.format << "\n";
    return out.str();
}

SimulationGrid make_grid(const Scenario& sc) {
    return SimulationGrid(sc.grid.t_max, sc.grid.n_steps);
}

EngineSetup make_setup(const Scenario& sc) {
    const int dim = sc.system.dim;
    Vector amps = Vector::Zero(dim);
    for (size_t k = 0; k < sc.state.amplitudes.size(); ++k) amps(k) = sc.state.amplitudes[k];
    StateVector phi = StateVector::normalized(amps);

    Operator a = build_annihilation(dim);
    Operator adag = a.adjoint();

    std::vector<InteractionTerm> terms;
    CorrelationKernel kernel = trivial_kernel();
    switch (sc.bath.type) {
        case BathType::trivial:
            terms.push_back({{{a, -1}, {adag, +1}}, 0});
            kernel = trivial_kernel();
            break;
        case BathType::thermal: {
            terms.push_back({{{a, -1}, {adag, +1}}, 0});
            DiscreteThermalBath bath(discretize_spectrum(sc.bath.ell, sc.bath.omega_d),
                                     sc.bath.beta);
            kernel = thermal_kernel(bath);
            break;
        }
        case BathType::fock: {
            // RWA pairing: system raising with bath a, system lowering with
            // bath a^dagger
            terms.push_back({{{adag, +1}}, 0});
            terms.push_back({{{a, -1}}, 1});
            kernel = fock_kernel(SingleModeFockBath(sc.bath.omega, sc.bath.occupation));
            break;
        }
    }
    if (sc.bath.scale != 1.0) {
        double scale = sc.bath.scale;
        CorrelationKernel inner = kernel;
        kernel = CorrelationKernel(inner.terms(), inner.stationary(),
                                   [inner, scale](int a_, int b_, double t, double s) {
                                       return scale * inner(a_, b_, t, s);
                                   });
    }

    PhaseProfile theta = sc.control ? PhaseProfile(*sc.control) : PhaseProfile();
    return EngineSetup{phi, std::move(terms), SystemPhase{sc.system.omega, theta}, kernel};
}

Scenario fig1_scenario() {
    Scenario sc;
    sc.system.dim = 12;
    sc.system.omega = 0.01 / 1.5;
    sc.state.amplitudes = {1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
    sc.bath.type = BathType::thermal;
    sc.bath.ell = 1000;
    sc.bath.omega_d = 0.01;
    sc.bath.temperature = 300.0;
    sc.bath.beta = beta_from_temperature(300.0);
    sc.grid.t_max = 1500.0;
    sc.grid.n_steps = 1500;
    sc.output.path = "fig1.csv";
    return sc;
}

std::string format_csv(const LeakageSeries& series) {
    std::string out = "t_fs,C_per_lambda2,L_per_lambda2,b_at_lambda1\n";
    auto b = series.b(1.0);
    for (size_t k = 0; k < series.times.size(); ++k) {
        out += fmt12(series.times[k]);
        out += ',';
        out += fmt12(series.C[k]);
        out += ',';
        out += fmt12(series.L[k]);
        out += ',';
        out += fmt12(b[k]);
        out += '\n';
    }
    return out;
}

std::string format_json(const LeakageSeries& series) {
    auto arr = [](const std::vector<double>& v) {
        std::string s = "[";
        for (size_t k = 0; k < v.size(); ++k) {
            if (k) s += ",";
            s += fmt12(v[k]);
        }
        s += "]";
        return s;
    };
    std::string out = "{\n";
    out += "  \"t_fs\": " + arr(series.times) + ",\n";
    out += "  \"C_per_lambda2\": " + arr(series.C) + ",\n";
    out += "  \"L_per_lambda2\": " + arr(series.L) + ",\n";
    out += "  \"b_at_lambda1\": " + arr(series.b(1.0)) + "\n";
    out += "}\n";
    return out;
}

uint64_t fnv1a64(std::string_view bytes) {
    uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

RunFiles run_and_write(const Scenario& sc, int workers) {
    auto t0 = std::chrono::steady_clock::now();
    EngineSetup setup = make_setup(sc);
    SimulationGrid grid = make_grid(sc);
    LeakageSeries series = compute_L(setup, grid, workers);
    double wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    std::string data = sc.output.format == "json" ? format_json(series) : format_csv(series);
    RunFiles files;
    files.data_path = sc.output.path;
    files.meta_path = sc.output.path + ".meta";
    files.checksum = fnv1a64(data);

    {
        std::ofstream out(files.data_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write output file: " + files.data_path);
        out << data;
    }
    {
        std::ofstream meta(files.meta_path, std::ios::binary);
        if (!meta) throw std::runtime_error("cannot write metadata file: " + files.meta_path);
        char cs[32];
        std::snprintf(cs, sizeof cs, "%016llx", static_cast<unsigned long long>(files.checksum));
        meta << "engine_version = " << engine_version << "\n";
        meta << "workers = " << workers << "\n";
        meta << "wall_time_ms = " << wall_ms << "\n";
        meta << "grid_t_max_fs = " << sc.grid.t_max << "\n";
        meta << "grid_n_steps = " << sc.grid.n_steps << "\n";
        meta << "data_file = " << files.data_path << "\n";
        meta << "data_checksum_fnv1a64 = " << cs << "\n";
        meta << "--- config ---\n";
        meta << serialize_scenario(sc);
    }
    return files;
}

}  // namespace leakage
