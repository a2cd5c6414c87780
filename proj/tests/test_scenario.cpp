#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "leakage/scenario.hpp"

using namespace leakage;
using std::numbers::pi;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kGroundConfig = R"(# polarized oscillator, stored ground state
[system]
omega = 1.0

[state]
kind = ground

[bath]
type = trivial

[grid]
t_max = 12.566370614359172
n_steps = 2000

[output]
path = test_scenario_ground.csv
)";

}  // namespace

TEST_CASE("minimal config parses with defaults") {
    Scenario sc = parse_scenario(kGroundConfig);
    CHECK(sc.system.dim == 12);
    CHECK(sc.system.omega == 1.0);
    CHECK(!sc.control.has_value());
    CHECK(sc.bath.type == BathType::trivial);
    REQUIRE(sc.state.amplitudes.size() == 1);
    CHECK(sc.state.amplitudes[0] == Complex(1.0));
    CHECK(sc.output.format == "csv");
}

TEST_CASE("thermal config with temperature") {
    Scenario sc = parse_scenario(R"(
[system]
omega = 0.006666666666666667

[state]
kind = superposition

[bath]
type = thermal
ell = 1000
omega_d = 0.01
temperature = 300

[grid]
t_max = 1500
n_steps = 1500
)");
    CHECK(sc.bath.type == BathType::thermal);
    CHECK(sc.bath.ell == 1000);
    CHECK(sc.bath.omega_d == 0.01);
    CHECK(std::abs(sc.bath.beta - 25.4608) <= 1e-3);
    REQUIRE(sc.state.amplitudes.size() == 2);
    CHECK(std::abs(sc.state.amplitudes[0] - Complex(1.0 / std::sqrt(2.0))) <= 1e-15);
    CHECK(beta_from_temperature(300.0) == sc.bath.beta);
}

TEST_CASE("amplitude lists are normalized and the factor recorded") {
    Scenario sc = parse_scenario(R"(
[system]
omega = 1.0

[state]
amplitudes_re = 3, 0
amplitudes_im = 0, 4

[bath]
type = trivial

[grid]
t_max = 1
n_steps = 10
)");
    CHECK(sc.state.normalization == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(std::abs(sc.state.amplitudes[0] - Complex(0.6)) <= 1e-15);
    CHECK(std::abs(sc.state.amplitudes[1] - Complex(0.0, 0.8)) <= 1e-15);
}

TEST_CASE("invalid configs are rejected with named fields or line numbers") {
    auto expect_throw = [](const std::string& text, const std::string& needle) {
        try {
            parse_scenario(text);
            FAIL_CHECK("expected a throw for: " << needle);
        } catch (const std::runtime_error& e) {
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };
    const std::string base = R"(
[system]
omega = 1.0

[state]
kind = ground

[bath]
type = trivial

[grid]
t_max = 10
n_steps = 100
)";
    expect_throw(base + "\n[control]\nshape = rectangular\ntau = 1\ndelta = 2\nphi0 = 1\n",
                 "control");
    expect_throw(base + "\n[physics]\nx = 1\n", "unknown section");
    expect_throw(base + "\n[output]\nspeed = fast\n", "unknown key");
    expect_throw("[system]\nomega == 1\n", "line");

    std::string zero_steps(base);
    zero_steps.replace(zero_steps.find("n_steps = 100"), 13, "n_steps = 0");
    expect_throw(zero_steps, "n_steps");

    std::string both(base);
    both.replace(both.find("type = trivial"), 14,
                 "type = thermal\nell = 10\nomega_d = 0.01\nbeta = 1\ntemperature = 300");
    expect_throw(both, "exactly one");
}

TEST_CASE("serialization round-trips") {
    Scenario sc = fig1_scenario();
    sc.control.emplace(150.0, 30.0, pi, PulseShape::rectangular);
    sc.bath.scale = 2.0;
    Scenario back = parse_scenario(serialize_scenario(sc));
    CHECK(back.system.dim == sc.system.dim);
    CHECK(back.system.omega == sc.system.omega);
    CHECK(back.bath.type == BathType::thermal);
    CHECK(back.bath.beta == sc.bath.beta);
    CHECK(back.bath.scale == 2.0);
    REQUIRE(back.control.has_value());
    CHECK(back.control->tau == 150.0);
    CHECK(back.control->delta == 30.0);
    CHECK(back.control->phi0 == pi);
    CHECK(back.grid.t_max == sc.grid.t_max);
    CHECK(back.grid.n_steps == sc.grid.n_steps);
    // renormalization after parsing may move amplitudes by one ulp
    for (size_t k = 0; k < sc.state.amplitudes.size(); ++k) {
        CHECK(std::abs(back.state.amplitudes[k] - sc.state.amplitudes[k]) <= 1e-15);
    }

    Scenario impulse = sc;
    impulse.control.emplace(80.0, 0.0, -pi, PulseShape::impulse);
    Scenario back2 = parse_scenario(serialize_scenario(impulse));
    REQUIRE(back2.control.has_value());
    CHECK(back2.control->shape == PulseShape::impulse);
    CHECK(back2.control->phi0 == -pi);
}

TEST_CASE("csv and json formatting") {
    LeakageSeries series;
    series.times = {0.0, 0.5};
    series.C = {0.0, 2.0};
    series.L = {0.0, 0.5};

    std::string csv = format_csv(series);
    std::istringstream lines(csv);
    std::string header;
    std::getline(lines, header);
    CHECK(header == "t_fs,C_per_lambda2,L_per_lambda2,b_at_lambda1");
    std::string row;
    std::getline(lines, row);
    CHECK(row == "0.00000000000e+00,0.00000000000e+00,0.00000000000e+00,1.00000000000e+00");
    std::getline(lines, row);
    CHECK(row.find("5.00000000000e-01,2.00000000000e+00,5.00000000000e-01,") == 0);
    CHECK(csv.find('\r') == std::string::npos);

    std::string json = format_json(series);
    CHECK(json.find("\"t_fs\"") != std::string::npos);
    CHECK(json.find("\"L_per_lambda2\"") != std::string::npos);
}

TEST_CASE("fnv1a64 reference values") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
    CHECK(fnv1a64("hello") == 0xa430d84680aabd0bull);
}

TEST_CASE("run_and_write produces a verifiable, reproducible artifact") {
    Scenario sc = parse_scenario(kGroundConfig);
    RunFiles first = run_and_write(sc, 1);

    std::string data = slurp(first.data_path);
    CHECK(fnv1a64(data) == first.checksum);
    std::string meta = slurp(first.meta_path);
    char cs[32];
    std::snprintf(cs, sizeof cs, "%016llx", static_cast<unsigned long long>(first.checksum));
    CHECK(meta.find(cs) != std::string::npos);
    CHECK(meta.find("--- config ---") != std::string::npos);
    CHECK(meta.find("engine_version = 0.1.0") != std::string::npos);

    // the L column reproduces the closed form
    std::istringstream lines(data);
    std::string row;
    std::getline(lines, row);  // header
    double worst = 0.0;
    int rows = 0;
    while (std::getline(lines, row)) {
        double t, c, l, b;
        REQUIRE(std::sscanf(row.c_str(), "%lf,%lf,%lf,%lf", &t, &c, &l, &b) == 4);
        double s = std::sin(0.5 * t);
        worst = std::max(worst, std::abs(l - 4.0 * s * s));
        ++rows;
    }
    CHECK(rows == 2001);
    CHECK(worst <= 1e-4 * 4.0);

    // deterministic across reruns and worker counts
    RunFiles again = run_and_write(sc, 8);
    CHECK(again.checksum == first.checksum);
    CHECK(slurp(again.data_path) == data);

    std::remove(first.data_path.c_str());
    std::remove(first.meta_path.c_str());
}

TEST_CASE("make_setup wires the fock pairing") {
    Scenario sc;
    sc.system.dim = 2;
    sc.system.omega = 1.0;
    sc.state.amplitudes = {1.0};
    sc.bath.type = BathType::fock;
    sc.bath.omega = 0.8;
    sc.bath.occupation = 1;
    sc.grid = {1.0, 10};
    auto setup = make_setup(sc);
    REQUIRE(setup.terms.size() == 2);
    CHECK(setup.terms[0].bath_index == 0);
    CHECK(setup.terms[1].bath_index == 1);
    REQUIRE(setup.terms[0].components.size() == 1);
    CHECK(setup.terms[0].components[0].direction == 1);   // raising part
    CHECK(setup.terms[1].components[0].direction == -1);  // lowering part
    CHECK(setup.kernel.terms() == 2);
}
