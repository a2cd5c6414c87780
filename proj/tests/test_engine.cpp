#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "leakage/engine.hpp"
#include "leakage/scenario.hpp"

using namespace leakage;
using std::numbers::pi;

namespace {

EngineSetup example1_setup(const char* kind, double omega = 1.0, int dim = 12) {
    Scenario sc;
    sc.system.dim = dim;
    sc.system.omega = omega;
    if (std::string(kind) == "ground") sc.state.amplitudes = {1.0};
    else if (std::string(kind) == "first") sc.state.amplitudes = {0.0, 1.0};
    else sc.state.amplitudes = {1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
    sc.bath.type = BathType::trivial;
    sc.grid = {1.0, 1};
    return make_setup(sc);
}

double l_ground(double omega, double t) {
    double s = std::sin(0.5 * omega * t);
    return 4.0 * s * s / (omega * omega);
}

double l_first(double omega, double t) {
    double s = std::sin(0.5 * omega * t);
    return 12.0 * s * s / (omega * omega);
}

double l_super(double omega, double t) {
    double s2 = std::sin(0.5 * omega * t) * std::sin(0.5 * omega * t);
    return 4.0 * (s2 + s2 * s2) / (omega * omega);
}

}  // namespace

TEST_CASE("system kernel closed forms") {
    const double omega = 1.0;
    auto setup = example1_setup("ground");

    // eigenstate: single matrix element survives
    for (auto [s, sp] : {std::pair{1.3, 0.4}, {2.0, 2.0}, {0.7, 3.1}}) {
        Matrix S = system_kernel(setup.phi, setup.terms, setup.phase, s, sp);
        REQUIRE(S.rows() == 1);
        Complex expect = std::exp(Complex(0.0, -omega * (s - sp)));
        CHECK(std::abs(S(0, 0) - expect) <= 1e-13);
    }

    // coincident times on an eigenstate: a real nonnegative variance
    Matrix S0 = system_kernel(setup.phi, setup.terms, setup.phase, 1.7, 1.7);
    CHECK(std::abs(S0(0, 0).imag()) <= 1e-14);
    CHECK(S0(0, 0).real() >= 0.0);

    // superposition: 3/2 e^{-i dphi} + 1/2 e^{+i dphi} - cos(phi_s) cos(phi_s')
    auto sup = example1_setup("superposition");
    for (auto [s, sp] : {std::pair{0.9, 0.3}, {2.4, 1.1}}) {
        Matrix S = system_kernel(sup.phi, sup.terms, sup.phase, s, sp);
        Complex e_minus = std::exp(Complex(0.0, -omega * (s - sp)));
        Complex expect = 1.5 * e_minus + 0.5 * std::conj(e_minus) -
                         std::cos(omega * s) * std::cos(omega * sp);
        CHECK(std::abs(S(0, 0) - expect) <= 1e-13);
    }
}

TEST_CASE("integrand closed forms") {
    const double omega = 1.0;
    auto setup = example1_setup("ground");
    for (double sp : {0.0, 0.5, 1.9}) {
        CHECK(integrand(2.0, sp, setup) == doctest::Approx(2.0 * std::cos(omega * sp)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(integrand(1.0, 2.0, setup), std::domain_error);

    // sprime = 0 reduces to 2 Var(S(s)) Phi(0)
    auto sup = example1_setup("superposition");
    for (double s : {0.6, 1.4}) {
        Matrix S = system_kernel(sup.phi, sup.terms, sup.phase, s, s);
        CHECK(integrand(s, 0.0, sup) == doctest::Approx(2.0 * S(0, 0).real()).epsilon(1e-12));
    }
}

TEST_CASE("resonant one-photon pairing gives a flat integrand") {
    Scenario sc;
    sc.system.dim = 2;
    sc.system.omega = 0.8;  // splitting equal to the mode frequency
    sc.state.amplitudes = {1.0};
    sc.bath.type = BathType::fock;
    sc.bath.omega = 0.8;
    sc.bath.occupation = 1;
    sc.grid = {1.0, 1};
    auto setup = make_setup(sc);
    double ref = integrand(3.0, 0.0, setup);
    for (double sp : {0.4, 1.1, 2.7}) {
        CHECK(integrand(3.0, sp, setup) == doctest::Approx(ref).epsilon(1e-12));
    }
}

TEST_CASE("compute_C against the analytic integral") {
    const double omega = 1.0;
    auto setup = example1_setup("ground");
    SimulationGrid grid(2.0, 50);
    CHECK(compute_C(setup, grid, 0.0) == 0.0);
    double exact = 2.0 * std::sin(omega * 2.0) / omega;
    double err_coarse = std::abs(compute_C(setup, grid, 2.0) - exact);
    double err_fine = std::abs(compute_C(setup, SimulationGrid(2.0, 100), 2.0) - exact);
    CHECK(err_coarse / err_fine == doctest::Approx(4.0).epsilon(0.15));
    CHECK_THROWS_AS(compute_C(setup, grid, 2.0 * 0.512341), std::domain_error);
}

TEST_CASE("leakage series reproduces the closed-form coefficients") {
    const double omega = 1.0;
    SimulationGrid grid(4.0 * pi, 2000);

    struct Row {
        const char* kind;
        double (*exact)(double, double);
    };
    for (auto row : {Row{"ground", l_ground}, Row{"first", l_first}, Row{"superposition", l_super}}) {
        auto series = compute_L(example1_setup(row.kind), grid, 2);
        CHECK(series.L[0] == 0.0);
        CHECK(series.max_imag_residue <= 1e-9);
        double scale = 0.0;
        for (int k = 0; k <= grid.n_steps; ++k) {
            scale = std::max(scale, std::abs(row.exact(omega, grid.time(k))));
        }
        double max_err = 0.0;
        for (int k = 0; k <= grid.n_steps; ++k) {
            max_err = std::max(max_err, std::abs(series.L[k] - row.exact(omega, grid.time(k))));
        }
        CHECK(max_err / scale <= 1e-3);
        // pointwise check at the first peak
        int kpi = grid.n_steps / 4;  // omega t = pi
        CHECK(series.L[kpi] == doctest::Approx(row.exact(omega, grid.time(kpi))).epsilon(1e-4));
    }
}

TEST_CASE("quadrature order on the full series") {
    const double omega = 1.0;
    auto err_at = [&](int n) {
        auto series = compute_L(example1_setup("ground"), SimulationGrid(4.0 * pi, n));
        double e = 0.0;
        for (size_t k = 0; k < series.L.size(); ++k) {
            e = std::max(e, std::abs(series.L[k] - l_ground(omega, series.times[k])));
        }
        return e;
    };
    double ratio = err_at(250) / err_at(500);
    CHECK(ratio >= 3.5);
    CHECK(ratio <= 4.5);
}

TEST_CASE("worker count does not change a single bit") {
    auto setup = example1_setup("superposition");
    SimulationGrid grid(4.0 * pi, 400);
    auto one = compute_L(setup, grid, 1);
    auto four = compute_L(setup, grid, 4);
    auto eight = compute_L(setup, grid, 8);
    for (size_t k = 0; k < one.L.size(); ++k) {
        CHECK(one.C[k] == four.C[k]);
        CHECK(one.L[k] == four.L[k]);
        CHECK(one.L[k] == eight.L[k]);
    }
}

TEST_CASE("constant frequency shift is bitwise equal to the shifted uncontrolled run") {
    const double omega = 1.0, tau = 0.7, phi0 = 0.45;
    Scenario controlled;
    controlled.system.omega = omega;
    controlled.state.amplitudes = {1.0, 1.0};
    controlled.bath.type = BathType::trivial;
    controlled.control.emplace(tau, tau, phi0, PulseShape::rectangular);
    controlled.grid = {1.0, 1};

    Scenario shifted = controlled;
    shifted.control.reset();
    shifted.system.omega = omega + phi0 / tau;

    SimulationGrid grid(4.0 * pi, 300);
    auto lhs = compute_L(make_setup(controlled), grid);
    auto rhs = compute_L(make_setup(shifted), grid);
    for (size_t k = 0; k < lhs.L.size(); ++k) {
        CHECK(lhs.C[k] == rhs.C[k]);
        CHECK(lhs.L[k] == rhs.L[k]);
    }
}

TEST_CASE("thermal run stays nonnegative with tiny imaginary residue") {
    Scenario sc = fig1_scenario();
    sc.bath.ell = 120;  // light bath for a unit test
    sc.grid = {1500.0, 300};
    auto series = compute_L(make_setup(sc), make_grid(sc), 2);
    CHECK(series.L[0] == 0.0);
    CHECK(series.max_imag_residue <= 1e-9);
    for (double l : series.L) CHECK(l >= -1e-9);
}

TEST_CASE("stationary rate") {
    Scenario sc = fig1_scenario();
    sc.bath.ell = 120;
    sc.grid = {1500.0, 500};
    sc.state.amplitudes = {1.0};  // eigenstate: kernel fully stationary
    auto setup = make_setup(sc);
    auto grid = make_grid(sc);

    auto dom = stationary_rate(setup, grid, 1500.0);
    CHECK(dom.rate >= -1e-12);
    CHECK(dom.L_dom.front() == 0.0);
    CHECK(dom.L_dom.back() == doctest::Approx(dom.rate * 1500.0));

    // linear late-time growth of the full series
    auto series = compute_L(setup, grid, 2);
    CHECK(std::abs(series.L.back() - dom.L_dom.back()) / dom.L_dom.back() <= 0.5);

    // superposition: coefficients 3/2 and 1/2, the mean cross term excluded
    sc.state.amplitudes = {1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
    auto sup = make_setup(sc);
    auto dom_sup = stationary_rate(sup, grid, 1500.0);
    double expect = 0.0;
    const double W = sc.system.omega;
    const double dt = grid.dt();
    for (int l = 0; l <= grid.n_steps; ++l) {
        double w = (l == 0 || l == grid.n_steps) ? 0.5 : 1.0;
        double u = grid.time(l);
        Complex phi = sup.kernel(0, 0, u, 0.0);
        Complex term = 1.5 * std::exp(Complex(0.0, -W * u)) * phi +
                       0.5 * std::exp(Complex(0.0, W * u)) * phi;
        expect += w * 2.0 * term.real();
    }
    expect *= dt;
    CHECK(dom_sup.rate == doctest::Approx(expect).epsilon(1e-12));

    // rejected inputs
    Scenario pulsed = sc;
    pulsed.control.emplace(10.0, 2.0, 0.5, PulseShape::rectangular);
    CHECK_THROWS_AS(stationary_rate(make_setup(pulsed), grid, 1500.0), std::invalid_argument);
}

TEST_CASE("propagation with zero coupling is frozen") {
    Scenario sc = fig1_scenario();
    sc.bath.ell = 40;
    sc.grid = {100.0, 50};
    auto setup = make_setup(sc);
    Matrix V = Matrix::Zero(sc.system.dim, 2);
    V(0, 0) = 1.0;
    V(1, 1) = 1.0;
    Matrix eta0(2, 2);
    eta0 << 0.5, Complex(0.25, 0.1), Complex(0.25, -0.1), 0.5;
    auto series = propagate_subspace(V, SubspaceDensity(2, eta0), make_grid(sc), setup, 0.0);
    REQUIRE(series.size() == 51);
    for (const auto& s : series) {
        CHECK((s.eta - eta0).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("d = 1 propagation matches exp(-L)") {
    const double lambda = 0.1;
    Scenario sc;
    sc.system.omega = 1.0;
    sc.state.amplitudes = {1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
    sc.bath.type = BathType::trivial;
    sc.grid = {4.0 * pi, 2000};
    auto setup = make_setup(sc);
    auto grid = make_grid(sc);

    Matrix V(sc.system.dim, 1);
    V.col(0) = setup.phi.amplitudes();
    Matrix eta0 = Matrix::Ones(1, 1);

    auto series = compute_L(setup, grid, 2);
    auto etas = propagate_subspace(V, SubspaceDensity(1, eta0), grid, setup, lambda);
    double max_gap = 0.0;
    for (int k = 0; k <= grid.n_steps; ++k) {
        double b = std::exp(-lambda * lambda * series.L[k]);
        max_gap = std::max(max_gap, std::abs(etas[k].eta(0, 0).real() - b));
    }
    CHECK(max_gap <= 1e-6);
}

TEST_CASE("trace never grows under leakage-only dynamics") {
    const double lambda = 0.1;
    Scenario sc;
    sc.system.omega = 1.0;
    sc.state.amplitudes = {1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
    sc.bath.type = BathType::trivial;
    sc.grid = {4.0 * pi, 600};
    auto setup = make_setup(sc);

    Matrix V = Matrix::Zero(sc.system.dim, 2);
    V(0, 0) = 1.0;
    V(1, 1) = 1.0;
    Matrix eta0(2, 2);
    eta0 << 0.5, 0.5, 0.5, 0.5;
    auto etas = propagate_subspace(V, SubspaceDensity(2, eta0), make_grid(sc), setup, lambda);
    // the dynamics is periodic, so the trace revives; it must stay inside
    // [0, 1] throughout and decay monotonically over the first half period
    for (size_t k = 1; k < etas.size(); ++k) {
        CHECK(etas[k].trace_real() <= 1.0 + 1e-9);
        CHECK(etas[k].trace_real() >= -1e-9);
        if (k <= etas.size() / 4) {
            CHECK(etas[k].trace_real() <= etas[k - 1].trace_real() + 1e-9);
        }
    }
}

TEST_CASE("validation") {
    CHECK_THROWS_AS(SimulationGrid(0.0, 10), std::invalid_argument);
    CHECK_THROWS_AS(SimulationGrid(1.0, 0), std::invalid_argument);

    Matrix bad(2, 2);
    bad << 1.0, Complex(0.0, 1.0), Complex(0.0, 1.0), 0.0;
    CHECK_THROWS_AS(SubspaceDensity(2, bad), std::invalid_argument);
    Matrix big = 2.0 * Matrix::Identity(2, 2);
    CHECK_THROWS_AS(SubspaceDensity(2, big), std::invalid_argument);

    auto setup = example1_setup("ground");
    Matrix skew(12, 1);
    skew.setZero();
    skew(0, 0) = 0.9;
    CHECK_THROWS_AS(propagate_subspace(skew, SubspaceDensity(1, Matrix::Ones(1, 1)),
                                       SimulationGrid(1.0, 10), setup, 0.1),
                    std::invalid_argument);
    CHECK_THROWS_AS(compute_L(setup, SimulationGrid(1.0, 10), 0), std::invalid_argument);
}
