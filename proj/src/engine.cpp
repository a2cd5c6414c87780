#include "leakage/engine.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

namespace leakage {

namespace {

struct FlatComponent {
    const Operator* op;
    int direction;
    int term;        // index into setup.terms
    int bath_index;  // kernel index of the owning term
};

std::vector<FlatComponent> flatten(const std::vector<InteractionTerm>& terms) {
    std::vector<FlatComponent> comps;
    for (size_t a = 0; a < terms.size(); ++a) {
        for (const auto& c : terms[a].components) {
            if (c.direction != 1 && c.direction != -1) {
                throw std::invalid_argument("InteractionTerm: direction must be +1 or -1");
            }
            comps.push_back({&c.op, c.direction, static_cast<int>(a), terms[a].bath_index});
        }
    }
    if (comps.empty()) throw std::invalid_argument("EngineSetup: no interaction components");
    return comps;
}

int system_dim(const std::vector<FlatComponent>& comps) {
    int d = comps.front().op->dim();
    for (const auto& c : comps) {
        if (c.op->dim() != d) throw std::invalid_argument("InteractionTerm: operator dims differ");
    }
    return d;
}

/// Immutable per-run caches: component phases on the grid, pair expectation
/// constants, and the bath kernel sampled at grid offsets.
struct EngineCache {
    const EngineSetup& setup;
    SimulationGrid grid;
    std::vector<FlatComponent> comps;
    // ph[p][k] = exp(i dir_p phi(t_k))
    std::vector<std::vector<Complex>> ph;
    // cov[p][q] = <A_p A_q> - <A_p><A_q>
    std::vector<std::vector<Complex>> cov;
    // phi_c[a][b][l] = Phi_{ab}(t_l, 0) for stationary kernels
    std::vector<std::vector<std::vector<Complex>>> phi_c;
    bool stationary;

    EngineCache(const EngineSetup& s, const SimulationGrid& g)
        : setup(s), grid(g), comps(flatten(s.terms)), stationary(s.kernel.stationary()) {
        const int dim = system_dim(comps);
        if (s.phi.dim() != dim) throw std::invalid_argument("EngineSetup: state dim mismatch");
        const size_t np = comps.size();
        const int n = grid.n_steps;

        ph.assign(np, std::vector<Complex>(n + 1));
        for (size_t p = 0; p < np; ++p) {
            for (int k = 0; k <= n; ++k) {
                double phase = comps[p].direction * setup.phase(grid.time(k));
                ph[p][k] = std::exp(Complex(0.0, phase));
            }
        }

        const Vector& v = s.phi.amplitudes();
        std::vector<Complex> mean(np);
        std::vector<Vector> applied(np);
        for (size_t p = 0; p < np; ++p) {
            applied[p] = comps[p].op->entries() * v;
            mean[p] = v.dot(applied[p]);
        }
        cov.assign(np, std::vector<Complex>(np));
        for (size_t p = 0; p < np; ++p) {
            for (size_t q = 0; q < np; ++q) {
                Complex raw = v.dot(comps[p].op->entries() * applied[q]);
                cov[p][q] = raw - mean[p] * mean[q];
            }
        }

        if (stationary) {
            const int nt = s.kernel.terms();
            phi_c.assign(nt, std::vector<std::vector<Complex>>(nt, std::vector<Complex>(n + 1)));
            for (int a = 0; a < nt; ++a) {
                for (int b = 0; b < nt; ++b) {
                    for (int l = 0; l <= n; ++l) {
                        phi_c[a][b][l] = s.kernel(a, b, grid.time(l), 0.0);
                    }
                }
            }
        }
    }

    // sum_{pq} ph_p(t_k) ph_q(t_{k-l}) cov_{pq} Phi_{ab}(t_k, t_{k-l})
    Complex z(int k, int l) const {
        Complex sum(0.0, 0.0);
        for (size_t p = 0; p < comps.size(); ++p) {
            for (size_t q = 0; q < comps.size(); ++q) {
                if (cov[p][q] == Complex(0.0, 0.0)) continue;
                Complex phi_ab = stationary
                                     ? phi_c[comps[p].bath_index][comps[q].bath_index][l]
                                     : setup.kernel(comps[p].bath_index, comps[q].bath_index,
                                                    grid.time(k), grid.time(k - l));
                sum += ph[p][k] * ph[q][k - l] * cov[p][q] * phi_ab;
            }
        }
        return sum;
    }

    double C_at(int k, double* imag_residue) const {
        if (k == 0) {
            if (imag_residue) *imag_residue = 0.0;
            return 0.0;
        }
        Complex zsum(0.0, 0.0);
        for (int l = 0; l <= k; ++l) {
            double w = (l == 0 || l == k) ? 0.5 : 1.0;
            zsum += w * z(k, l);
        }
        Complex total = zsum + std::conj(zsum);  // the h.c. of Eq. (5)
        if (imag_residue) *imag_residue = std::abs(total.imag());
        return total.real() * grid.dt();
    }
};

}  // namespace

SimulationGrid::SimulationGrid(double t_max_, int n_steps_) : t_max(t_max_), n_steps(n_steps_) {
    if (t_max <= 0.0) throw std::invalid_argument("SimulationGrid: t_max must be positive");
    if (n_steps < 1) throw std::invalid_argument("SimulationGrid: n_steps must be >= 1");
}

double SystemPhase::operator()(double t) const {
    if (auto rate = linear_rate()) return *rate * t;
    return omega * t + theta(t);
}

std::optional<double> SystemPhase::linear_rate() const {
    if (auto r = theta.constant_rate()) return omega + *r;
    return std::nullopt;
}

std::vector<double> LeakageSeries::b(double lambda) const {
    std::vector<double> out(L.size());
    for (size_t k = 0; k < L.size(); ++k) out[k] = std::exp(-lambda * lambda * L[k]);
    return out;
}

SubspaceDensity::SubspaceDensity(int d_, Matrix eta_) : d(d_), eta(std::move(eta_)) {
    if (d < 1 || eta.rows() != d || eta.cols() != d) {
        throw std::invalid_argument("SubspaceDensity: eta must be d x d");
    }
    if ((eta - eta.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
        throw std::invalid_argument("SubspaceDensity: eta must be Hermitian");
    }
    double tr = eta.trace().real();
    if (std::abs(eta.trace().imag()) > 1e-10 || tr < -1e-9 || tr > 1.0 + 1e-9) {
        throw std::invalid_argument("SubspaceDensity: trace must be real in [0, 1]");
    }
}

double SubspaceDensity::trace_real() const { return eta.trace().real(); }

Matrix system_kernel(const StateVector& phi, const std::vector<InteractionTerm>& terms,
                     const SystemPhase& phase, double s, double sprime) {
    auto comps = flatten(terms);
    const int dim = system_dim(comps);
    if (phi.dim() != dim) throw std::invalid_argument("system_kernel: state dim mismatch");

    const int nt = static_cast<int>(terms.size());
    const Vector& v = phi.amplitudes();

    auto term_operator = [&](int a, double t) {
        Matrix m = Matrix::Zero(dim, dim);
        for (const auto& c : comps) {
            if (c.term != a) continue;
            m += std::exp(Complex(0.0, c.direction * phase(t))) * c.op->entries();
        }
        return m;
    };

    Matrix out(nt, nt);
    for (int a = 0; a < nt; ++a) {
        Matrix Sa = term_operator(a, s);
        Vector left = Sa.adjoint() * v;  // <phi| S_a(s)
        Complex mean_a = v.dot(Sa * v);
        for (int b = 0; b < nt; ++b) {
            Matrix Sb = term_operator(b, sprime);
            Vector right = Sb * v;
            Complex mean_b = v.dot(right);
            out(a, b) = left.dot(right) - mean_a * mean_b;
        }
    }
    return out;
}

double integrand(double s, double sprime, const EngineSetup& setup) {
    if (sprime < 0.0 || sprime > s) throw std::domain_error("integrand: need 0 <= sprime <= s");
    Matrix S = system_kernel(setup.phi, setup.terms, setup.phase, s, s - sprime);
    Complex sum(0.0, 0.0);
    for (size_t a = 0; a < setup.terms.size(); ++a) {
        for (size_t b = 0; b < setup.terms.size(); ++b) {
            sum += S(a, b) * setup.kernel(setup.terms[a].bath_index, setup.terms[b].bath_index,
                                          s, s - sprime);
        }
    }
    return 2.0 * sum.real();
}

double compute_C(const EngineSetup& setup, const SimulationGrid& grid, double s) {
    if (s < 0.0) throw std::domain_error("compute_C: s must be >= 0");
    const double dt = grid.dt();
    int k = static_cast<int>(std::llround(s / dt));
    if (std::abs(k * dt - s) > 1e-9 * std::max(1.0, s) || k > grid.n_steps) {
        throw std::domain_error("compute_C: s must lie on the grid");
    }
    if (k == 0) return 0.0;
    double sum = 0.0;
    for (int l = 0; l <= k; ++l) {
        double w = (l == 0 || l == k) ? 0.5 : 1.0;
        sum += w * integrand(s, l * dt, setup);
    }
    return sum * dt;
}

LeakageSeries compute_L(const EngineSetup& setup, const SimulationGrid& grid, int workers) {
    if (workers < 1) throw std::invalid_argument("compute_L: workers must be >= 1");
    EngineCache cache(setup, grid);
    const int n = grid.n_steps;

    LeakageSeries out;
    out.times.resize(n + 1);
    out.C.assign(n + 1, 0.0);
    out.L.assign(n + 1, 0.0);
    for (int k = 0; k <= n; ++k) out.times[k] = grid.time(k);

    std::vector<double> residue(n + 1, 0.0);
    auto work = [&](int lo, int hi) {
        for (int k = lo; k < hi; ++k) out.C[k] = cache.C_at(k, &residue[k]);
    };
    if (workers == 1) {
        work(0, n + 1);
    } else {
        std::vector<std::thread> pool;
        int chunk = (n + 1 + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            int lo = w * chunk;
            int hi = std::min(n + 1, lo + chunk);
            if (lo < hi) pool.emplace_back(work, lo, hi);
        }
        for (auto& t : pool) t.join();
    }

    // cumulative trapezoid, ascending order on one thread
    const double dt = grid.dt();
    for (int k = 1; k <= n; ++k) {
        out.L[k] = out.L[k - 1] + 0.5 * dt * (out.C[k - 1] + out.C[k]);
        out.max_imag_residue = std::max(out.max_imag_residue, residue[k]);
    }
    return out;
}

StationaryRate stationary_rate(const EngineSetup& setup, const SimulationGrid& grid,
                               double transient_cut) {
    if (!setup.kernel.stationary()) {
        throw std::invalid_argument("stationary_rate: bath kernel is not stationary");
    }
    auto rate_opt = setup.phase.linear_rate();
    if (!rate_opt) {
        throw std::invalid_argument(
            "stationary_rate: system phase is not linear (control must be absent or delta == tau)");
    }
    const double omega_eff = *rate_opt;
    auto comps = flatten(setup.terms);
    system_dim(comps);

    const Vector& v = setup.phi.amplitudes();
    const double dt = grid.dt();
    int cut = std::min(grid.n_steps, static_cast<int>(std::floor(transient_cut / dt + 1e-9)));
    if (cut < 1) throw std::invalid_argument("stationary_rate: transient_cut below one grid step");

    // raw pair expectations; the mean cross term is excluded from the
    // dominant part
    const size_t np = comps.size();
    std::vector<std::vector<Complex>> raw(np, std::vector<Complex>(np));
    for (size_t p = 0; p < np; ++p) {
        for (size_t q = 0; q < np; ++q) {
            raw[p][q] = v.dot(comps[p].op->entries() * (comps[q].op->entries() * v));
        }
    }

    auto stationary_integrand = [&](int l) {
        Complex sum(0.0, 0.0);
        double u = l * dt;
        for (size_t p = 0; p < np; ++p) {
            for (size_t q = 0; q < np; ++q) {
                if (comps[p].direction + comps[q].direction != 0) continue;
                Complex phase = std::exp(Complex(0.0, comps[p].direction * omega_eff * u));
                sum += raw[p][q] * phase *
                       setup.kernel(comps[p].bath_index, comps[q].bath_index, u, 0.0);
            }
        }
        return 2.0 * sum.real();
    };

    double R = 0.0;
    for (int l = 0; l <= cut; ++l) {
        double w = (l == 0 || l == cut) ? 0.5 : 1.0;
        R += w * stationary_integrand(l);
    }
    R *= dt;

    StationaryRate out;
    out.rate = R;
    out.times.resize(grid.n_steps + 1);
    out.L_dom.resize(grid.n_steps + 1);
    for (int k = 0; k <= grid.n_steps; ++k) {
        out.times[k] = grid.time(k);
        out.L_dom[k] = R * grid.time(k);
    }
    return out;
}

std::vector<SubspaceDensity> propagate_subspace(const Matrix& subspace_basis,
                                                const SubspaceDensity& eta0,
                                                const SimulationGrid& grid,
                                                const EngineSetup& setup, double lambda) {
    auto comps = flatten(setup.terms);
    const int N = system_dim(comps);
    const int d = eta0.d;
    const Matrix& V = subspace_basis;
    if (V.rows() != N || V.cols() != d) {
        throw std::invalid_argument("propagate_subspace: subspace basis must be dim x d");
    }
    if ((V.adjoint() * V - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-10) {
        throw std::invalid_argument("propagate_subspace: subspace basis is not orthonormal");
    }

    const double dt = grid.dt();
    const int n = grid.n_steps;
    const int nterms = static_cast<int>(setup.terms.size());
    const size_t np = comps.size();

    // component phase factors on the grid nodes
    std::vector<std::vector<Complex>> gnode(np, std::vector<Complex>(n + 1));
    for (size_t q = 0; q < np; ++q) {
        for (int k = 0; k <= n; ++k) {
            gnode[q][k] = std::exp(Complex(0.0, comps[q].direction * setup.phase(grid.time(k))));
        }
    }
    auto g_at = [&](size_t q, double t) {
        return std::exp(Complex(0.0, comps[q].direction * setup.phase(t)));
    };

    // Phi cached at half-step offsets (both signs) for stationary kernels,
    // covering the RK4 midpoints
    const bool stat = setup.kernel.stationary();
    const int nb = setup.kernel.terms();
    const int half_span = 2 * n + 1;
    std::vector<std::vector<std::vector<Complex>>> phi_half;
    if (stat) {
        phi_half.assign(nb, std::vector<std::vector<Complex>>(
                                nb, std::vector<Complex>(2 * half_span + 1)));
        for (int a = 0; a < nb; ++a)
            for (int b = 0; b < nb; ++b)
                for (int m = -half_span; m <= half_span; ++m)
                    phi_half[a][b][m + half_span] = setup.kernel(a, b, 0.5 * m * dt, 0.0);
    }
    auto phi_at = [&](int a, int b, double t, double s) -> Complex {
        if (stat) {
            double u = t - s;
            int m = static_cast<int>(std::llround(2.0 * u / dt));
            if (std::abs(m) <= half_span &&
                std::abs(0.5 * m * dt - u) <= 1e-9 * std::max(1.0, std::abs(u))) {
                return phi_half[a][b][m + half_span];
            }
        }
        return setup.kernel(a, b, t, s);
    };

    auto term_operator = [&](int a, double t) {
        Matrix m = Matrix::Zero(N, N);
        for (size_t p = 0; p < np; ++p) {
            if (comps[p].term != a) continue;
            m += g_at(p, t) * comps[p].op->entries();
        }
        return m;
    };

    // M_a(t)  = sum_q A_q int_0^t Phi_{a, term(q)}(t, s) g_q(s) ds
    // Mt_a(t) = sum_q A_q int_0^t Phi_{term(q), a}(s, t) g_q(s) ds
    auto memory_operators = [&](int a, double t, Matrix& M, Matrix& Mt) {
        M = Matrix::Zero(N, N);
        Mt = Matrix::Zero(N, N);
        if (t <= 0.0) return;
        int J = static_cast<int>(std::floor(t / dt + 1e-9));
        J = std::min(J, n);
        double tail = t - J * dt;
        const int ba = setup.terms[a].bath_index;
        for (size_t q = 0; q < np; ++q) {
            const int bq = comps[q].bath_index;
            Complex I1(0.0, 0.0), I2(0.0, 0.0);
            if (J >= 1) {
                for (int j = 0; j <= J; ++j) {
                    double w = (j == 0 || j == J) ? 0.5 : 1.0;
                    double s = j * dt;
                    I1 += w * phi_at(ba, bq, t, s) * gnode[q][j];
                    I2 += w * phi_at(bq, ba, s, t) * gnode[q][j];
                }
                I1 *= dt;
                I2 *= dt;
            }
            if (tail > 1e-12 * dt) {
                Complex f0a = phi_at(ba, bq, t, J * dt) * gnode[q][J];
                Complex f1a = phi_at(ba, bq, t, t) * g_at(q, t);
                Complex f0b = phi_at(bq, ba, J * dt, t) * gnode[q][J];
                Complex f1b = phi_at(bq, ba, t, t) * g_at(q, t);
                I1 += 0.5 * tail * (f0a + f1a);
                I2 += 0.5 * tail * (f0b + f1b);
            }
            M += I1 * comps[q].op->entries();
            Mt += I2 * comps[q].op->entries();
        }
    };

    const double l2 = lambda * lambda;
    auto rhs = [&](double t, const Matrix& eta_d) -> Matrix {
        if (l2 == 0.0) return Matrix::Zero(d, d);
        Matrix eta_f = V * eta_d * V.adjoint();
        Matrix total = Matrix::Zero(N, N);
        for (int a = 0; a < nterms; ++a) {
            Matrix Sa = term_operator(a, t);
            Matrix M, Mt;
            memory_operators(a, t, M, Mt);
            total += Sa * (M * eta_f) - M * eta_f * Sa + eta_f * Mt * Sa - Sa * (eta_f * Mt);
        }
        return -l2 * (V.adjoint() * total * V);
    };

    std::vector<SubspaceDensity> series;
    series.reserve(n + 1);
    series.push_back(eta0);
    Matrix eta = eta0.eta;
    for (int k = 0; k < n; ++k) {
        double t = grid.time(k);
        Matrix k1 = rhs(t, eta);
        Matrix k2 = rhs(t + 0.5 * dt, eta + 0.5 * dt * k1);
        Matrix k3 = rhs(t + 0.5 * dt, eta + 0.5 * dt * k2);
        Matrix k4 = rhs(t + dt, eta + dt * k3);
        eta += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        // keep the block exactly Hermitian against roundoff drift
        eta = 0.5 * (eta + eta.adjoint().eval());
        series.emplace_back(d, eta);
    }
    return series;
}

}  // namespace leakage
