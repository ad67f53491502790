#include "mkdvq/sim.hpp"

#include <cmath>
#include <fstream>

#include "mkdvq/errors.hpp"

namespace mkdvq {

namespace {

void check_config(const SimConfig& cfg) {
    if (!(cfg.x_max > 0.0) || !(cfg.h > 0.0) || !(cfg.t_end >= 0.0) || !(cfg.trace_dt > 0.0))
        throw Error(ErrorKind::Config, "simulation needs x_max, h, trace_dt > 0 and t_end >= 0");
    if (cfg.x_max / cfg.h < 8.0) throw Error(ErrorKind::Config, "grid too coarse (fewer than 8 cells)");
    if (cfg.sponge_fraction < 0.0 || cfg.sponge_fraction >= 1.0)
        throw Error(ErrorKind::Config, "sponge_fraction must lie in [0, 1)");
}

struct Rhs {
    const SimProblem& prob;
    const SimConfig& cfg;
    const std::vector<double>& x;
    std::vector<double> sigma;
    double h;
    std::vector<double> ext, flux;

    Rhs(const SimProblem& p, const SimConfig& c, const std::vector<double>& xs, double hh)
        : prob(p), cfg(c), x(xs), h(hh) {
        sigma.resize(x.size());
        for (std::size_t j = 0; j < x.size(); ++j) sigma[j] = sponge(cfg, x[j]);
    }

    // u_t = ∂x(-2u³ + u_xx) + f - σu, with the flux differenced centrally.
    void operator()(std::vector<double>& u, double t, std::vector<double>& du) {
        const std::size_t n = u.size();
        const double h2 = h * h;
        du.assign(n, 0.0);
        if (cfg.periodic) {
            flux.resize(n);
            for (std::size_t j = 0; j < n; ++j) {
                double um = u[(j + n - 1) % n], up = u[(j + 1) % n];
                flux[j] = -2.0 * u[j] * u[j] * u[j] + (up - 2.0 * u[j] + um) / h2;
            }
            for (std::size_t j = 0; j < n; ++j) du[j] = (flux[(j + 1) % n] - flux[(j + n - 1) % n]) / (2.0 * h);
        } else {
            u[0] = prob.g0 ? prob.g0(t) : 0.0;
            u[n - 1] = prob.right ? prob.right(x[n - 1], t) : 0.0;
            // ext[i] = u_{i-1}, i = 0..n+1
            ext.resize(n + 2);
            // quartic through u0, u_x(0) = g1, u1, u2, u3
            const double G1 = prob.g1 ? prob.g1(t) : 0.0;
            ext[0] = -4.0 * h * G1 - 10.0 / 3.0 * u[0] + 6.0 * u[1] - 2.0 * u[2] + u[3] / 3.0;
            for (std::size_t j = 0; j < n; ++j) ext[j + 1] = u[j];
            // x_max is outflow for every mode: only u_N is imposed, the ghost is extrapolated.
            ext[n + 1] = prob.right ? prob.right(x[n - 1] + h, t)
                                    : 4.0 * u[n - 1] - 6.0 * u[n - 2] + 4.0 * u[n - 3] - u[n - 4];
            flux.resize(n);
            for (std::size_t j = 0; j < n; ++j) {
                double uj = ext[j + 1];
                flux[j] = -2.0 * uj * uj * uj + (ext[j + 2] - 2.0 * uj + ext[j]) / h2;
            }
            for (std::size_t j = 1; j + 1 < n; ++j) du[j] = (flux[j + 1] - flux[j - 1]) / (2.0 * h);
        }
        const std::size_t lo = cfg.periodic ? 0 : 1, hi = cfg.periodic ? n : n - 1;
        for (std::size_t j = lo; j < hi; ++j) {
            if (prob.forcing) du[j] += prob.forcing(x[j], t);
            du[j] -= sigma[j] * u[j];
        }
    }
};

void record(SimState& st) {
    st.trace_t.push_back(st.t);
    st.g0.push_back(st.u[0]);
    st.g1.push_back(trace_ux(st.u, st.h));
    st.g2.push_back(trace_uxx(st.u, st.h));
}

}  // namespace

double sponge(const SimConfig& cfg, double x) {
    if (cfg.periodic || cfg.sponge_fraction == 0.0) return 0.0;
    double xs = (1.0 - cfg.sponge_fraction) * cfg.x_max;
    if (x <= xs) return 0.0;
    double s = (x - xs) / (cfg.x_max - xs);
    return cfg.sponge_strength * s * s;
}

SimState init_state(const SimProblem& prob, const SimConfig& cfg) {
    check_config(cfg);
    if (!prob.u0) throw Error(ErrorKind::Config, "simulation needs u0");
    SimState st;
    long cells = std::lround(cfg.x_max / cfg.h);
    st.h = cfg.x_max / double(cells);
    std::size_t n = cfg.periodic ? std::size_t(cells) : std::size_t(cells) + 1;
    st.x.resize(n);
    st.u.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        st.x[j] = st.h * double(j);
        st.u[j] = prob.u0(st.x[j]);
    }
    if (!cfg.periodic) {
        if (prob.g0) st.u[0] = prob.g0(0.0);
        st.u[n - 1] = prob.right ? prob.right(st.x[n - 1], 0.0) : 0.0;
    }
    st.dt = cfg.step_size();
    return st;
}

void step(SimState& st, const SimProblem& prob, const SimConfig& cfg, double dt) {
    if (!(dt > 0.0) || dt > cfg.cfl_limit * st.h * st.h * st.h)
        throw Error(ErrorKind::CFLViolation, "dt = " + std::to_string(dt) + " exceeds " +
                                                 std::to_string(cfg.cfl_limit) + "·h³");
    static thread_local std::vector<double> k1, k2, k3, k4, w;
    Rhs f(prob, cfg, st.x, st.h);
    const std::size_t n = st.u.size();
    w = st.u;
    f(w, st.t, k1);
    for (std::size_t j = 0; j < n; ++j) w[j] = st.u[j] + 0.5 * dt * k1[j];
    f(w, st.t + 0.5 * dt, k2);
    for (std::size_t j = 0; j < n; ++j) w[j] = st.u[j] + 0.5 * dt * k2[j];
    f(w, st.t + 0.5 * dt, k3);
    for (std::size_t j = 0; j < n; ++j) w[j] = st.u[j] + dt * k3[j];
    f(w, st.t + dt, k4);
    for (std::size_t j = 0; j < n; ++j) st.u[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    st.t += dt;
    if (!cfg.periodic) {
        st.u[0] = prob.g0 ? prob.g0(st.t) : 0.0;
        st.u[n - 1] = prob.right ? prob.right(st.x[n - 1], st.t) : 0.0;
    }
    for (double v : st.u)
        if (!std::isfinite(v)) throw Error(ErrorKind::NaNDetected, "non-finite value at t = " + std::to_string(st.t));
}

SimState simulate(const SimProblem& prob, const SimConfig& cfg) {
    SimState st = init_state(prob, cfg);
    const double dt0 = st.dt;
    long nsteps = std::lround(std::ceil(cfg.t_end / dt0 - 1e-9));
    if (nsteps == 0) nsteps = cfg.t_end > 0.0 ? 1 : 0;
    const double dt = nsteps > 0 ? cfg.t_end / double(nsteps) : dt0;
    st.dt = dt;
    const long every = std::max(1L, std::lround(cfg.trace_dt / dt));
    if (!cfg.periodic) record(st);
    for (long i = 1; i <= nsteps; ++i) {
        step(st, prob, cfg, dt);
        st.t = dt * double(i);
        if (!cfg.periodic && (i % every == 0 || i == nsteps)) record(st);
    }
    return st;
}

double trace_ux(const std::vector<double>& u, double h) {
    return (-25.0 * u[0] + 48.0 * u[1] - 36.0 * u[2] + 16.0 * u[3] - 3.0 * u[4]) / (12.0 * h);
}

double trace_uxx(const std::vector<double>& u, double h) {
    return (45.0 * u[0] - 154.0 * u[1] + 214.0 * u[2] - 156.0 * u[3] + 61.0 * u[4] - 10.0 * u[5]) / (12.0 * h * h);
}

Traces extract_traces(const SimState& st) { return {st.trace_t, st.g0, st.g1, st.g2}; }

HalfLineData to_half_line_data(const SimState& st, const SimProblem& prob) {
    if (st.trace_t.size() < 4) throw Error(ErrorKind::InsufficientData, "run recorded fewer than 4 trace samples");
    HalfLineData d;
    d.u0 = HalfLineFn::closed_form(prob.u0, "sim-u0");
    d.g0 = HalfLineFn::samples(st.trace_t, st.g0);
    d.g1 = HalfLineFn::samples(st.trace_t, st.g1);
    d.g2 = HalfLineFn::samples(st.trace_t, st.g2);
    d.x_max = st.x.back();
    d.t_max = st.trace_t.back();
    d.tail = TailModel::Kind::None;
    return d;
}

HalfLineData snapshot_data(const SimState& st) {
    HalfLineData d;
    d.u0 = HalfLineFn::samples(st.x, st.u);
    d.x_max = st.x.back();
    d.t_max = 0.0;
    d.tail = TailModel::Kind::None;
    return d;
}

double mass(const SimState& st, bool periodic) {
    double m = 0.0;
    for (double v : st.u) m += v;
    if (!periodic) m -= 0.5 * (st.u.front() + st.u.back());
    return m * st.h;
}

void write_traces_csv(const SimState& st, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Config, "cannot write " + path);
    out.precision(17);
    out << "t,g0,g1,g2\n";
    for (std::size_t i = 0; i < st.trace_t.size(); ++i)
        out << st.trace_t[i] << ',' << st.g0[i] << ',' << st.g1[i] << ',' << st.g2[i] << '\n';
}

void write_snapshot_csv(const SimState& st, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Config, "cannot write " + path);
    out.precision(17);
    out << "x,u\n";
    for (std::size_t j = 0; j < st.x.size(); ++j) out << st.x[j] << ',' << st.u[j] << '\n';
}

}  // namespace mkdvq
