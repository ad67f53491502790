#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mkdvq/spectral.hpp"

namespace mkdvq {

struct SimConfig {
    double x_max = 40.0;
    double h = 0.1;
    double t_end = 20.0;
    double cfl_fraction = 0.5;  // dt = cfl_fraction·h³ when dt is not given
    double dt = 0.0;
    double cfl_limit = 1.0;     // RK4 on the centered u_xxx stencil is stable to about 1.09 h³
    double sponge_fraction = 0.15;
    double sponge_strength = 20.0;
    double trace_dt = 0.005;    // trace sampling interval (rounded to whole steps)
    bool periodic = false;

    double step_size() const { return dt > 0.0 ? dt : cfl_fraction * h * h * h; }
};

using SpaceTimeFn = std::function<double(double x, double t)>;

struct SimProblem {
    RealFn u0;
    RealFn g0;              // Dirichlet value at x = 0; ignored when periodic
    // u_t = u_xxx + ... is inflow at x = 0 for every mode, so a stable closure
    // needs a second condition there: g1 = u_x(0,t) (zero when absent). The ghost
    // u_{-1} is the quartic through u0, g1, u1, u2, u3.
    RealFn g1;
    SpaceTimeFn forcing;    // optional source added to the right-hand side
    SpaceTimeFn right;      // optional values at x >= x_max (default 0)
};

struct SimState {
    std::vector<double> x, u;
    double t = 0.0;
    double h = 0.0, dt = 0.0;
    std::vector<double> trace_t, g0, g1, g2;
    std::string scheme = "flux-form centered differences, RK4, quartic ghost at x=0, extrapolated ghost at x_max";
};

/// Damping rate σ(x) of the absorbing layer next to x_max; the right-hand side
/// carries -σu.
double sponge(const SimConfig& cfg, double x);

SimState init_state(const SimProblem& prob, const SimConfig& cfg);

/// One RK4 step. Throws CFLViolation if dt > cfl_limit·h³ and NaNDetected on
/// a non-finite update.
void step(SimState& st, const SimProblem& prob, const SimConfig& cfg, double dt);

/// Runs to cfg.t_end, recording boundary traces (non-periodic runs).
SimState simulate(const SimProblem& prob, const SimConfig& cfg);

/// One-sided fourth-order stencils at x = 0.
double trace_ux(const std::vector<double>& u, double h);
double trace_uxx(const std::vector<double>& u, double h);

struct Traces {
    std::vector<double> t, g0, g1, g2;
};
Traces extract_traces(const SimState& st);

/// Half-line data built from a finished run: u0 from the problem, traces as
/// samples on [0, t], tail kind None.
HalfLineData to_half_line_data(const SimState& st, const SimProblem& prob);

/// The field at the end of the run as x-data (for the horizon relation).
HalfLineData snapshot_data(const SimState& st);

/// h·Σ u_j over the grid (periodic harness) or trapezoid (half-line).
double mass(const SimState& st, bool periodic);

void write_traces_csv(const SimState& st, const std::string& path);
void write_snapshot_csv(const SimState& st, const std::string& path);

}  // namespace mkdvq
