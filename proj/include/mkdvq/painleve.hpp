#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mkdvq/rh.hpp"

namespace mkdvq {

/// Stokes data (s1,s2,s3); the remaining multipliers follow from s_{n+3} = -s_n.
struct StokesTriple {
    cplx s1{0.0}, s2{0.0}, s3{0.0};

    double cyclic_residual() const { return std::abs(s1 - s2 + s3 + s1 * s2 * s3); }
    /// s3 = conj(s1) and s2 real, which makes u^P real on the real line.
    bool is_real(double tol = 1e-14) const {
        return std::abs(s3 - std::conj(s1)) <= tol && std::abs(s2.imag()) <= tol;
    }
    cplx s(int n) const;  // n = 1..6
};

StokesTriple stokes_from_s(cplx s);
/// Solves the cyclic constraint for s3 given s1, s2.
StokesTriple complete_stokes(cplx s1, cplx s2);

struct PainleveOptions {
    int order = 16;
    double tol = 1e-13;       // ray truncation threshold on |w|
    double max_ray = 12.0;
    double max_panel = 0.25;
};

/// Six-ray contour at arg z = π/6 + π(n-1)/3, oriented outward, with
/// jumps e^{-iθσ̂3} S_n, θ = yz + 4z³/3. Rays with s_n = 0 are omitted.
RHProblem painleve_problem(const StokesTriple& st, double y, const PainleveOptions& opt = {});

struct PainleveValue {
    cplx u;          // u^P(y) = 2 M1(1,2)
    cplx du;         // d u^P / dy from the differentiated singular integral equation
    double err_est;  // jump residual of the discrete solve
};

PainleveValue solve_painleve_rh(const StokesTriple& st, double y, const PainleveOptions& opt = {});

struct PainleveSolution {
    StokesTriple stokes;
    std::string method;  // "rh" or "ode"
    std::vector<double> y;
    std::vector<double> u, du, err;
    std::function<double(double)> eval;
};

/// Tabulates u^P by one RH solve per grid point.
PainleveSolution painleve_rh_table(const StokesTriple& st, const std::vector<double>& y_grid,
                                   const PainleveOptions& opt = {});

/// Anchors (u, u') at y_match with one RH solve and integrates u'' = y u + 2u³
/// across y_grid. err[i] holds the cross-validation defect at y_match + 1.
PainleveSolution ode_oracle(const StokesTriple& st, const std::vector<double>& y_grid, double y_match = 8.0,
                            double tol = 1e-13, const PainleveOptions& opt = {});

/// Solves the model problem on the scaled contour z0·Z directly and returns
/// |2 M1(1,2) - u^P(y)|, with u^P from the six-ray problem.
double model_mZ_check(cplx s, double y, double z0, int n = 16);

/// The model problem itself (rays from ±z0 at angles ±π/6, ±5π/6 and the
/// segment [-z0, z0]).
RHProblem model_z_problem(cplx s, double y, double z0, double tol = 1e-13);

}  // namespace mkdvq
