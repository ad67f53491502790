#include "mkdvq/painleve.hpp"

#include <algorithm>
#include <cmath>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_odeiv2.h>

#include "mkdvq/errors.hpp"

namespace mkdvq {

cplx StokesTriple::s(int n) const {
    switch (n) {
        case 1: return s1;
        case 2: return s2;
        case 3: return s3;
        case 4: return -s1;
        case 5: return -s2;
        case 6: return -s3;
    }
    throw Error(ErrorKind::Config, "Stokes index out of range");
}

StokesTriple stokes_from_s(cplx s) { return {s, 0.0, -s}; }

StokesTriple complete_stokes(cplx s1, cplx s2) {
    cplx den = 1.0 + s1 * s2;
    if (std::abs(den) < 1e-300) throw Error(ErrorKind::Config, "s1*s2 = -1 leaves s3 undetermined");
    return {s1, s2, (s2 - s1) / den};
}

namespace {

cplx theta(double y, cplx z) { return y * z + 4.0 / 3.0 * z * z * z; }

}  // namespace

RHProblem painleve_problem(const StokesTriple& st, double y, const PainleveOptions& opt) {
    RHProblem prob;
    for (int n = 1; n <= 6; ++n) {
        cplx sn = st.s(n);
        if (sn == 0.0) continue;
        cplx dir = std::polar(1.0, kPi / 6.0 + kPi * (n - 1) / 3.0);
        prob.contour.segments.push_back(make_ray(0.0, dir, opt.max_ray, +1, "ray" + std::to_string(n)));
        if (n % 2 == 1)
            prob.jump.v.push_back([sn, y](cplx z) { return lower(sn * std::exp(2.0 * kI * theta(y, z))); });
        else
            prob.jump.v.push_back([sn, y](cplx z) { return upper(sn * std::exp(-2.0 * kI * theta(y, z))); });
    }
    if (!prob.contour.segments.empty()) prob.contour.intersections.push_back(0.0);
    truncate_rays(prob, opt.tol * 1e-2, opt.max_ray);
    return prob;
}

PainleveValue solve_painleve_rh(const StokesTriple& st, double y, const PainleveOptions& opt) {
    RHProblem prob = painleve_problem(st, y, opt);
    if (prob.contour.segments.empty()) return {0.0, 0.0, 0.0};
    SolveOptions so;
    so.order = opt.order;
    so.max_panel = opt.max_panel;
    so.tol = 1e-9;
    RHSolution sol = solve_rh(prob, so);
    Mat2 M1 = sol.first_moment();
    // dv/dy = [iz σ3-type derivative of the phase]: lower entries gain 2iz, upper -2iz.
    std::vector<Mat2> dw(sol.size());
    for (std::size_t i = 0; i < sol.size(); ++i) {
        cplx z = sol.nodes[i];
        Mat2 d = Mat2::Zero();
        d(1, 0) = 2.0 * kI * z * sol.w[i](1, 0);
        d(0, 1) = -2.0 * kI * z * sol.w[i](0, 1);
        dw[i] = d;
    }
    Mat2 dM1 = sol.first_moment_derivative(dw);
    return {2.0 * M1(0, 1), 2.0 * dM1(0, 1), sol.jump_residual(2)};
}

PainleveSolution painleve_rh_table(const StokesTriple& st, const std::vector<double>& y_grid,
                                   const PainleveOptions& opt) {
    PainleveSolution out;
    out.stokes = st;
    out.method = "rh";
    out.y = y_grid;
    for (double y : y_grid) {
        auto v = solve_painleve_rh(st, y, opt);
        out.u.push_back(v.u.real());
        out.du.push_back(v.du.real());
        out.err.push_back(std::max(v.err_est, std::abs(v.u.imag())));
    }
    out.eval = [st, opt](double y) { return solve_painleve_rh(st, y, opt).u.real(); };
    return out;
}

namespace {

int p2_rhs(double y, const double s[], double f[], void*) {
    f[0] = s[1];
    f[1] = y * s[0] + 2.0 * s[0] * s[0] * s[0];
    return GSL_SUCCESS;
}

struct Trajectory {
    std::vector<double> y, u, du;
};

// Integrates from (y0, u0, du0) to y1, recording every accepted step.
Trajectory integrate_p2(double y0, double u0, double du0, double y1, double tol) {
    gsl_status_mode();
    gsl_odeiv2_system sys{p2_rhs, nullptr, 2, nullptr};
    double h0 = y1 > y0 ? 1e-3 : -1e-3;
    gsl_odeiv2_step* step = gsl_odeiv2_step_alloc(gsl_odeiv2_step_rk8pd, 2);
    gsl_odeiv2_control* ctl = gsl_odeiv2_control_y_new(tol, tol);
    gsl_odeiv2_evolve* ev = gsl_odeiv2_evolve_alloc(2);
    Trajectory tr;
    double y = y0, s[2] = {u0, du0}, h = h0;
    tr.y.push_back(y);
    tr.u.push_back(s[0]);
    tr.du.push_back(s[1]);
    while ((y1 - y) * h0 > 0) {
        int st = gsl_odeiv2_evolve_apply(ev, ctl, step, &sys, &y, y1, &h, s);
        if (st != GSL_SUCCESS || std::abs(s[0]) > 1e6) {
            gsl_odeiv2_evolve_free(ev);
            gsl_odeiv2_control_free(ctl);
            gsl_odeiv2_step_free(step);
            if (st != GSL_SUCCESS)
                throw Error(ErrorKind::StepFailure, std::string("Painleve II ODE: ") + gsl_strerror(st));
            throw Error(ErrorKind::BlowUp, "Painleve II trajectory left the guard near y = " + std::to_string(y));
        }
        tr.y.push_back(y);
        tr.u.push_back(s[0]);
        tr.du.push_back(s[1]);
    }
    gsl_odeiv2_evolve_free(ev);
    gsl_odeiv2_control_free(ctl);
    gsl_odeiv2_step_free(step);
    return tr;
}

// Cubic Hermite interpolation on a recorded trajectory (u'' is known from the ODE).
double hermite(const Trajectory& tr, double y, bool deriv = false) {
    std::size_t n = tr.y.size();
    if (n == 1) return tr.u[0];
    bool inc = tr.y.back() > tr.y.front();
    std::size_t i = 0;
    while (i + 2 < n && (inc ? tr.y[i + 1] < y : tr.y[i + 1] > y)) ++i;
    double ya = tr.y[i], yb = tr.y[i + 1], h = yb - ya, t = (y - ya) / h;
    double h00 = 2 * t * t * t - 3 * t * t + 1, h10 = t * t * t - 2 * t * t + t;
    double h01 = -2 * t * t * t + 3 * t * t, h11 = t * t * t - t * t;
    if (!deriv) return h00 * tr.u[i] + h10 * h * tr.du[i] + h01 * tr.u[i + 1] + h11 * h * tr.du[i + 1];
    auto upp = [&](std::size_t j) { return tr.y[j] * tr.u[j] + 2.0 * std::pow(tr.u[j], 3); };
    return h00 * tr.du[i] + h10 * h * upp(i) + h01 * tr.du[i + 1] + h11 * h * upp(i + 1);
}

}  // namespace

PainleveSolution ode_oracle(const StokesTriple& st, const std::vector<double>& y_grid, double y_match,
                            double tol, const PainleveOptions& opt) {
    PainleveSolution out;
    out.stokes = st;
    out.method = "ode";
    out.y = y_grid;
    auto anchor = solve_painleve_rh(st, y_match, opt);
    auto check = solve_painleve_rh(st, y_match + 1.0, opt);
    double ylo = y_match, yhi = y_match + 1.0;
    for (double y : y_grid) {
        ylo = std::min(ylo, y);
        yhi = std::max(yhi, y);
    }
    // The step tolerance is absolute; scale it to the anchor magnitude so the
    // exponentially small tail is still resolved.
    double scale = std::max(std::abs(anchor.u.real()), 1e-300);
    double tol_eff = std::min(tol, tol * scale / 1e-2);
    auto down = integrate_p2(y_match, anchor.u.real(), anchor.du.real(), ylo, std::max(tol_eff, 1e-300));
    auto up = integrate_p2(y_match, anchor.u.real(), anchor.du.real(), yhi, std::max(tol_eff, 1e-300));
    double cross = std::abs(hermite(up, y_match + 1.0) - check.u.real());
    auto ev = [down, up, y_match](double y) { return y <= y_match ? hermite(down, y) : hermite(up, y); };
    for (double y : y_grid) {
        out.u.push_back(ev(y));
        out.du.push_back(y <= y_match ? hermite(down, y, true) : hermite(up, y, true));
        out.err.push_back(cross);
    }
    out.eval = ev;
    return out;
}

RHProblem model_z_problem(cplx s, double y, double z0, double tol) {
    RHProblem prob;
    const double L = 12.0;
    auto low = [s, y](cplx z) { return lower(s * std::exp(2.0 * kI * theta(y, z))); };
    auto up_m = [s, y](cplx z) { return upper(-s * std::exp(-2.0 * kI * theta(y, z))); };
    auto seg = [s, y](cplx z) {
        cplx e = std::exp(2.0 * kI * theta(y, z));
        return Mat2(upper(s / e) * lower(s * e));
    };
    auto& S = prob.contour.segments;
    // Z1: upper rays traversed left to right.
    S.push_back(make_ray(z0, std::polar(1.0, kPi / 6), L, +1, "Z1+"));
    prob.jump.v.push_back(low);
    S.push_back(make_ray(-z0, std::polar(1.0, 5 * kPi / 6), L, -1, "Z1-"));
    prob.jump.v.push_back(low);
    // Z2: lower rays traversed right to left.
    S.push_back(make_ray(z0, std::polar(1.0, -kPi / 6), L, -1, "Z2+"));
    prob.jump.v.push_back(up_m);
    S.push_back(make_ray(-z0, std::polar(1.0, -5 * kPi / 6), L, +1, "Z2-"));
    prob.jump.v.push_back(up_m);
    // Z3.
    S.push_back(make_segment(-z0, z0, "Z3"));
    prob.jump.v.push_back(seg);
    prob.contour.intersections = {-z0, z0};
    truncate_rays(prob, tol * 1e-2, L);
    return prob;
}

double model_mZ_check(cplx s, double y, double z0, int n) {
    if (s == 0.0) return 0.0;
    PainleveOptions po;
    po.order = n;
    auto ref = solve_painleve_rh(stokes_from_s(s), y, po);
    RHProblem prob = model_z_problem(s, y, z0);
    SolveOptions so;
    so.order = n;
    so.max_panel = 0.25;
    so.tol = 1e-9;
    RHSolution sol = solve_rh(prob, so);
    cplx uz = 2.0 * sol.first_moment()(0, 1);
    return std::abs(uz - ref.u);
}

}  // namespace mkdvq
