#include "mkdvq/asymptotics.hpp"

#include <algorithm>
#include <cmath>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_sf_gamma.h>

#include "mkdvq/errors.hpp"

namespace mkdvq {

namespace {

// Σ_n (z)^n/(m+n), the closed-form tail of ∫_T^∞ (T/s)^m /(s - zT) ds / T^0.
double tail_series(double z, double m) {
    double s = 0.0, zn = 1.0;
    for (int n = 0; n < 200 && std::abs(zn) > 1e-18; ++n) {
        s += zn / (m + n);
        zn *= z;
    }
    return s;
}

}  // namespace

double pv_cauchy(const RealFn& f, double pole, double trunc, const PVOptions& opt) {
    if (!(trunc > std::abs(pole))) throw Error(ErrorKind::PoleOutsideRange, "pv_cauchy needs |pole| < trunc");
    const double fp = f(pole);
    auto g = [&](double s) {
        double d = s - pole;
        if (d == 0.0) return 0.0;
        return (f(s) - fp) / d;
    };
    std::vector<double> pts{-trunc};
    for (double b : opt.breakpoints)
        if (b > -trunc && b < trunc) pts.push_back(b);
    pts.push_back(pole);
    pts.push_back(trunc);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    gsl_status_mode();
    gsl_integration_workspace* ws = gsl_integration_workspace_alloc(2000);
    gsl_function F;
    F.function = [](double s, void* p) { return (*static_cast<decltype(g)*>(p))(s); };
    F.params = &g;
    double result = 0.0, abserr = 0.0;
    int status = gsl_integration_qagp(&F, pts.data(), pts.size(), opt.tol, opt.tol, 2000, ws, &result, &abserr);
    gsl_integration_workspace_free(ws);
    if (status != GSL_SUCCESS && abserr > 100.0 * opt.tol)
        throw Error(ErrorKind::QuadratureFailure, std::string("pv_cauchy: ") + gsl_strerror(status));
    result += fp * std::log((trunc - pole) / (trunc + pole));
    if (opt.tail_power > 0.0 && std::abs(pole) < 0.5 * trunc) {
        // Right tail f(T)(T/s)^m and left tail f(-T)(T/|s|)^m.
        result += f(trunc) * tail_series(pole / trunc, opt.tail_power);
        result -= f(-trunc) * tail_series(-pole / trunc, opt.tail_power);
    }
    return result;
}

cplx complex_gamma(cplx z) {
    gsl_status_mode();
    gsl_sf_result lnr, arg;
    int status = gsl_sf_lngamma_complex_e(z.real(), z.imag(), &lnr, &arg);
    if (status != GSL_SUCCESS) throw Error(ErrorKind::GammaEvaluationFailure, gsl_strerror(status));
    return std::polar(std::exp(lnr.val), arg.val);
}

double arg_gamma_imag(double nu) {
    gsl_status_mode();
    gsl_sf_result lnr, arg;
    int status = gsl_sf_lngamma_complex_e(0.0, nu, &lnr, &arg);
    if (status != GSL_SUCCESS) throw Error(ErrorKind::GammaEvaluationFailure, gsl_strerror(status));
    return arg.val;
}

double psi_similarity(const ReflectionData& refl, double k0, double s) {
    double a = std::abs(s) > k0 ? refl.r2(s) : refl.r2(k0);
    return std::log1p(-a);
}

SimilarityParams similarity_params(const ReflectionData& refl, double x, double t, double tol) {
    if (!(x > 0.0 && t > 0.0)) throw Error(ErrorKind::DomainViolation, "similarity_params needs x, t > 0");
    SimilarityParams p;
    p.zeta = x / t;
    p.k0 = std::sqrt(p.zeta / 12.0);
    p.tau = 12.0 * t * p.k0 * p.k0 * p.k0;
    p.eps = p.k0 / 2.0;
    p.rho = p.eps * std::sqrt(48.0 * p.k0);
    p.Phi0 = cplx(0.0, -16.0 * p.k0 * p.k0 * p.k0);
    double r2 = refl.r2(p.k0);
    if (r2 >= 1.0) throw Error(ErrorKind::ReflectionTooLarge, "|r(k0)| >= 1");
    p.nu = -std::log1p(-r2) / (2.0 * kPi);
    if (p.nu == 0.0) return p;
    const double k0 = p.k0;
    PVOptions po;
    po.tol = tol;
    po.breakpoints = {-k0, 0.0};
    po.tail_power = 8.0;
    p.pv = pv_cauchy([&](double s) { return psi_similarity(refl, k0, s); }, k0, std::max(8.0, 4.0 * k0), po);
    cplx rk0 = refl.r(cplx(k0, 0.0));
    double argr = std::arg(rk0);
    double ag = arg_gamma_imag(p.nu);
    p.phi = kPi / 4.0 + ag - argr + p.pv / kPi;
    double lq = 2.0 * p.nu * std::log(2.0 * std::sqrt(48.0) * std::pow(k0, 1.5));
    // e^{(1/πi) PV} is unimodular: it contributes -PV/π to arg q.
    p.q = std::abs(rk0) * std::exp(kI * (lq + argr - p.pv / kPi));
    return p;
}

cplx beta(const SimilarityParams& p, double t) {
    if (p.nu == 0.0) return 0.0;
    double ph = kPi / 4.0 - std::arg(p.q) + arg_gamma_imag(p.nu);
    return std::sqrt(p.nu) * std::exp(kI * ph) * std::exp(-t * p.Phi0) * std::exp(-kI * p.nu * std::log(t));
}

double u_similarity(const ReflectionData& refl, double x, double t, const SectorOptions& opt) {
    SimilarityParams p = similarity_params(refl, x, t);
    if (p.tau < opt.tau_min && !opt.allow_outside)
        throw Error(ErrorKind::SectorViolation, "tau = " + std::to_string(p.tau) + " is below tau_min");
    if (p.nu == 0.0) return 0.0;
    double tk3 = t * p.k0 * p.k0 * p.k0;
    double ua = std::sqrt(p.nu / 3.0) * std::cos(16.0 * tk3 - p.nu * std::log(192.0 * tk3) + p.phi);
    return -ua / std::sqrt(t * p.k0);
}

double u_similarity_from_beta(const ReflectionData& refl, double x, double t) {
    SimilarityParams p = similarity_params(refl, x, t);
    return -beta(p, t).real() / std::sqrt(3.0 * t * p.k0);
}

double u_selfsimilar(const ReflectionData& refl, double x, double t, const PainleveSolution& pw,
                     const SectorOptions& opt) {
    if (!(t > 0.0) || x < 0.0) throw Error(ErrorKind::DomainViolation, "u_selfsimilar needs t > 0, x >= 0");
    double c = std::cbrt(3.0 * t);
    if (!(x < opt.N * std::cbrt(t)) && !opt.allow_outside)
        throw Error(ErrorKind::SectorViolation, "x is outside the self-similar sector");
    cplx s = kI * refl.r(cplx(0.0, 0.0));
    if (std::abs(pw.stokes.s1 - s) > 1e-10 || std::abs(pw.stokes.s2) > 1e-10 || std::abs(pw.stokes.s3 + s) > 1e-10)
        throw Error(ErrorKind::Config, "Painleve data do not match s = i r(0)");
    if (s == 0.0) return 0.0;
    if (!pw.eval) throw Error(ErrorKind::Config, "Painleve solution has no evaluator");
    return pw.eval(-x / c) / c;
}

double fit_decay_exponent(const std::vector<std::pair<double, double>>& pairs, double min_span) {
    if (pairs.size() < 4) throw Error(ErrorKind::InsufficientData, "need at least 4 (scale, error) pairs");
    double lo = INFINITY, hi = 0.0;
    for (auto [s, e] : pairs) {
        if (!(s > 0.0) || !(e > 0.0)) throw Error(ErrorKind::InsufficientData, "scales and errors must be positive");
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    if (hi < min_span * lo * (1.0 - 1e-12))
        throw Error(ErrorKind::InsufficientData, "scales span less than the required factor");
    double n = double(pairs.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [s, e] : pairs) {
        double X = std::log(s), Y = std::log(e);
        sx += X;
        sy += Y;
        sxx += X * X;
        sxy += X * Y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace mkdvq
