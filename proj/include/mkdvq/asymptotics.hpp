#pragma once

#include <utility>
#include <vector>

#include "mkdvq/painleve.hpp"
#include "mkdvq/reflection.hpp"

namespace mkdvq {

struct PVOptions {
    double tol = 1e-13;
    /// Extra interior breakpoints (kinks of f) for the adaptive quadrature.
    std::vector<double> breakpoints;
    /// If > 0, f beyond ±trunc is modeled as f(±trunc)(trunc/|s|)^tail_power
    /// and that tail is added in closed form.
    double tail_power = 0.0;
};

/// PV ∫_{-trunc}^{trunc} f(s)/(s - pole) ds by subtraction of f(pole).
double pv_cauchy(const RealFn& f, double pole, double trunc, const PVOptions& opt = {});

/// Γ(z) for complex z, and arg Γ(iν) reduced to (-π, π]; it only enters
/// through e^{i arg}.
cplx complex_gamma(cplx z);
double arg_gamma_imag(double nu);

struct SimilarityParams {
    double zeta = 0.0, k0 = 0.0, tau = 0.0;
    double nu = 0.0;
    double phi = 0.0;   // φ(ζ)
    cplx q{0.0};
    double eps = 0.0, rho = 0.0;
    cplx Phi0{0.0};     // φ(ζ, 0) = -16 i k0³
    double pv = 0.0;    // PV ∫ ψ(ζ,s)/(s - k0) ds
};

/// ψ(ζ,s): ln(1-|r(s)|²) for |s| > k0, ln(1-|r(k0)|²) inside.
double psi_similarity(const ReflectionData& refl, double k0, double s);

SimilarityParams similarity_params(const ReflectionData& refl, double x, double t, double tol = 1e-13);

cplx beta(const SimilarityParams& p, double t);

struct SectorOptions {
    double tau_min = 10.0;
    double N = 10.0;            // self-similar sector: 0 < x < N t^{1/3}
    bool allow_outside = false;
};

/// -u_a/√(t k0) with u_a = √(ν/3) cos(16tk0³ - ν ln(192tk0³) + φ).
double u_similarity(const ReflectionData& refl, double x, double t, const SectorOptions& opt = {});
/// The same leading term written as -Re β / √(3tk0).
double u_similarity_from_beta(const ReflectionData& refl, double x, double t);

/// u^P(-x/(3t)^{1/3}; s, 0, -s)/(3t)^{1/3} with s = i r(0); `pw` must carry that s.
double u_selfsimilar(const ReflectionData& refl, double x, double t, const PainleveSolution& pw,
                     const SectorOptions& opt = {});

/// Least-squares slope of log(error) against log(scale). The scales must
/// span at least a factor min_span.
double fit_decay_exponent(const std::vector<std::pair<double, double>>& pairs, double min_span = 10.0);

}  // namespace mkdvq
