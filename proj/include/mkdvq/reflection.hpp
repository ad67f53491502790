#pragma once

#include <string>

#include "mkdvq/types.hpp"

namespace mkdvq {

/// Reflection data entering the jump matrices. `r` and `h` are evaluators that
/// may be called off the real line; `rbar(k) = conj(r(conj k))` and likewise
/// `hbar` are their analytic reflections. Data built from spectral functions
/// are only valid on the real line (r) and on the closure of D2 (h), which is
/// recorded as strip_radius = 0.
struct ReflectionData {
    CplxFn r, rbar, h, hbar;
    double strip_radius = 0.0;
    double sup_r = 0.0;
    bool r_zero = false;
    bool h_zero = true;
    std::string label;

    /// |r(k)|^2 on the real line.
    double r2(double k) const { return std::norm(r(cplx(k, 0.0))); }
};

ReflectionData zero_reflection();

/// r(k) = iγ k e^{-k²} / (1 + (k/κ)²); poles at ±iκ, r(0) = 0.
ReflectionData odd_preset(double gamma, double kappa = 1.0);

/// r(k) = γ e^{-k²} / (1 + ik/κ), which equals γ e^{-k²}(1 - ik/κ)/(1 + (k/κ)²)
/// on the real line; r(0) = γ, pole at iκ only.
ReflectionData even_preset(double gamma, double kappa = 1.0);

/// Adds h(k) = iη k / (1 + k²/4)², analytic away from ±2i.
ReflectionData with_rational_h(ReflectionData base, double eta);

/// Max of |r| over a Chebyshev-mapped grid on [-K, K].
double sup_abs_r(const ReflectionData& refl, double K = 8.0, int n = 2048);

/// Max of |r(k) - conj(r(-k))| on a symmetric real grid.
double r_symmetry_defect(const ReflectionData& refl, double K = 8.0, int n = 257);

}  // namespace mkdvq
