#pragma once

#include "mkdvq/contour.hpp"
#include "mkdvq/delta.hpp"
#include "mkdvq/reflection.hpp"

namespace mkdvq {

struct BuildOptions {
    double trunc_tol = 1e-14;  // rays are cut where |v - I| drops below this
    double max_ray = 50.0;
    double strip_margin = 1.2;  // required strip half-width / max deformation height
};

/// tΦ(ζ,k) with Φ = 8ik³ - 2ikζ and ζ = x/t, written so that t = 0 is allowed.
inline cplx t_phase(cplx k, double x, double t) { return 8.0 * kI * k * k * k * t - 2.0 * kI * k * x; }

/// The undeformed problem on Σ = ∂D1 ∪ ℝ ∪ ∂D4. ℝ runs left to right, ∂D4
/// from ∞e^{2iπ/3} through 0 to ∞e^{iπ/3}, ∂D1 from ∞e^{-iπ/3} through 0
/// to ∞e^{-2iπ/3}; D1 and D4 lie on the + side of their boundaries.
RHProblem build_sigma_problem(const ReflectionData& refl, double x, double t, const BuildOptions& opt = {});

/// δ-conjugated problem on Γ: four rays from ±k0 at ±π/4, ±3π/4, the inner
/// ones closing at ±ik0, plus the Σ rays when h is nonzero. All pieces run with
/// increasing real part except the Σ rays, which keep their orientation.
RHProblem build_similarity_problem(const ReflectionData& refl, double x, double t, const ConjugationDelta& delta,
                                   const BuildOptions& opt = {});

/// Problem on Y (rays from ±k0 at ±π/6, ±5π/6 and the segment [-k0,k0]) after
/// the self-similar δ-conjugation and the e^{-iπ/4 σ3} rotation. Y1 runs left to
/// right, Y2 right to left. Recovery factor is 2.
RHProblem build_selfsimilar_problem(const ReflectionData& refl, double x, double t, const ConjugationDelta& delta,
                                    const BuildOptions& opt = {});

/// Max |Im k| over the truncated contour.
double max_height(const Contour& c);

}  // namespace mkdvq
