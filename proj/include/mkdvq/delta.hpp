#pragma once

#include <string>
#include <vector>

#include "mkdvq/quadrature.hpp"
#include "mkdvq/reflection.hpp"

namespace mkdvq {

enum class DeltaVariant { Similarity, SelfSimilar };

/// Scalar conjugation factor δ = ((k-k0)/(k+k0))^{iν} e^{χ}, with
/// χ(k) = -(1/2πi) ∫ ψ(s)/(s-k) ds. For the similarity variant ψ = ln(1-|r|²)
/// for |s| > k0 and the constant ln(1-|r(k0)|²) inside; the self-similar variant
/// drops the power factor and uses ln(1-|r|²) on all of ℝ.
class ConjugationDelta {
public:
    DeltaVariant variant = DeltaVariant::SelfSimilar;
    double k0 = 0.0;
    double nu = 0.0;
    double trunc = 0.0;
    std::string branch;

    /// Off the real line.
    cplx chi(cplx k) const;
    cplx delta(cplx k) const;
    /// Boundary values at real x; side = +1 from above, -1 from below.
    cplx chi_boundary(double x, int side) const;
    cplx delta_boundary(double x, int side) const;
    /// ψ as used in the integral (with the constant inside [-k0,k0]).
    double psi(double s) const;

    bool trivial() const { return trivial_; }

private:
    friend ConjugationDelta build_delta(const ReflectionData&, DeltaVariant, double, double);
    cplx power(cplx k, int side) const;
    cplx tail(cplx k) const;
    const GaussRule* g_ = nullptr;
    std::vector<Panel> panels_;
    std::vector<double> psi_;  // node samples, panel-major
    double psi_left_ = 0.0, psi_right_ = 0.0;
    bool trivial_ = false;
    ReflectionData refl_;
};

/// Builds δ for the given variant; k0 is ignored for the self-similar one.
/// Panels are bisected until the Legendre tail of ψ is below quad_tol.
ConjugationDelta build_delta(const ReflectionData& refl, DeltaVariant variant, double k0, double quad_tol = 1e-14);

}  // namespace mkdvq
