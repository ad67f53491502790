#pragma once

#include <vector>

#include "mkdvq/types.hpp"

namespace mkdvq {

/// Gauss–Legendre rule on [-1,1] with the Legendre table P_n(x_i) cached
/// for the exact product-integration Cauchy weights below.
struct GaussRule {
    int p = 0;
    std::vector<double> x, w;
    std::vector<double> leg;  // leg[i*p + n] = P_n(x_i)

    explicit GaussRule(int order);
    double P(int i, int n) const { return leg[static_cast<std::size_t>(i * p + n)]; }
};

/// Shared, lazily built rule of the given order.
const GaussRule& gauss_rule(int order);

/// Straight panel from a to b.
struct Panel {
    cplx a, b;
    cplx mid() const { return 0.5 * (a + b); }
    cplx half() const { return 0.5 * (b - a); }
    double length() const { return std::abs(b - a); }
    cplx node(const GaussRule& g, int i) const { return mid() + half() * g.x[i]; }
    cplx weight(const GaussRule& g, int i) const { return half() * g.w[i]; }
    /// Local coordinate of k, k = mid + half*xi.
    cplx local(cplx k) const { return (k - mid()) / half(); }
};

/// Writes W[0..p) such that  ∫_panel f(s)/(s-k) ds ≈ Σ W_i f(s_i), where the
/// degree p-1 interpolant of f at the panel nodes is integrated exactly.
/// If `on_panel`, k is taken to lie on the panel and the principal value is
/// returned. Far targets fall back to plain Gauss quadrature.
void cauchy_weights(const GaussRule& g, const Panel& pan, cplx k, bool on_panel, cplx* W);

/// Interpolation weights at local coordinate xi: f(xi) ≈ Σ L_i f(x_i).
void interp_weights(const GaussRule& g, cplx xi, cplx* L);

/// Legendre coefficients of the interpolant of samples f(x_i).
std::vector<cplx> legendre_coeffs(const GaussRule& g, const cplx* f);

}  // namespace mkdvq
