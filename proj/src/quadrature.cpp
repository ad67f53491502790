#include "mkdvq/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include <gsl/gsl_integration.h>

#include "mkdvq/errors.hpp"

namespace mkdvq {

GaussRule::GaussRule(int order) : p(order), x(order), w(order), leg(order * order) {
    if (order < 2 || order > 128) throw Error(ErrorKind::Config, "Gauss order out of range");
    gsl_integration_glfixed_table* t = gsl_integration_glfixed_table_alloc(order);
    for (int i = 0; i < order; ++i) gsl_integration_glfixed_point(-1.0, 1.0, i, &x[i], &w[i], t);
    gsl_integration_glfixed_table_free(t);
    for (int i = 0; i < p; ++i) {
        double p0 = 1.0, p1 = x[i];
        leg[i * p] = 1.0;
        if (p > 1) leg[i * p + 1] = p1;
        for (int n = 1; n + 1 < p; ++n) {
            double p2 = ((2 * n + 1) * x[i] * p1 - n * p0) / (n + 1);
            leg[i * p + n + 1] = p2;
            p0 = p1;
            p1 = p2;
        }
    }
}

const GaussRule& gauss_rule(int order) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<GaussRule>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[order];
    if (!slot) slot = std::make_unique<GaussRule>(order);
    return *slot;
}

namespace {

// Bernstein-ellipse parameter of xi relative to [-1,1].
double bernstein_rho(cplx xi) {
    cplx s = std::sqrt(xi - 1.0) * std::sqrt(xi + 1.0);
    double r1 = std::abs(xi + s), r2 = std::abs(xi - s);
    return std::max(r1, r2);
}

// Q_n(xi) = (1/2) ∫ P_n(x)/(xi - x) dx for n < p, or its real PV version on the cut.
void legendre_q(cplx xi, bool on_cut, int p, std::vector<cplx>& q) {
    q.assign(p, 0.0);
    if (on_cut) {
        double t = xi.real();
        q[0] = 0.5 * std::log((1.0 + t) / (1.0 - t));
        if (p > 1) q[1] = t * q[0] - 1.0;
        for (int n = 1; n + 1 < p; ++n)
            q[n + 1] = ((2.0 * n + 1.0) * t * q[n] - double(n) * q[n - 1]) / (n + 1.0);
        return;
    }
    cplx q0 = 0.5 * std::log((xi + 1.0) / (xi - 1.0));
    double rho = bernstein_rho(xi);
    if (rho < 1.2) {
        q[0] = q0;
        if (p > 1) q[1] = xi * q0 - 1.0;
        for (int n = 1; n + 1 < p; ++n)
            q[n + 1] = ((2.0 * n + 1.0) * xi * q[n] - double(n) * q[n - 1]) / (n + 1.0);
        return;
    }
    // Miller backward recurrence for the minimal solution.
    int top = p + 20 + static_cast<int>(std::ceil(40.0 / std::log(rho)));
    cplx qn1 = 0.0, qn = 1e-30;
    std::vector<cplx> tmp(p);
    for (int n = top; n >= 1; --n) {
        cplx qm = ((2.0 * n + 1.0) * xi * qn - (n + 1.0) * qn1) / double(n);
        qn1 = qn;
        qn = qm;
        if (n - 1 < p) tmp[n - 1] = qm;
        double mag = std::abs(qn);
        if (mag > 1e200) {
            qn /= mag;
            qn1 /= mag;
            for (int j = std::max(n - 1, 0); j < p; ++j) tmp[j] /= mag;
        }
    }
    cplx scale = q0 / tmp[0];
    for (int n = 0; n < p; ++n) q[n] = tmp[n] * scale;
}

}  // namespace

void cauchy_weights(const GaussRule& g, const Panel& pan, cplx k, bool on_panel, cplx* W) {
    const int p = g.p;
    cplx xi = pan.local(k);
    if (on_panel) xi = cplx(std::clamp(xi.real(), -1.0 + 1e-15, 1.0 - 1e-15), 0.0);
    // Plain Gauss error decays like rho^{-2p}; switch to it once that is below round-off.
    double rho_far = std::pow(10.0, 16.5 / (2.0 * p)) + 0.2;
    if (!on_panel && bernstein_rho(xi) > rho_far) {
        for (int i = 0; i < p; ++i) W[i] = g.w[i] / (g.x[i] - xi);
        return;
    }
    thread_local std::vector<cplx> q;
    legendre_q(xi, on_panel, p, q);
    for (int i = 0; i < p; ++i) {
        cplx acc = 0.0;
        for (int n = 0; n < p; ++n) acc += (2.0 * n + 1.0) * g.P(i, n) * q[n];
        W[i] = -g.w[i] * acc;
    }
}

void interp_weights(const GaussRule& g, cplx xi, cplx* L) {
    const int p = g.p;
    std::vector<cplx> pn(p);
    pn[0] = 1.0;
    if (p > 1) pn[1] = xi;
    for (int n = 1; n + 1 < p; ++n) pn[n + 1] = ((2.0 * n + 1.0) * xi * pn[n] - double(n) * pn[n - 1]) / (n + 1.0);
    for (int i = 0; i < p; ++i) {
        cplx acc = 0.0;
        for (int n = 0; n < p; ++n) acc += (n + 0.5) * g.P(i, n) * pn[n];
        L[i] = acc * g.w[i];
    }
}

std::vector<cplx> legendre_coeffs(const GaussRule& g, const cplx* f) {
    std::vector<cplx> c(g.p, 0.0);
    for (int n = 0; n < g.p; ++n) {
        cplx acc = 0.0;
        for (int i = 0; i < g.p; ++i) acc += g.w[i] * g.P(i, n) * f[i];
        c[n] = (n + 0.5) * acc;
    }
    return c;
}

}  // namespace mkdvq
