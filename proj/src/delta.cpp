#include "mkdvq/delta.hpp"

#include <algorithm>
#include <cmath>

#include "mkdvq/errors.hpp"

namespace mkdvq {

namespace {

constexpr int kOrder = 24;
constexpr int kTailPower = 8;

double log_one_minus(const ReflectionData& refl, double s) {
    double a = refl.r2(s);
    if (a >= 1.0) throw Error(ErrorKind::ReflectionTooLarge, "|r| >= 1 while building delta");
    return std::log1p(-a);
}

// Bisects [a,b] until the Legendre tail of f is below tol; appends panels.
template <class F>
void resolve(const GaussRule& g, F&& f, double a, double b, double tol, int depth, std::vector<Panel>& out) {
    std::vector<cplx> v(g.p);
    for (int i = 0; i < g.p; ++i) v[i] = f(0.5 * (a + b) + 0.5 * (b - a) * g.x[i]);
    auto c = legendre_coeffs(g, v.data());
    double tail = std::abs(c[g.p - 1]) + std::abs(c[g.p - 2]);
    if (tail > tol && depth < 40) {
        double m = 0.5 * (a + b);
        resolve(g, f, a, m, tol, depth + 1, out);
        resolve(g, f, m, b, tol, depth + 1, out);
        return;
    }
    if (tail > tol) throw Error(ErrorKind::QuadratureFailure, "psi could not be resolved on its panels");
    out.push_back(Panel{cplx(a), cplx(b)});
}

}  // namespace

double ConjugationDelta::psi(double s) const {
    if (trivial_) return 0.0;
    if (variant == DeltaVariant::Similarity && std::abs(s) < k0) return -2.0 * kPi * nu;
    return log_one_minus(refl_, s);
}

cplx ConjugationDelta::tail(cplx k) const {
    // ψ beyond ±trunc modeled as ψ(±trunc)(trunc/|s|)^8, expanded in k/trunc.
    if (std::abs(k) > 0.5 * trunc || (psi_left_ == 0.0 && psi_right_ == 0.0)) return 0.0;
    cplx sr = 0.0, sl = 0.0, zr = 1.0, zl = 1.0;
    for (int n = 0; n < 60; ++n) {
        sr += zr / double(kTailPower + n);
        sl += zl / double(kTailPower + n);
        zr *= k / trunc;
        zl *= -k / trunc;
    }
    return -(psi_right_ * sr - psi_left_ * sl) / (2.0 * kPi * kI);
}

cplx ConjugationDelta::chi(cplx k) const {
    if (trivial_) return 0.0;
    if (k.imag() == 0.0) throw Error(ErrorKind::DomainViolation, "chi(k) needs Im k != 0; use chi_boundary");
    std::vector<cplx> W(g_->p);
    cplx sum = 0.0;
    for (std::size_t j = 0; j < panels_.size(); ++j) {
        cauchy_weights(*g_, panels_[j], k, false, W.data());
        for (int i = 0; i < g_->p; ++i) sum += W[i] * psi_[j * g_->p + i];
    }
    return -sum / (2.0 * kPi * kI) + tail(cplx(k));
}

cplx ConjugationDelta::chi_boundary(double x, int side) const {
    if (trivial_) return 0.0;
    std::vector<cplx> W(g_->p), L(g_->p);
    cplx pv = 0.0;
    for (std::size_t j = 0; j < panels_.size(); ++j) {
        const Panel& pan = panels_[j];
        double a = pan.a.real(), b = pan.b.real();
        bool on = x >= a && x <= b;
        cauchy_weights(*g_, pan, cplx(x), on, W.data());
        for (int i = 0; i < g_->p; ++i) pv += W[i] * psi_[j * g_->p + i];
    }
    double ps = (std::abs(x) <= trunc) ? psi(x) : 0.0;
    return -pv / (2.0 * kPi * kI) - side * 0.5 * ps + tail(cplx(x));
}

cplx ConjugationDelta::power(cplx k, int side) const {
    if (variant != DeltaVariant::Similarity || nu == 0.0) return 1.0;
    cplx ratio = (k - k0) / (k + k0);
    cplx lg;
    if (k.imag() == 0.0 && std::abs(k.real()) < k0) {
        if (side == 0) throw Error(ErrorKind::DomainViolation, "delta evaluated on its branch cut without a side");
        lg = cplx(std::log(std::abs(ratio)), side * kPi);
    } else {
        lg = std::log(ratio);
    }
    return std::exp(kI * nu * lg);
}

cplx ConjugationDelta::delta(cplx k) const {
    if (trivial_) return 1.0;
    return power(k, 0) * std::exp(chi(k));
}

cplx ConjugationDelta::delta_boundary(double x, int side) const {
    if (trivial_) return 1.0;
    return power(cplx(x), side) * std::exp(chi_boundary(x, side));
}

ConjugationDelta build_delta(const ReflectionData& refl, DeltaVariant variant, double k0, double quad_tol) {
    ConjugationDelta d;
    d.variant = variant;
    d.k0 = variant == DeltaVariant::Similarity ? k0 : 0.0;
    if (variant == DeltaVariant::Similarity && !(k0 > 0.0))
        throw Error(ErrorKind::Config, "similarity delta needs k0 > 0");
    d.refl_ = refl;
    d.trunc = std::max(8.0, 4.0 * d.k0);
    d.branch = variant == DeltaVariant::Similarity
                   ? "((k-k0)/(k+k0))^{i nu} = exp(i nu Log), principal Log, cut on [-k0,k0]; side +1 gives arg +pi"
                   : "no power factor; delta = exp(chi)";
    if (refl.r_zero) {
        d.trivial_ = true;
        return d;
    }
    if (variant == DeltaVariant::Similarity) d.nu = -std::log1p(-refl.r2(k0)) / (2.0 * kPi);
    d.g_ = &gauss_rule(kOrder);
    const double K = d.trunc;
    auto f = [&](double s) { return cplx(d.psi(s)); };
    double scale = 0.0;
    for (int j = 0; j <= 400; ++j) scale = std::max(scale, std::abs(d.psi(-K + 2.0 * K * j / 400)));
    double tol = quad_tol * std::max(1.0, scale);

    std::vector<double> brk;
    if (variant == DeltaVariant::Similarity)
        brk = {-K, -k0, 0.0, k0, K};
    else
        brk = {-K, 0.0, K};
    for (std::size_t b = 0; b + 1 < brk.size(); ++b) {
        double a = brk[b], c = brk[b + 1];
        int n = std::max(1, int(std::ceil((c - a) / 1.0)));
        for (int j = 0; j < n; ++j) resolve(*d.g_, f, a + (c - a) * j / n, a + (c - a) * (j + 1) / n, tol, 0, d.panels_);
    }
    for (const Panel& pan : d.panels_)
        for (int i = 0; i < d.g_->p; ++i) d.psi_.push_back(d.psi(pan.node(*d.g_, i).real()));
    d.psi_left_ = d.psi(-K);
    d.psi_right_ = d.psi(K);
    return d;
}

}  // namespace mkdvq
