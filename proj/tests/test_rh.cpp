#include "doctest.h"

#include <cmath>
#include <random>

#include <gsl/gsl_integration.h>

#include "mkdvq/builders.hpp"
#include "mkdvq/errors.hpp"
#include "mkdvq/quadrature.hpp"
#include "mkdvq/rh.hpp"

using namespace mkdvq;

namespace {

// Adaptive GSL quadrature of a real integrand, independent of the library's rules.
double qag(double (*f)(double, void*), void* p, double a, double b) {
    gsl_status_mode();
    gsl_integration_workspace* ws = gsl_integration_workspace_alloc(2000);
    gsl_function F{f, p};
    double r = 0, e = 0;
    gsl_integration_qag(&F, a, b, 1e-14, 1e-13, 2000, GSL_INTEG_GAUSS61, ws, &r, &e);
    gsl_integration_workspace_free(ws);
    return r;
}

double bump(double s) { return (1 - s * s) * (1 - s * s) * std::cos(2 * s); }

struct CauchyArg {
    cplx k;
    bool imag;
};
double cauchy_integrand(double s, void* p) {
    auto* a = static_cast<CauchyArg*>(p);
    cplx v = bump(s) / (s - a->k) / (2.0 * kPi * kI);
    return a->imag ? v.imag() : v.real();
}

// m12 for the jump upper(f) on [-1,1]: μ = m_- stays unipotent, so m is
// the identity plus the Cauchy transform of f in the (1,2) slot.
cplx cauchy_oracle(cplx k) {
    CauchyArg re{k, false}, im{k, true};
    return {qag(cauchy_integrand, &re, -1, 1), qag(cauchy_integrand, &im, -1, 1)};
}

RHProblem triangular_problem() {
    RHProblem p;
    p.contour.segments.push_back(make_segment(-1.0, 1.0, "R"));
    p.jump.v.push_back([](cplx k) { return upper(bump(k.real())); });
    return p;
}

// degree 15, so the 16-point product rule is exact up to rounding
double pv_f(double s, void*) { return std::pow(s, 15) - 2 * std::pow(s, 7) + s + 0.5; }

}  // namespace

TEST_CASE("gauss rule integrates polynomials exactly") {
    const GaussRule& g = gauss_rule(16);
    double s = 0, s30 = 0;
    for (int i = 0; i < g.p; ++i) {
        s += g.w[i];
        s30 += g.w[i] * std::pow(g.x[i], 30);
    }
    CHECK(s == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(s30 == doctest::Approx(2.0 / 31).epsilon(1e-13));
}

TEST_CASE("on-panel cauchy weights match GSL qawc principal values") {
    const GaussRule& g = gauss_rule(16);
    Panel pan{cplx(-1.0), cplx(1.0)};
    std::vector<cplx> W(g.p);
    gsl_status_mode();
    gsl_integration_workspace* ws = gsl_integration_workspace_alloc(2000);
    for (double c : {-0.71, 0.0, 0.33, 0.9}) {
        cauchy_weights(g, pan, c, true, W.data());
        cplx approx = 0.0;
        for (int i = 0; i < g.p; ++i) approx += W[i] * pv_f(pan.node(g, i).real(), nullptr);
        gsl_function F{pv_f, nullptr};
        double r = 0, e = 0;
        REQUIRE(gsl_integration_qawc(&F, -1, 1, c, 1e-14, 1e-12, 2000, ws, &r, &e) == 0);
        CHECK(std::abs(approx - r) < 1e-12);
    }
    gsl_integration_workspace_free(ws);
}

TEST_CASE("off-panel cauchy weights match direct quadrature near the panel") {
    const GaussRule& g = gauss_rule(16);
    Panel pan{cplx(-1.0), cplx(1.0)};
    std::vector<cplx> W(g.p);
    for (cplx k : {cplx(0.2, 0.05), cplx(-0.9, -0.01), cplx(1.3, 0.2)}) {
        cauchy_weights(g, pan, k, false, W.data());
        cplx approx = 0.0;
        for (int i = 0; i < g.p; ++i) approx += W[i] * bump(pan.node(g, i).real());
        // W integrates f/(s-k) without the 1/(2πi); the bound is the
        // interpolation error of the degree-15 interpolant of bump
        CHECK(std::abs(approx / (2.0 * kPi * kI) - cauchy_oracle(k)) < 1e-9);
    }
}

TEST_CASE("triangular jump reproduces the Cauchy transform") {
    auto sol = solve_rh(triangular_problem());
    CHECK(sol.jump_residual() < 1e-10);
    for (cplx k : {cplx(0.3, 0.5), cplx(-0.8, -0.2), cplx(2.0, 1.0)}) {
        Mat2 m = sol.m(k);
        CHECK(std::abs(m(0, 1) - cauchy_oracle(k)) < 1e-11);
        CHECK(std::abs(m(0, 0) - 1.0) < 1e-13);
        CHECK(std::abs(m(1, 0)) < 1e-13);
    }
}

TEST_CASE("mesh refinement converges at least fourfold per halving") {
    cplx k(0.3, 0.4);
    cplx ref = cauchy_oracle(k);
    double prev = 0.0;
    for (double mp : {1.0, 0.5}) {
        SolveOptions o;
        o.order = 4;
        o.adaptive = false;
        o.max_panel = mp;
        o.check_residual = false;
        double e = std::abs(solve_rh(triangular_problem(), o).m(k)(0, 1) - ref);
        if (prev > 0.0) CHECK(prev / e >= 4.0);
        prev = e;
    }
}

TEST_CASE("zero reflection gives the identity jump and u = 0") {
    auto refl = zero_reflection();
    auto p = build_sigma_problem(refl, 1.0, 0.5);
    for (std::size_t j = 0; j < p.contour.segments.size(); ++j) {
        const auto& s = p.contour.segments[j];
        CHECK(maxabs(p.jump.v[j](s.base + 0.3 * s.dir) - Mat2::Identity()) == 0.0);
    }
    CHECK(extract_u(solve_rh(p)) == 0.0);
}

TEST_CASE("sigma problem jumps have unit determinant and the literal real-axis form") {
    auto refl = with_rational_h(odd_preset(2.0, 3.0), 0.3);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        double x = 3 * U(rng), t = 0.3 * U(rng), k = -2 + 4 * U(rng);
        auto p = build_sigma_problem(refl, x, t);
        CHECK(jump_det_defect(p) < 1e-12);
        for (std::size_t j = 0; j < p.contour.segments.size(); ++j) {
            if (p.contour.segments[j].tag.rfind("R", 0) != 0) continue;
            Mat2 v = p.jump.v[j](k);
            cplx r = refl.r(k), E = std::exp(8.0 * kI * k * k * k * t - 2.0 * kI * k * x);
            CHECK(std::abs(v(1, 0) - r * E) < 1e-13);
            CHECK(std::abs(v(0, 1) + std::conj(r) / E) < 1e-13);
            CHECK(std::abs(v(1, 1) - (1.0 - std::norm(r))) < 1e-13);
        }
    }
}

TEST_CASE("solved sigma problem: det m = 1 and m(k) = conj(m(-conj k))") {
    auto refl = with_rational_h(odd_preset(2.0, 3.0), 0.3);
    auto sol = solve_rh(build_sigma_problem(refl, 3.0, 0.05));
    CHECK(sol.jump_residual() < 1e-9);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    for (int j = 0; j < 20; ++j) {
        cplx k(U(rng), U(rng));
        if (std::abs(k.imag()) < 0.05) k += cplx(0.0, 0.1);
        CHECK(std::abs(sol.m(k).determinant() - 1.0) < 1e-8);
        CHECK(maxabs(sol.m(k) - sol.m(-std::conj(k)).conjugate()) < 1e-8);
    }
    CHECK_NOTHROW(extract_u(sol));
}

TEST_CASE("structural contract of the built problems") {
    auto o = odd_preset(2.0, 3.0);
    auto oh = with_rational_h(o, 0.3);
    CHECK(check_contract(build_sigma_problem(o, 1.0, 0.1)).ok(1e-10));
    CHECK(check_contract(build_sigma_problem(oh, 1.0, 0.1)).ok(1e-10));
    auto D = build_delta(o, DeltaVariant::Similarity, 2.0);
    CHECK(check_contract(build_similarity_problem(o, 48 * 0.2, 0.2, D)).ok(1e-10));
    auto e = even_preset(-0.4, 1.0);
    auto S = build_delta(e, DeltaVariant::SelfSimilar, 0.0);
    Mat2 s3 = diag2(1.0, -1.0);
    CHECK(check_contract(build_selfsimilar_problem(e, 10.0, 1000.0, S), s3).ok(1e-10));
}

TEST_CASE("truncation failure surfaces as an error") {
    RHProblem p;
    p.contour.segments.push_back(make_ray(0.0, 1.0, 5.0, +1, "R+"));
    p.jump.v.push_back([](cplx) { return upper(0.5); });
    CHECK_FALSE(truncate_rays(p, 1e-12, 20.0));
}
