#include "doctest.h"

#include <cmath>
#include <random>

#include <gsl/gsl_integration.h>

#include "mkdvq/errors.hpp"
#include "mkdvq/spectral.hpp"

using namespace mkdvq;

namespace {

constexpr double kTol = 1e-12;

// First Neumann iterate of the column-2 Volterra equation:
//   entry 1 at 0 = -∫_0^∞ e^{-2 c s} q(s) ds,  c = ik (x-part) or -4ik³ (t-part).
struct NeumannArg {
    std::function<cplx(double)> q;
    cplx c;
    bool imag;
};

double neumann_integrand(double s, void* p) {
    auto* a = static_cast<NeumannArg*>(p);
    cplx v = -std::exp(-2.0 * a->c * s) * a->q(s);
    return a->imag ? v.imag() : v.real();
}

cplx neumann1(std::function<cplx(double)> q, cplx c, double end) {
    gsl_status_mode();
    gsl_integration_workspace* ws = gsl_integration_workspace_alloc(4000);
    cplx out;
    for (bool im : {false, true}) {
        NeumannArg a{q, c, im};
        gsl_function F{neumann_integrand, &a};
        double r = 0, e = 0;
        REQUIRE(gsl_integration_qag(&F, 0.0, end, 1e-16, 1e-12, 4000, GSL_INTEG_GAUSS61, ws, &r, &e) == 0);
        (im ? out.imag(r) : out.real(r));
    }
    gsl_integration_workspace_free(ws);
    return out;
}

HalfLineData initial_only(double eps) {
    HalfLineData d;
    d.u0 = HalfLineFn::closed_form([eps](double x) { return eps * std::exp(-(x - 3) * (x - 3)); }, "gaussian");
    d.x_max = 12.0;
    return d;
}

HalfLineData boundary_pulse() {
    HalfLineData d;
    d.u0 = HalfLineFn::closed_form([](double x) { return 0.1 * std::exp(-(x - 4) * (x - 4)); }, "gaussian");
    d.g0 = HalfLineFn::closed_form([](double t) { return 0.1 * t * t * std::exp(-t); }, "pulse");
    d.g1 = HalfLineFn::closed_form([](double t) { return 0.05 * t * std::exp(-t); }, "pulse");
    d.x_max = 15.0;
    d.t_max = 45.0;
    return d;
}

}  // namespace

TEST_CASE("zero data gives identity scattering matrices") {
    HalfLineData d;
    CHECK(maxabs(integrate_x_system(d, cplx(0.7, -0.2), kTol) - Mat2::Identity()) == 0.0);
    CHECK(maxabs(integrate_t_system(d, cplx(0.7, 0.1), kTol) - Mat2::Identity()) == 0.0);
    SpectralFunctions sf(d, kTol);
    auto refl = build_reflection(sf, chebyshev_grid(8.0, 65));
    CHECK(refl.sup_r == 0.0);
    CHECK(std::abs(refl.h(cplx(0.3, 0.0))) == 0.0);
    CHECK(global_relation_residual(sf, {cplx(0.0, -0.5)}) == 0.0);
}

TEST_CASE("b(0) for eps e^{-x} follows the first Neumann iterate") {
    double eps = 1e-3;
    HalfLineData d;
    d.u0 = HalfLineFn::closed_form([eps](double x) { return eps * std::exp(-x); }, "exponential");
    d.x_max = 40.0;
    cplx b = integrate_x_system(d, 0.0, kTol)(0, 1);
    CHECK(std::abs(b + eps) / eps < eps);
    for (cplx k : {cplx(0.5, 0.0), cplx(1.3, -0.4)}) {
        cplx b1 = neumann1([eps](double x) { return cplx(eps * std::exp(-x)); }, kI * k, 40.0);
        CHECK(std::abs(integrate_x_system(d, k, kTol)(0, 1) - b1) / std::abs(b1) < eps);
    }
}

TEST_CASE("B for eps e^{-t} Dirichlet data follows the first Neumann iterate") {
    double eps = 1e-3;
    HalfLineData d;
    d.g0 = HalfLineFn::closed_form([eps](double t) { return eps * std::exp(-t); }, "exponential");
    d.t_max = 40.0;
    for (cplx k : {cplx(0.0), cplx(0.6 * std::cos(kPi / 6), 0.6 * std::sin(kPi / 6)), cplx(-0.8, 0.0)}) {
        auto q = [eps, k](double t) {
            double g = eps * std::exp(-t);
            return lax_v(g, 0.0, 0.0, k)(0, 1);
        };
        cplx B1 = neumann1(q, -4.0 * kI * k * k * k, 40.0);
        cplx B = integrate_t_system(d, k, kTol)(0, 1);
        CHECK(std::abs(B - B1) / std::abs(B1) < eps);
    }
}

TEST_CASE("unit determinants and the k -> -conj k symmetry") {
    auto d = boundary_pulse();
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> U(-3.0, 3.0);
    for (int j = 0; j < 6; ++j) {
        double k = U(rng);
        Mat2 X = integrate_x_system(d, k, kTol), Xm = integrate_x_system(d, -k, kTol);
        CHECK(std::abs(X.determinant() - 1.0) <= 10 * kTol);
        CHECK(maxabs(X - Xm.conjugate()) <= 10 * kTol);
        Mat2 T = integrate_t_system(d, k, kTol), Tm = integrate_t_system(d, -k, kTol);
        CHECK(std::abs(T.determinant() - 1.0) <= 10 * kTol);
        CHECK(maxabs(T - Tm.conjugate()) <= 10 * kTol);
    }
}

TEST_CASE("pure initial-value data: A = 1, B = 0, h = 0, r = conj(b)/a") {
    auto d = initial_only(0.5);
    SpectralFunctions sf(d, kTol);
    CHECK(std::abs(sf.A(cplx(0.4, 0.2)) - 1.0) == 0.0);
    CHECK(std::abs(sf.B(cplx(0.4, 0.2))) == 0.0);
    auto grid = chebyshev_grid(4.0, 33);
    auto refl = build_reflection(sf, grid);
    // grid nodes, where the stored r carries no interpolation error
    for (double k : {grid[3], grid[16], grid[27]}) {
        CHECK(std::abs(refl.h(k)) == 0.0);
        cplx want = std::conj(sf.b(k)) / sf.a(k);
        CHECK(std::abs(refl.r(k) - want) < 1e-9);
    }
}

TEST_CASE("small Gaussian data: |r| matches the Born approximation, gap shrinks quadratically") {
    std::vector<double> grid = chebyshev_grid(4.0, 33);
    double gap_prev = 0.0;
    for (double eps : {2e-3, 1e-3}) {
        auto d = initial_only(eps);
        SpectralFunctions sf(d, kTol);
        auto refl = build_reflection(sf, grid);
        double gap = 0.0;
        for (std::size_t i : {2, 9, 16, 20, 29}) {
            double k = grid[i];
            cplx born = neumann1([eps](double x) { return cplx(eps * std::exp(-(x - 3) * (x - 3))); }, kI * k, 12.0);
            double rel = std::abs(std::abs(refl.r(k)) - std::abs(born)) / std::abs(born);
            if (eps == 1e-3) CHECK(rel <= 1e-4);
            gap = std::max(gap, std::abs(refl.r(k) - std::conj(born)));
        }
        if (gap_prev > 0.0) CHECK(gap_prev / gap >= 3.5);
        gap_prev = gap;
    }
}

TEST_CASE("reflection data from boundary data: symmetry and a real r(0)") {
    auto d = boundary_pulse();
    SpectralFunctions sf(d, kTol);
    auto refl = build_reflection(sf, chebyshev_grid(6.0, 129));
    CHECK(refl.sup_r < 1.0);
    CHECK(std::abs(refl.r(0.0).imag()) <= 10 * kTol);
    CHECK(std::abs(sf.a(0.0).imag()) <= 10 * kTol);
    for (double k : {0.25, 1.0, 3.0}) CHECK(std::abs(sf.r(k) - std::conj(sf.r(-k))) <= 10 * kTol);
    // h on D2: the outer sectors of the lower half plane
    for (double rho : {0.4, 1.2}) {
        for (double th : {-kPi / 6, -0.3}) {
            cplx k = rho * std::exp(kI * th);
            CHECK(std::abs(sf.h(k) - std::conj(sf.h(-std::conj(k)))) <= 1e-9);
        }
    }
}

TEST_CASE("global relation: domain checks and the incompatible-data control") {
    CHECK(in_closure_D1(cplx(0.0, -1.0)));
    CHECK_FALSE(in_closure_D1(cplx(1.0, -0.1)));
    CHECK_FALSE(in_closure_D1(cplx(0.0, 1.0)));
    auto d = initial_only(1.0);
    SpectralFunctions sf(d, kTol);
    CHECK_THROWS_AS(global_relation_residual(sf, {cplx(1.0, 0.5)}), Error);
    // Gaussian u0 with g ≡ 0 is not a quarter-plane solution.
    CHECK(global_relation_residual(sf, {cplx(0.0, -0.5), cplx(-0.2, -0.6)}) > 1e-2);
}

TEST_CASE("tails and JSON data") {
    HalfLineData d;
    d.u0 = HalfLineFn::closed_form([](double) { return 0.1; }, "constant");
    CHECK_THROWS_AS(integrate_x_system(d, cplx(0.3, 0.0), kTol), Error);
    d.tail = TailModel::Kind::None;
    CHECK_NOTHROW(integrate_x_system(d, cplx(0.3, 0.0), kTol));

    auto j = half_line_data_from_json(
        R"({"u0":{"kind":"expr","form":"gaussian","amp":0.1,"center":4,"width":1},
            "g0":{"kind":"samples","grid":[0,1,2,3],"values":[0,0.1,0.05,0]},"x_max":20,"t_max":3,"tail":"none"})");
    CHECK(j.u0(4.0) == doctest::Approx(0.1));
    CHECK(j.g0(1.0) == doctest::Approx(0.1));
    CHECK(j.g0(5.0) == 0.0);
    CHECK(j.g1.is_zero());
    CHECK_THROWS_AS(half_line_data_from_json(R"({"u0":{"kind":"expr","form":"nope"}})"), Error);
}
