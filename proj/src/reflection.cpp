#include "mkdvq/reflection.hpp"

#include <cmath>

namespace mkdvq {

ReflectionData zero_reflection() {
    ReflectionData d;
    auto z = [](cplx) { return cplx(0.0); };
    d.r = d.rbar = d.h = d.hbar = z;
    d.strip_radius = INFINITY;
    d.r_zero = true;
    d.h_zero = true;
    d.label = "zero";
    return d;
}

ReflectionData odd_preset(double gamma, double kappa) {
    ReflectionData d;
    d.r = [gamma, kappa](cplx k) { return kI * gamma * k * std::exp(-k * k) / (1.0 + k * k / (kappa * kappa)); };
    // conj(r(conj k)) = -r(k) for this family.
    d.rbar = [gamma, kappa](cplx k) { return -kI * gamma * k * std::exp(-k * k) / (1.0 + k * k / (kappa * kappa)); };
    d.h = d.hbar = [](cplx) { return cplx(0.0); };
    d.strip_radius = kappa;
    d.r_zero = gamma == 0.0;
    d.label = "odd";
    d.sup_r = sup_abs_r(d);
    return d;
}

ReflectionData even_preset(double gamma, double kappa) {
    ReflectionData d;
    d.r = [gamma, kappa](cplx k) { return gamma * std::exp(-k * k) / (1.0 + kI * k / kappa); };
    d.rbar = [gamma, kappa](cplx k) { return gamma * std::exp(-k * k) / (1.0 - kI * k / kappa); };
    d.h = d.hbar = [](cplx) { return cplx(0.0); };
    d.strip_radius = kappa;
    d.r_zero = gamma == 0.0;
    d.label = "even";
    d.sup_r = sup_abs_r(d);
    return d;
}

ReflectionData with_rational_h(ReflectionData base, double eta) {
    base.h = [eta](cplx k) {
        cplx q = 1.0 + k * k / 4.0;
        return kI * eta * k / (q * q);
    };
    base.hbar = [eta](cplx k) {
        cplx q = 1.0 + k * k / 4.0;
        return -kI * eta * k / (q * q);
    };
    base.h_zero = eta == 0.0;
    base.strip_radius = std::min(base.strip_radius, 2.0);
    base.label += "+h";
    return base;
}

double sup_abs_r(const ReflectionData& refl, double K, int n) {
    double m = 0.0;
    for (int j = 0; j <= n; ++j) {
        double k = K * std::cos(kPi * j / n);
        m = std::max(m, std::abs(refl.r(cplx(k, 0.0))));
    }
    return m;
}

double r_symmetry_defect(const ReflectionData& refl, double K, int n) {
    double m = 0.0;
    for (int j = 0; j < n; ++j) {
        double k = -K + 2.0 * K * j / (n - 1);
        m = std::max(m, std::abs(refl.r(cplx(k, 0.0)) - std::conj(refl.r(cplx(-k, 0.0)))));
    }
    return m;
}

}  // namespace mkdvq
