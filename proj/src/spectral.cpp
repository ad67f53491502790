#include "mkdvq/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_odeiv2.h>
#include <gsl/gsl_spline.h>

#include "json.hpp"
#include "mkdvq/errors.hpp"

namespace mkdvq {

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Spline {
    gsl_spline* sp = nullptr;
    ~Spline() { gsl_spline_free(sp); }
};

// Truncation point beyond which the modeled tail, weighted by `weight`,
// integrates to less than `budget`.
double truncation_point(const HalfLineFn& f, double end, TailModel::Kind kind, double weight, double budget) {
    if (f.is_zero() || kind == TailModel::Kind::None) return end;
    TailModel tm = f.fit_tail(end);
    if (tm.amp == 0.0) return end;
    double L = end;
    while (weight * tm.integral_beyond(L) > budget) {
        L += 0.5 / tm.rate;
        if (L > end + 80.0 / tm.rate) break;
    }
    return L;
}

// Evaluator that continues sampled data by their fitted exponential tail.
RealFn extended(const HalfLineFn& f, double end, TailModel::Kind kind) {
    if (f.is_zero()) return [](double) { return 0.0; };
    if (!f.sampled() || kind == TailModel::Kind::None) return [f](double s) { return f(s); };
    TailModel tm = f.fit_tail(end);
    double fe = f(end);
    return [f, end, fe, rate = tm.rate](double s) { return s <= end ? f(s) : fe * std::exp(-rate * (s - end)); };
}

struct LaxSystem {
    std::function<Mat2(double)> Q;
    double alpha, beta;
    int column;  // 0 or 1
};

int lax_rhs(double s, const double y[], double dy[], void* params) {
    auto* L = static_cast<LaxSystem*>(params);
    Mat2 Q = L->Q(s);
    cplx e = std::exp(cplx(0.0, -2.0 * L->beta * s));
    cplx q11 = Q(0, 0), q12 = Q(0, 1) * e, q21 = Q(1, 0) / e, q22 = Q(1, 1);
    cplx y1(y[0], y[1]), y2(y[2], y[3]);
    cplx d1, d2;
    if (L->column == 0) {
        d1 = q11 * y1 + q12 * y2;
        d2 = -2.0 * L->alpha * y2 + q21 * y1 + q22 * y2;
    } else {
        d1 = 2.0 * L->alpha * y1 + q11 * y1 + q12 * y2;
        d2 = q21 * y1 + q22 * y2;
    }
    dy[0] = d1.real();
    dy[1] = d1.imag();
    dy[2] = d2.real();
    dy[3] = d2.imag();
    return GSL_SUCCESS;
}

// Y' = c[σ3,Y] + Q Y on [0, L] with Y(L) = I, integrated in the variable
// e^{-i Im(c) s σ̂3} Y so that only the growth part α = Re c stays explicit.
// Column 2 is stable backward for α >= 0, column 1 for α <= 0.
Mat2 integrate_lax(std::function<Mat2(double)> Q, cplx c, double L, double tol) {
    Mat2 out;
    out.setConstant(cplx(kNaN, kNaN));
    const double alpha = c.real(), beta = c.imag();
    gsl_status_mode();
    for (int col = 0; col < 2; ++col) {
        bool valid = col == 1 ? alpha >= 0.0 : alpha <= 0.0;
        if (!valid) continue;
        LaxSystem sys{Q, alpha, beta, col};
        gsl_odeiv2_system gs{lax_rhs, nullptr, 4, &sys};
        gsl_odeiv2_driver* drv = gsl_odeiv2_driver_alloc_y_new(&gs, gsl_odeiv2_step_rk8pd, -1e-3, tol, tol);
        gsl_odeiv2_driver_set_nmax(drv, 2000000);
        double y[4] = {0, 0, 0, 0};
        y[col == 0 ? 0 : 2] = 1.0;
        double s = L;
        int status = L > 0.0 ? gsl_odeiv2_driver_apply(drv, &s, 0.0, y) : GSL_SUCCESS;
        gsl_odeiv2_driver_free(drv);
        if (status != GSL_SUCCESS) {
            throw Error(ErrorKind::StepFailure, std::string("Lax ODE: ") + gsl_strerror(status));
        }
        out(0, col) = cplx(y[0], y[1]);
        out(1, col) = cplx(y[2], y[3]);
    }
    return out;
}

double jnum(const nlohmann::json& j, const char* key, double dflt) {
    return j.contains(key) ? j.at(key).get<double>() : dflt;
}

HalfLineFn fn_from_json(const nlohmann::json& j, const std::string& name) {
    if (j.is_null()) return HalfLineFn::zero();
    std::string kind = j.value("kind", "");
    if (kind == "zero") return HalfLineFn::zero();
    if (kind == "samples") {
        auto grid = j.at("grid").get<std::vector<double>>();
        auto values = j.at("values").get<std::vector<double>>();
        return HalfLineFn::samples(std::move(grid), std::move(values));
    }
    if (kind != "expr") throw Error(ErrorKind::Config, name + ": unknown kind '" + kind + "'");
    std::string form = j.value("form", "");
    double amp = jnum(j, "amp", 0.0);
    if (form == "gaussian") {
        double c = jnum(j, "center", 0.0), w = jnum(j, "width", 1.0);
        if (!(w > 0)) throw Error(ErrorKind::Config, name + ": width must be positive");
        return HalfLineFn::closed_form([=](double s) { return amp * std::exp(-std::pow((s - c) / w, 2)); }, form);
    }
    if (form == "sech") {
        double c = jnum(j, "center", 0.0), w = jnum(j, "width", 1.0);
        if (!(w > 0)) throw Error(ErrorKind::Config, name + ": width must be positive");
        return HalfLineFn::closed_form([=](double s) { return amp / std::cosh((s - c) / w); }, form);
    }
    if (form == "exponential") {
        double rate = jnum(j, "rate", 1.0);
        return HalfLineFn::closed_form([=](double s) { return amp * std::exp(-rate * s); }, form);
    }
    if (form == "pulse") {
        double w = jnum(j, "width", 1.0), p = jnum(j, "power", 1.0);
        if (!(w > 0) || p < 0) throw Error(ErrorKind::Config, name + ": bad pulse parameters");
        return HalfLineFn::closed_form([=](double s) { return amp * std::pow(s / w, p) * std::exp(-s / w); }, form);
    }
    if (form == "constant") return HalfLineFn::closed_form([=](double) { return amp; }, form);
    throw Error(ErrorKind::Config, name + ": unknown form '" + form + "'");
}

}  // namespace

double TailModel::integral_beyond(double L) const {
    if (kind == Kind::None || amp == 0.0) return 0.0;
    return amp * std::exp(-rate * L) / rate;
}

HalfLineFn HalfLineFn::zero() { return HalfLineFn(); }

HalfLineFn HalfLineFn::closed_form(RealFn f, std::string label) {
    HalfLineFn h;
    h.f_ = std::move(f);
    h.zero_ = false;
    h.label_ = std::move(label);
    return h;
}

HalfLineFn HalfLineFn::samples(std::vector<double> grid, std::vector<double> values) {
    if (grid.size() != values.size() || grid.size() < 4)
        throw Error(ErrorKind::Config, "samples need matching grid/values with at least 4 points");
    if (!std::is_sorted(grid.begin(), grid.end()) || std::adjacent_find(grid.begin(), grid.end()) != grid.end())
        throw Error(ErrorKind::Config, "sample grid must be strictly increasing");
    HalfLineFn h;
    auto sp = std::make_shared<Spline>();
    sp->sp = gsl_spline_alloc(gsl_interp_cspline, grid.size());
    gsl_spline_init(sp->sp, grid.data(), values.data(), grid.size());
    h.spline_ = sp;
    h.grid_ = std::move(grid);
    h.values_ = std::move(values);
    h.zero_ = std::all_of(h.values_.begin(), h.values_.end(), [](double v) { return v == 0.0; });
    h.label_ = "samples";
    return h;
}

double HalfLineFn::operator()(double s) const {
    if (zero_) return 0.0;
    if (grid_.empty()) return f_(s);
    if (s < grid_.front() || s > grid_.back()) return 0.0;
    auto sp = std::static_pointer_cast<const Spline>(spline_);
    return gsl_spline_eval(sp->sp, s, nullptr);
}

TailModel HalfLineFn::fit_tail(double end) const {
    TailModel tm;
    if (zero_) return tm;
    const int n = 200;
    double a = 0.9 * end;
    std::vector<double> xs, ys;
    double peak = 0.0;
    for (int i = 0; i <= n; ++i) {
        double s = a + (end - a) * i / n;
        double v = std::abs((*this)(s));
        peak = std::max(peak, v);
        if (v > 1e-300) {
            xs.push_back(s);
            ys.push_back(std::log(v));
        }
    }
    if (peak < 1e-200 || xs.size() < 10) return tm;
    double m = double(xs.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    if (!(slope < -1e-8)) {
        if (peak < 1e-15) return tm;
        throw Error(ErrorKind::NonDecayingTail, "data do not decay over the last decade of the grid");
    }
    tm.rate = -slope;
    for (std::size_t i = 0; i < xs.size(); ++i) tm.amp = std::max(tm.amp, std::exp(ys[i] + tm.rate * xs[i]));
    return tm;
}

HalfLineData half_line_data_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw Error(ErrorKind::Config, std::string("invalid JSON: ") + e.what());
    }
    HalfLineData d;
    try {
        d.u0 = fn_from_json(j.value("u0", nlohmann::json()), "u0");
        d.g0 = fn_from_json(j.value("g0", nlohmann::json()), "g0");
        d.g1 = fn_from_json(j.value("g1", nlohmann::json()), "g1");
        d.g2 = fn_from_json(j.value("g2", nlohmann::json()), "g2");
        d.x_max = jnum(j, "x_max", d.x_max);
        d.t_max = jnum(j, "t_max", d.t_max);
        std::string tail = j.value("tail", "exponential");
        if (tail == "none")
            d.tail = TailModel::Kind::None;
        else if (tail != "exponential")
            throw Error(ErrorKind::Config, "tail must be 'exponential' or 'none'");
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Config, std::string("malformed half-line data: ") + e.what());
    }
    if (!(d.x_max > 0.0) || !(d.t_max > 0.0)) throw Error(ErrorKind::Config, "x_max and t_max must be positive");
    return d;
}

Mat2 integrate_x_system(const HalfLineData& data, cplx k, double tol) {
    if (!(tol > 0.0)) throw Error(ErrorKind::Config, "tol must be positive");
    if (data.u0.is_zero()) return Mat2::Identity();
    double L = truncation_point(data.u0, data.x_max, data.tail, 1.0, tol / 10.0);
    RealFn u = extended(data.u0, data.x_max, data.tail);
    auto Q = [u](double x) {
        double v = u(x);
        Mat2 m;
        m << 0.0, v, v, 0.0;
        return m;
    };
    return integrate_lax(Q, kI * k, L, tol);
}

Mat2 lax_v(double g0, double g1, double g2, cplx k) {
    cplx off = -2.0 * g0 * g0 * g0 + g2;
    Mat2 V;
    V << -2.0 * kI * g0 * g0 * k, -4.0 * g0 * k * k + 2.0 * kI * g1 * k + off,
        -4.0 * g0 * k * k - 2.0 * kI * g1 * k + off, 2.0 * kI * g0 * g0 * k;
    return V;
}

Mat2 integrate_t_system(const HalfLineData& data, cplx k, double tol) {
    if (!(tol > 0.0)) throw Error(ErrorKind::Config, "tol must be positive");
    if (data.g0.is_zero() && data.g1.is_zero() && data.g2.is_zero()) return Mat2::Identity();
    double ak = std::abs(k);
    double w0 = 4.0 * ak * ak + 2.0 * ak + 2.0, w1 = 2.0 * ak, w2 = 1.0;
    double L = std::max({truncation_point(data.g0, data.t_max, data.tail, w0, tol / 30.0),
                         truncation_point(data.g1, data.t_max, data.tail, w1, tol / 30.0),
                         truncation_point(data.g2, data.t_max, data.tail, w2, tol / 30.0)});
    RealFn g0 = extended(data.g0, data.t_max, data.tail), g1 = extended(data.g1, data.t_max, data.tail),
           g2 = extended(data.g2, data.t_max, data.tail);
    auto Q = [=](double t) { return lax_v(g0(t), g1(t), g2(t), k); };
    return integrate_lax(Q, -4.0 * kI * k * k * k, L, tol);
}

Eigen::Vector2cd SpectralFunctions::x_col2(cplx k) const {
    if (k.imag() > 0.0) throw Error(ErrorKind::DomainViolation, "a, b need Im k <= 0");
    return integrate_x_system(data_, k, tol_).col(1);
}

Eigen::Vector2cd SpectralFunctions::t_col2(cplx k) const {
    if ((k * k * k).imag() < -1e-14 * (1.0 + std::pow(std::abs(k), 3)))
        throw Error(ErrorKind::DomainViolation, "A, B need Im k^3 >= 0");
    return integrate_t_system(data_, k, tol_).col(1);
}

cplx SpectralFunctions::d(cplx k) const {
    cplx kb = std::conj(k);
    auto x = x_col2(k);
    auto t = t_col2(kb);
    return x(1) * std::conj(t(1)) - x(0) * std::conj(t(0));
}

cplx SpectralFunctions::h(cplx k) const {
    cplx kb = std::conj(k);
    auto x = x_col2(k);
    auto t = t_col2(kb);
    cplx dd = x(1) * std::conj(t(1)) - x(0) * std::conj(t(0));
    if (std::abs(x(1)) < tol_) throw Error(ErrorKind::ZeroOfA, "a(k) vanishes");
    if (std::abs(dd) < tol_) throw Error(ErrorKind::ZeroOfD, "d(k) vanishes");
    return -std::conj(t(0)) / (x(1) * dd);
}

cplx SpectralFunctions::r(double k) const {
    auto x = x_col2(cplx(k, 0.0));
    if (std::abs(x(1)) < tol_) throw Error(ErrorKind::ZeroOfA, "a(k) vanishes");
    return std::conj(x(0)) / x(1) + h(cplx(k, 0.0));
}

std::vector<double> chebyshev_grid(double K, int n) {
    if (n < 2 || !(K > 0)) throw Error(ErrorKind::Config, "grid needs n >= 2 and K > 0");
    std::vector<double> g(n);
    for (int j = 0; j < n; ++j) g[j] = -K * std::cos(kPi * j / (n - 1));
    g[(n - 1) / 2] = (n % 2 == 1) ? 0.0 : g[(n - 1) / 2];
    return g;
}

ReflectionData build_reflection(const SpectralFunctions& sf, const std::vector<double>& grid) {
    if (grid.size() < 4) throw Error(ErrorKind::Config, "reflection grid needs at least 4 points");
    std::vector<double> rr(grid.size()), ri(grid.size()), hr(grid.size()), hi(grid.size());
    double sup = 0.0;
    bool hz = true, rz = true;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        cplx k(grid[i], 0.0);
        Eigen::Vector2cd x = integrate_x_system(sf.data(), k, sf.tol()).col(1);
        Eigen::Vector2cd t = integrate_t_system(sf.data(), k, sf.tol()).col(1);
        cplx a = x(1), b = x(0), A = t(1), B = t(0);
        if (std::abs(a) < sf.tol()) throw Error(ErrorKind::ZeroOfA, "a(k) vanishes at k = " + std::to_string(grid[i]));
        cplx d = a * std::conj(A) - b * std::conj(B);
        if (std::abs(d) < sf.tol()) throw Error(ErrorKind::ZeroOfD, "d(k) vanishes at k = " + std::to_string(grid[i]));
        cplx h = -std::conj(B) / (a * d);
        cplx r = std::conj(b) / a + h;
        rr[i] = r.real();
        ri[i] = r.imag();
        hr[i] = h.real();
        hi[i] = h.imag();
        sup = std::max(sup, std::abs(r));
        rz = rz && r == 0.0;
        hz = hz && h == 0.0;
    }
    if (sup >= 1.0) throw Error(ErrorKind::ReflectionTooLarge, "sup |r| = " + std::to_string(sup));
    auto make = [&](const std::vector<double>& re, const std::vector<double>& im) {
        auto fr = HalfLineFn::samples(grid, re), fi = HalfLineFn::samples(grid, im);
        double lo = grid.front(), hi_ = grid.back();
        return [fr, fi, lo, hi_](double k) { return k < lo || k > hi_ ? cplx(0.0) : cplx(fr(k), fi(k)); };
    };
    auto rfun = make(rr, ri);
    auto hfun = make(hr, hi);
    auto sfp = std::make_shared<const SpectralFunctions>(sf);
    ReflectionData refl;
    refl.r = [rfun](cplx k) { return rfun(k.real()); };
    refl.rbar = [rfun](cplx k) { return std::conj(rfun(k.real())); };
    // h on the real grid is interpolated; off the axis it is recomputed.
    refl.h = [hfun, sfp](cplx k) { return k.imag() == 0.0 ? hfun(k.real()) : sfp->h(k); };
    refl.hbar = [hfun, sfp](cplx k) {
        return k.imag() == 0.0 ? std::conj(hfun(k.real())) : std::conj(sfp->h(std::conj(k)));
    };
    refl.strip_radius = 0.0;
    refl.sup_r = sup;
    refl.r_zero = rz;
    refl.h_zero = hz;
    refl.label = "spectral";
    return refl;
}

bool in_closure_D1(cplx k, double slack) {
    double scale = 1.0 + std::pow(std::abs(k), 3);
    return k.imag() <= slack && (k * k * k).imag() >= -slack * scale;
}

double global_relation_residual(const SpectralFunctions& sf, const std::vector<cplx>& samples) {
    double worst = 0.0;
    for (cplx k : samples) {
        if (!in_closure_D1(k)) throw Error(ErrorKind::DomainViolation, "global relation sample outside closure of D1");
        Eigen::Vector2cd x = integrate_x_system(sf.data(), k, sf.tol()).col(1);
        Eigen::Vector2cd t = integrate_t_system(sf.data(), k, sf.tol()).col(1);
        worst = std::max(worst, std::abs(t(1) * x(0) - t(0) * x(1)));
    }
    return worst;
}

double global_relation_residual_horizon(const SpectralFunctions& sf, const HalfLineData& snapshot,
                                        const std::vector<cplx>& samples) {
    double worst = 0.0;
    const double T = sf.data().t_max;
    for (cplx k : samples) {
        if (!in_closure_D1(k)) throw Error(ErrorKind::DomainViolation, "global relation sample outside closure of D1");
        Eigen::Vector2cd x = integrate_x_system(sf.data(), k, sf.tol()).col(1);
        Eigen::Vector2cd t = integrate_t_system(sf.data(), k, sf.tol()).col(1);
        cplx bT = integrate_x_system(snapshot, k, sf.tol())(0, 1);
        cplx rel = t(1) * x(0) - t(0) * x(1) - std::exp(8.0 * kI * k * k * k * T) * bT;
        worst = std::max(worst, std::abs(rel));
    }
    return worst;
}

}  // namespace mkdvq
