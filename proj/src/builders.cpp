#include "mkdvq/builders.hpp"

#include <cmath>
#include <memory>

#include "mkdvq/errors.hpp"

namespace mkdvq {

namespace {

cplx expi(double angle) { return std::exp(cplx(0.0, angle)); }

// e^{-iπ/4σ3} A e^{iπ/4σ3}.
Mat2 rotate(const Mat2& a) {
    Mat2 b = a;
    b(0, 1) *= -kI;
    b(1, 0) *= kI;
    return b;
}

void add(RHProblem& p, ContourSegment s, JumpFn v) {
    p.contour.segments.push_back(std::move(s));
    p.jump.v.push_back(std::move(v));
}

void finish(RHProblem& p, const ReflectionData& refl, const BuildOptions& opt, bool deformed) {
    if (!truncate_rays(p, opt.trunc_tol, opt.max_ray))
        throw Error(ErrorKind::TruncationFailure, "jump does not decay along a ray within the maximum length");
    p.jump.analytic_radius = refl.strip_radius;
    if (deformed && !refl.r_zero && opt.strip_margin * max_height(p.contour) > refl.strip_radius)
        throw Error(ErrorKind::StripTooNarrow, "deformed contour reaches height " +
                                                   std::to_string(max_height(p.contour)) + " but strip radius is " +
                                                   std::to_string(refl.strip_radius));
}

// Σ rays carrying h, conjugated by Δ = diag(δ^{-1}, δ) (δ ≡ 1 when null).
// Each ray from 0 may be split at `cut` (distance from 0) where it crosses
// another piece; cut <= 0 keeps it whole.
using RefPtr = std::shared_ptr<const ReflectionData>;
using DeltaPtr = std::shared_ptr<const ConjugationDelta>;

void add_h_rays(RHProblem& p, RefPtr R, double x, double t, DeltaPtr D, double cut, bool rotated) {
    auto d2 = [D](cplx k) { return D ? std::pow(D->delta(k), 2) : cplx(1.0); };
    auto j4 = [=](cplx k) {
        Mat2 m = upper(d2(k) * R->hbar(k) * std::exp(-t_phase(k, x, t)));
        return rotated ? rotate(m) : m;
    };
    auto j1 = [=](cplx k) {
        Mat2 m = lower(R->h(k) / d2(k) * std::exp(t_phase(k, x, t)));
        return rotated ? rotate(m) : m;
    };
    struct RaySpec {
        double angle;
        int orient;
        bool upper;
    };
    for (RaySpec r : {RaySpec{kPi / 3, +1, true}, RaySpec{2 * kPi / 3, -1, true}, RaySpec{-kPi / 3, -1, false}, RaySpec{-2 * kPi / 3, +1, false}}) {
        cplx dir = expi(r.angle);
        JumpFn v = r.upper ? JumpFn(j4) : JumpFn(j1);
        std::string tag = r.upper ? "dD4" : "dD1";
        if (cut > 0.0) {
            ContourSegment in = r.orient > 0 ? make_segment(0.0, cut * dir, tag + "-in")
                                             : make_segment(cut * dir, 0.0, tag + "-in");
            in.grade_start = in.grade_end = true;
            add(p, in, v);
            auto out = make_ray(cut * dir, dir, 1.0, r.orient, tag);
            out.grade_start = r.orient > 0;
            out.grade_end = r.orient < 0;
            add(p, out, v);
            p.contour.intersections.push_back(cut * dir);
        } else {
            auto ray = make_ray(0.0, dir, 1.0, r.orient, tag);
            // only the base is a junction; the truncated far end is smooth
            ray.grade_start = r.orient > 0;
            ray.grade_end = r.orient < 0;
            add(p, ray, v);
        }
    }
    p.contour.intersections.push_back(0.0);
}

}  // namespace

double max_height(const Contour& c) {
    double h = 0.0;
    for (const auto& s : c.segments) h = std::max({h, std::abs(s.base.imag()), std::abs(s.far().imag())});
    return h;
}

RHProblem build_sigma_problem(const ReflectionData& refl, double x, double t, const BuildOptions& opt) {
    if (x < 0.0 || t < 0.0) throw Error(ErrorKind::DomainViolation, "build_sigma_problem needs x, t >= 0");
    RHProblem p;
    auto R = std::make_shared<const ReflectionData>(refl);
    auto jr = [x, t, R](cplx k) {
        cplx E = std::exp(t_phase(k, x, t));
        cplx r = R->r(k), rb = R->rbar(k);
        Mat2 m;
        m << 1.0, -rb / E, r * E, 1.0 - r * rb;
        return m;
    };
    bool with_h = !refl.h_zero;
    auto right = make_ray(0.0, 1.0, 1.0, +1, "R+");
    auto left = make_ray(0.0, -1.0, 1.0, -1, "R-");
    right.grade_start = left.grade_end = with_h;
    add(p, left, jr);
    add(p, right, jr);
    if (with_h) add_h_rays(p, R, x, t, nullptr, 0.0, false);
    finish(p, refl, opt, false);
    return p;
}

RHProblem build_similarity_problem(const ReflectionData& refl, double x, double t, const ConjugationDelta& delta,
                                   const BuildOptions& opt) {
    if (!(x > 0.0 && t > 0.0)) throw Error(ErrorKind::DomainViolation, "similarity problem needs x, t > 0");
    const double k0 = std::sqrt(x / t / 12.0);
    if (delta.variant != DeltaVariant::Similarity || std::abs(delta.k0 - k0) > 1e-12 * k0)
        if (!delta.trivial())
            throw Error(ErrorKind::Config, "delta was built for a different k0 or variant");
    RHProblem p;
    auto R = std::make_shared<const ReflectionData>(refl);
    auto D = std::make_shared<const ConjugationDelta>(delta);
    auto E = [x, t](cplx k) { return std::exp(t_phase(k, x, t)); };
    auto d = [D](cplx k) { return D->delta(k); };
    auto r1 = [R](cplx k) { return R->r(k) / (1.0 - R->r(k) * R->rbar(k)); };
    auto r4 = [R](cplx k) { return R->rbar(k) / (1.0 - R->r(k) * R->rbar(k)); };

    // B_l = lower(δ^{-2} r1 e^{tΦ}), B_u^{-1} = upper(-δ² r4 e^{-tΦ}),
    // b_l^{-1} = lower(δ^{-2} r e^{tΦ}), b_u = upper(-δ² r̄ e^{-tΦ}).
    JumpFn Bl = [=](cplx k) { return lower(r1(k) * E(k) / (d(k) * d(k))); };
    JumpFn BuInv = [=](cplx k) { return upper(-r4(k) * d(k) * d(k) / E(k)); };
    JumpFn blInv = [=](cplx k) { return lower(R->r(k) * E(k) / (d(k) * d(k))); };
    JumpFn bu = [=](cplx k) { return upper(-R->rbar(k) * d(k) * d(k) / E(k)); };

    auto graded_ray = [](cplx base, double angle, int orient, std::string tag) {
        auto s = make_ray(base, expi(angle), 1.0, orient, std::move(tag));
        s.grade_start = orient > 0;
        s.grade_end = orient < 0;
        return s;
    };
    add(p, graded_ray(k0, kPi / 4, +1, "k0+ up"), Bl);
    add(p, graded_ray(k0, -kPi / 4, +1, "k0+ down"), BuInv);
    add(p, graded_ray(-k0, 3 * kPi / 4, -1, "-k0 up"), Bl);
    add(p, graded_ray(-k0, -3 * kPi / 4, -1, "-k0 down"), BuInv);

    const bool with_h = !refl.h_zero;
    // Crossing of the Σ rays with the diamond edges, at distance k0*c from 0.
    const double c = 2.0 / (1.0 + std::sqrt(3.0));
    auto edge = [&](cplx a, cplx b, JumpFn v, std::string tag, bool at_a, bool at_b) {
        if (!with_h) {
            auto s = make_segment(a, b, tag);
            s.grade_start = at_a;
            s.grade_end = at_b;
            add(p, s, v);
            return;
        }
        // Split where the Σ ray crosses; the crossing lies on the straight edge.
        cplx corner = std::abs(a.imag()) > 0 ? a : b;
        double sgn_up = corner.imag() > 0 ? 1.0 : -1.0;
        double ang = (a.real() + b.real() > 0) ? sgn_up * kPi / 3 : sgn_up * 2 * kPi / 3;
        cplx xp = k0 * c * expi(ang);
        auto s1 = make_segment(a, xp, tag);
        auto s2 = make_segment(xp, b, tag);
        s1.grade_start = at_a;
        s1.grade_end = s2.grade_start = true;
        s2.grade_end = at_b;
        add(p, s1, v);
        add(p, s2, v);
    };
    edge(cplx(0, -k0), k0, blInv, "diamond LR", false, true);
    edge(cplx(0, k0), k0, bu, "diamond UR", false, true);
    edge(-k0, cplx(0, -k0), blInv, "diamond LL", true, false);
    edge(-k0, cplx(0, k0), bu, "diamond UL", true, false);
    p.contour.intersections = {k0, -k0, cplx(0, k0), cplx(0, -k0)};
    if (with_h) add_h_rays(p, R, x, t, D, k0 * c, false);
    finish(p, refl, opt, true);
    return p;
}

RHProblem build_selfsimilar_problem(const ReflectionData& refl, double x, double t, const ConjugationDelta& delta,
                                    const BuildOptions& opt) {
    if (!(x > 0.0 && t > 0.0)) throw Error(ErrorKind::DomainViolation, "self-similar problem needs x, t > 0");
    if (delta.variant != DeltaVariant::SelfSimilar && !delta.trivial())
        throw Error(ErrorKind::Config, "self-similar problem needs the self-similar delta");
    const double k0 = std::sqrt(x / t / 12.0);
    RHProblem p;
    p.recovery = 2.0;
    auto R = std::make_shared<const ReflectionData>(refl);
    auto D = std::make_shared<const ConjugationDelta>(delta);
    auto E = [x, t](cplx k) { return std::exp(t_phase(k, x, t)); };
    auto r1 = [R](cplx k) { return R->r(k) / (1.0 - R->r(k) * R->rbar(k)); };
    auto r4 = [R](cplx k) { return R->rbar(k) / (1.0 - R->r(k) * R->rbar(k)); };

    // R1 = iδ^{-2} r1, R2 = -iδ² r4 off the axis; on Y3 the boundary values
    // R3 = iδ+^{-2} r1 and R4 = -iδ-² r4 enter.
    JumpFn y1 = [=](cplx k) {
        cplx d = D->delta(k);
        return lower(kI * r1(k) / (d * d) * E(k));
    };
    JumpFn y2 = [=](cplx k) {
        cplx d = D->delta(k);
        return upper(-kI * r4(k) * d * d / E(k));
    };
    JumpFn y3 = [=](cplx k) {
        double s = k.real();
        cplx dp = D->delta_boundary(s, +1), dm = D->delta_boundary(s, -1);
        cplx R3 = kI * r1(k) / (dp * dp), R4 = -kI * r4(k) * dm * dm;
        return Mat2(upper(-R4 / E(k)) * lower(R3 * E(k)));
    };
    auto ray = [](cplx base, double angle, int orient, std::string tag) {
        auto s = make_ray(base, expi(angle), 1.0, orient, std::move(tag));
        s.grade_start = s.grade_end = true;
        return s;
    };
    add(p, ray(k0, kPi / 6, +1, "Y1+"), y1);
    add(p, ray(-k0, 5 * kPi / 6, -1, "Y1-"), y1);
    add(p, ray(k0, -kPi / 6, -1, "Y2+"), y2);
    add(p, ray(-k0, -5 * kPi / 6, +1, "Y2-"), y2);
    const bool with_h = !refl.h_zero;
    if (with_h) {
        auto a = make_segment(-k0, 0.0, "Y3");
        auto b = make_segment(0.0, k0, "Y3");
        a.grade_start = a.grade_end = b.grade_start = b.grade_end = true;
        add(p, a, y3);
        add(p, b, y3);
        add_h_rays(p, R, x, t, D, 0.0, true);
    } else {
        auto s = make_segment(-k0, k0, "Y3");
        s.grade_start = s.grade_end = true;
        add(p, s, y3);
    }
    p.contour.intersections = {k0, -k0};
    finish(p, refl, opt, true);
    return p;
}

}  // namespace mkdvq
