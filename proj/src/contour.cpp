#include "mkdvq/contour.hpp"

#include <cmath>
#include <sstream>

#include "json.hpp"

namespace mkdvq {

ContourSegment make_segment(cplx a, cplx b, std::string tag) {
    ContourSegment s;
    s.kind = SegmentKind::Segment;
    s.base = a;
    s.length = std::abs(b - a);
    s.dir = (b - a) / s.length;
    s.orient = +1;
    s.tag = std::move(tag);
    return s;
}

ContourSegment make_ray(cplx base, cplx dir, double length, int orient, std::string tag) {
    ContourSegment s;
    s.kind = SegmentKind::Ray;
    s.base = base;
    s.dir = dir / std::abs(dir);
    s.length = length;
    s.orient = orient;
    s.tag = std::move(tag);
    return s;
}

bool truncate_rays(RHProblem& prob, double thresh, double max_len) {
    bool ok = true;
    for (std::size_t j = 0; j < prob.contour.segments.size(); ++j) {
        auto& s = prob.contour.segments[j];
        if (s.kind != SegmentKind::Ray) continue;
        const auto& v = prob.jump.v[j];
        // Walk outward on a fine grid and keep the last point where |w| is not small.
        const int n = 4000;
        double last = 0.0;
        for (int i = 1; i <= n; ++i) {
            double u = max_len * i / n;
            double w = maxabs(v(s.base + s.dir * u) - Mat2::Identity());
            if (!std::isfinite(w) || w > thresh) last = u;
        }
        if (last >= max_len * (1.0 - 1.0 / n)) ok = false;
        s.length = std::max(last + max_len / n, 1e-3 * max_len);
    }
    return ok;
}

double jump_det_defect(const RHProblem& prob, int samples) {
    double worst = 0.0;
    for (std::size_t j = 0; j < prob.contour.segments.size(); ++j) {
        const auto& s = prob.contour.segments[j];
        for (int i = 0; i < samples; ++i) {
            double u = s.length * (i + 0.5) / samples;
            Mat2 v = prob.jump.v[j](s.base + s.dir * u);
            worst = std::max(worst, std::abs(v.determinant() - 1.0));
        }
    }
    return worst;
}

namespace {

bool near(cplx a, cplx b, double scale) { return std::abs(a - b) <= 1e-9 * (1.0 + scale); }

// Parameter of the crossing of segments p0-p1 and q0-q1, or false.
bool crossing(cplx p0, cplx p1, cplx q0, cplx q1, cplx& at) {
    cplx d1 = p1 - p0, d2 = q1 - q0;
    double den = d1.real() * d2.imag() - d1.imag() * d2.real();
    if (std::abs(den) < 1e-14 * std::abs(d1) * std::abs(d2)) return false;
    cplx w = q0 - p0;
    double a = (w.real() * d2.imag() - w.imag() * d2.real()) / den;
    double b = (w.real() * d1.imag() - w.imag() * d1.real()) / den;
    if (a < -1e-12 || a > 1 + 1e-12 || b < -1e-12 || b > 1 + 1e-12) return false;
    at = p0 + a * d1;
    return true;
}

}  // namespace

ContractReport check_contract(const RHProblem& prob, const Mat2& twist, int samples) {
    ContractReport rep;
    const auto& segs = prob.contour.segments;
    const std::size_t n = segs.size();
    std::vector<int> mirror(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& s = segs[i];
        double sc = std::abs(s.base) + s.length;
        if (!(s.length > 0.0)) rep.nonzero_lengths = false;
        cplx ms = -std::conj(s.end()), me = -std::conj(s.start());
        for (std::size_t j = 0; j < n; ++j)
            if (near(segs[j].start(), ms, sc) && near(segs[j].end(), me, sc)) mirror[i] = int(j);
        if (mirror[i] < 0) rep.mirror_symmetric = false;
        for (std::size_t j = i + 1; j < n; ++j) {
            cplx at;
            if (!crossing(s.start(), s.end(), segs[j].start(), segs[j].end(), at)) continue;
            bool at_end = near(at, s.start(), sc) || near(at, s.end(), sc);
            bool at_end2 = near(at, segs[j].start(), sc) || near(at, segs[j].end(), sc);
            if (!at_end || !at_end2) rep.endpoint_junctions = false;
        }
    }
    rep.det_defect = jump_det_defect(prob, samples);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& s = segs[i];
        if (s.kind == SegmentKind::Ray)
            rep.ray_end_defect = std::max(rep.ray_end_defect, maxabs(prob.jump.v[i](s.far()) - Mat2::Identity()));
        if (mirror[i] < 0) continue;
        for (int q = 0; q < samples; ++q) {
            cplx k = s.base + s.dir * (s.length * (q + 0.5) / samples);
            Mat2 d = prob.jump.v[i](k) - twist * prob.jump.v[std::size_t(mirror[i])](-std::conj(k)).conjugate() * twist.inverse();
            rep.jump_symmetry_defect = std::max(rep.jump_symmetry_defect, maxabs(d));
        }
    }
    return rep;
}

std::string contour_to_json(const Contour& c) {
    nlohmann::json j;
    j["segments"] = nlohmann::json::array();
    for (const auto& s : c.segments) {
        j["segments"].push_back({{"kind", s.kind == SegmentKind::Ray ? "ray" : "segment"},
                                 {"base", {s.base.real(), s.base.imag()}},
                                 {"dir", {s.dir.real(), s.dir.imag()}},
                                 {"len", s.length},
                                 {"orient", s.orient},
                                 {"tag", s.tag}});
    }
    j["intersections"] = nlohmann::json::array();
    for (auto p : c.intersections) j["intersections"].push_back({p.real(), p.imag()});
    return j.dump();
}

}  // namespace mkdvq
