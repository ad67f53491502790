#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mkdvq/types.hpp"

namespace mkdvq {

enum class SegmentKind { Segment, Ray };

/// Oriented straight piece of a contour. Rays carry a finite truncation
/// length; `orient = -1` means the piece is traversed from its far end
/// back to `base`.
struct ContourSegment {
    SegmentKind kind = SegmentKind::Segment;
    cplx base{0.0};
    cplx dir{1.0};       // unit direction away from base
    double length = 1.0;  // truncation length for rays
    int orient = +1;
    /// Endpoints needing geometric refinement (junctions with non-smooth jumps).
    bool grade_start = false;
    bool grade_end = false;
    std::string tag;

    cplx far() const { return base + dir * length; }
    cplx start() const { return orient > 0 ? base : far(); }
    cplx end() const { return orient > 0 ? far() : base; }
    /// Unit tangent in the direction of traversal.
    cplx tangent() const { return orient > 0 ? dir : -dir; }
};

ContourSegment make_segment(cplx a, cplx b, std::string tag = {});
/// Ray from base in direction `dir` (normalized), truncated at `length`.
ContourSegment make_ray(cplx base, cplx dir, double length, int orient, std::string tag = {});

struct Contour {
    std::vector<ContourSegment> segments;
    std::vector<cplx> intersections;
};

using JumpFn = std::function<Mat2(cplx)>;

/// Per-segment jump evaluators, aligned with Contour::segments.
struct JumpSpec {
    std::vector<JumpFn> v;
    double analytic_radius = 0.0;
};

struct RHProblem {
    Contour contour;
    JumpSpec jump;
    /// u = Re(recovery * M1(1,2)); -2i for M's normalization, 2 after an
    /// e^{-iπ/4 σ3} conjugation.
    cplx recovery{0.0, -2.0};
};

/// Shortens every ray so that |v - I| stays below `thresh` beyond the cut,
/// scanning outward up to `max_len`. Returns false if some ray never decays.
bool truncate_rays(RHProblem& prob, double thresh, double max_len);

/// Max over sampled nodes of |det v - 1|.
double jump_det_defect(const RHProblem& prob, int samples_per_segment = 64);

/// Structural conditions on a (truncated) problem. Covers nonzero pieces,
/// pieces meeting only at endpoints, invariance of the segment set under
/// k -> -conj(k) with reversed orientation, det v = 1, v(k) = T conj(v(-conj k)) T⁻¹
/// (T = I for M itself, σ3 after an e^{-iπ/4 σ3} conjugation), and decay of v - I at ray cuts. It does not verify the analytic hypotheses
/// behind the long-time theorems.
struct ContractReport {
    bool nonzero_lengths = true;
    bool endpoint_junctions = true;
    bool mirror_symmetric = true;
    double det_defect = 0.0;
    double jump_symmetry_defect = 0.0;
    double ray_end_defect = 0.0;
    bool ok(double tol) const {
        return nonzero_lengths && endpoint_junctions && mirror_symmetric && det_defect <= tol &&
               jump_symmetry_defect <= tol && ray_end_defect <= tol;
    }
};

ContractReport check_contract(const RHProblem& prob, const Mat2& twist = Mat2::Identity(), int samples_per_segment = 16);

/// Debug serialization: {"segments":[{"kind":"ray","base":[re,im],...}]}.
std::string contour_to_json(const Contour& c);

}  // namespace mkdvq
