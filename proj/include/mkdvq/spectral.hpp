#pragma once

#include <memory>
#include <string>
#include <vector>

#include "mkdvq/reflection.hpp"

namespace mkdvq {

/// Exponential model |f(s)| ≲ amp·e^{-rate·s} beyond the sampled range.
struct TailModel {
    enum class Kind { Exponential, None } kind = Kind::Exponential;
    double amp = 0.0;
    double rate = 0.0;
    /// ∫_L^∞ of the model.
    double integral_beyond(double L) const;
};

/// A real function on [0, ∞): closed form or cubic-spline samples on [0, end],
/// continued by zero beyond the samples. `tail` is fitted on the last decade.
class HalfLineFn {
public:
    HalfLineFn() = default;
    static HalfLineFn zero();
    static HalfLineFn closed_form(RealFn f, std::string label);
    static HalfLineFn samples(std::vector<double> grid, std::vector<double> values);

    double operator()(double s) const;
    bool is_zero() const { return zero_; }
    bool sampled() const { return !grid_.empty(); }
    double grid_end() const { return grid_.empty() ? 0.0 : grid_.back(); }
    const std::string& label() const { return label_; }

    /// Fits the exponential tail on the last decade of [0, end].
    TailModel fit_tail(double end) const;

private:
    RealFn f_;
    std::vector<double> grid_, values_;
    std::shared_ptr<const void> spline_;
    bool zero_ = true;
    std::string label_ = "zero";
};

struct HalfLineData {
    HalfLineFn u0, g0, g1, g2;
    double x_max = 20.0;
    double t_max = 20.0;
    /// Exponential: fitted tails must decay and set the truncation point.
    /// None: the data are taken as exactly zero beyond x_max / t_max.
    TailModel::Kind tail = TailModel::Kind::Exponential;

    double corner_mismatch() const { return std::abs(u0(0.0) - g0(0.0)); }
};

/// JSON: {"u0": {"kind": "expr"|"samples"|"zero", ...}, "g0": ..., "g1": ..., "g2": ...,
///        "x_max": float, "t_max": float, "tail": "exponential"|"none"}.
/// "expr" takes a named form: gaussian{amp,center,width}, sech{amp,center,width},
/// exponential{amp,rate}, pulse{amp,width,power} = amp (s/width)^power e^{-s/width},
/// constant{amp}.
HalfLineData half_line_data_from_json(const std::string& text);

/// X(0,k) from X' = ik[σ3,X] + UX, X → I at ∞. Only the columns that exist for
/// this k are filled: column 2 (b, a) for Im k <= 0, column 1 for Im k >= 0;
/// the other column is NaN.
Mat2 integrate_x_system(const HalfLineData& data, cplx k, double tol);

/// T(0,k) from T' = -4ik³[σ3,T] + V(0,t,k)T, T → I at ∞. Column 2 (B, A) for
/// Im k³ >= 0, column 1 for Im k³ <= 0.
Mat2 integrate_t_system(const HalfLineData& data, cplx k, double tol);

/// V(0,t,k) assembled from g0, g1, g2.
Mat2 lax_v(double g0, double g1, double g2, cplx k);

/// Evaluators for a, b, A, B, d computed on demand from the data.
class SpectralFunctions {
public:
    SpectralFunctions(HalfLineData data, double tol) : data_(std::move(data)), tol_(tol) {}
    cplx a(cplx k) const { return x_col2(k)(1); }
    cplx b(cplx k) const { return x_col2(k)(0); }
    cplx A(cplx k) const { return t_col2(k)(1); }
    cplx B(cplx k) const { return t_col2(k)(0); }
    /// d(k) = a(k) conj(A(k̄)) - b(k) conj(B(k̄)), Im k <= 0 and Im k³ <= 0.
    cplx d(cplx k) const;
    /// h(k) = -conj(B(k̄))/(a(k) d(k)) on D̄2.
    cplx h(cplx k) const;
    /// r(k) = conj(b(k̄))/a(k) + h(k) on ℝ.
    cplx r(double k) const;
    const HalfLineData& data() const { return data_; }
    double tol() const { return tol_; }

private:
    Eigen::Vector2cd x_col2(cplx k) const;
    Eigen::Vector2cd t_col2(cplx k) const;
    HalfLineData data_;
    double tol_;
};

/// Default evaluation grid: n Chebyshev-mapped points on [-K, K].
std::vector<double> chebyshev_grid(double K = 8.0, int n = 2048);

/// Samples r and h on the real grid and wraps them as ReflectionData (valid on
/// ℝ only; strip_radius = 0). Throws ZeroOfA / ZeroOfD / ReflectionTooLarge.
ReflectionData build_reflection(const SpectralFunctions& sf, const std::vector<double>& grid);

/// max |A(k)b(k) - B(k)a(k)| over samples in D̄1.
double global_relation_residual(const SpectralFunctions& sf, const std::vector<cplx>& samples);

/// For data truncated at t_max = T the exact relation is
/// A b - B a = e^{8ik³T} b_T(k), with b_T the b-function of the snapshot
/// u(·, T). Returns max |A b - B a - e^{8ik³T} b_T| over the samples.
double global_relation_residual_horizon(const SpectralFunctions& sf, const HalfLineData& snapshot,
                                        const std::vector<cplx>& samples);

/// True if k lies in the closure of D1 = {Im k < 0, Im k³ > 0} up to `slack`.
bool in_closure_D1(cplx k, double slack = 1e-12);

}  // namespace mkdvq
