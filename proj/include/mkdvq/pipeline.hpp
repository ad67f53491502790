#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "mkdvq/asymptotics.hpp"
#include "mkdvq/builders.hpp"
#include "mkdvq/rh.hpp"
#include "mkdvq/sim.hpp"

namespace mkdvq {

enum class Route { Sigma, Similarity, SelfSimilar };
Route route_from_string(const std::string& s);
const char* to_string(Route r);

struct NumericOptions {
    SolveOptions solve;
    BuildOptions build;
    double quad_tol = 1e-14;
};

/// Builds the problem for `route` at (x, t); the conjugation factor is built
/// internally (k0 from x/t for the similarity route).
RHProblem build_route_problem(const ReflectionData& refl, double x, double t, Route route,
                              const NumericOptions& opt = {});

struct NumericValue {
    double u = 0.0;
    double residual = 0.0;
    std::size_t nodes = 0;
};

/// u(x, t) from a collocation solve on the route's contour.
NumericValue u_numeric(const ReflectionData& refl, double x, double t, Route route, const NumericOptions& opt = {});

/// CSV dump of the collocation unknowns: segment_id, node_re, node_im, mu11_re, mu11_im, ...
std::string mu_nodes_csv(const RHSolution& sol);

/// MKDVQ_THREADS if set and positive, else 1.
int default_threads();
/// Runs f(0..n-1) on up to `threads` workers. Results must be stored by index;
/// the first exception is rethrown after all workers stop.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& f);

/// Error-versus-scale study against one of the asymptotic formulas.
struct RateReport {
    std::string kind;  // "similarity" or "selfsimilar"
    std::string data_label;
    double fixed = 0.0;  // k0 (similarity) or x t^{-1/3} (self-similar)
    std::vector<double> scale, x, t, u_num, u_asym, err;
    double slope = 0.0;
    bool trivial = false;  // all errors vanish (r ≡ 0)
    double min_span = 10.0;
    bool pass = false;
    std::string criterion;

    std::string to_json() const;
    std::string to_csv() const;
};

/// ζ = 12k0², t = τ/(12k0³); err = √(t k0)|u_num - u_similarity|.
/// FAIL if the fitted slope exceeds -0.2.
RateReport verify_similarity(const ReflectionData& refl, double k0, const std::vector<double>& taus,
                             const NumericOptions& opt = {}, int threads = 1, double min_span = 10.0);

/// x = c t^{1/3}; err = |u_num - u_selfsimilar|. PASS if the slope is -2/3 ± 0.15.
RateReport verify_selfsimilar(const ReflectionData& refl, double c, const std::vector<double>& ts,
                              const NumericOptions& opt = {}, int threads = 1, double min_span = 10.0);

/// Simulated quarter-plane data checked against the global relation.
struct GlobalRelationReport {
    double h_coarse = 0.0, h_fine = 0.0, T = 0.0;
    std::vector<cplx> samples;
    std::vector<double> residual_plain, residual_horizon;  // fine run, per sample
    double horizon_weight_max = 0.0;  // max |e^{8ik³T}| over the plain samples
    double sim_budget = 0.0;           // Richardson estimate of the error in A, B, b_T
    double quad_budget = 0.0;
    double r0 = 0.0, r0_coarse = 0.0;
    std::vector<std::pair<double, double>> r0_history;  // (horizon, r_T(0))
    double mass_end = 0.0;
    bool residual_pass = false, r0_pass = false;

    double bound() const { return 10.0 * (sim_budget + quad_budget); }
    bool pass() const { return residual_pass && r0_pass; }
    std::string to_json() const;
};

struct GlobalRelationConfig {
    SimProblem problem;
    SimConfig sim;  // coarse run; the fine run halves h
    double tol = 1e-10;
    /// Interior D1 points. The plain residual is taken where |e^{8ik³T}| is
    /// below `horizon_cut`; the horizon-corrected one everywhere.
    std::vector<cplx> samples;
    double horizon_cut = 1e-8;
    std::vector<double> history_horizons;
};

GlobalRelationReport verify_global_relation(const GlobalRelationConfig& cfg);

/// Writes one gnuplot script (and a CSV) per JSON report into out_dir. Returns
/// the script paths. Throws MissingReport if a path does not exist.
std::vector<std::string> emit_plots(const std::vector<std::string>& report_paths, const std::string& out_dir);

}  // namespace mkdvq
