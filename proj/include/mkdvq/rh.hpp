#pragma once

#include <memory>
#include <vector>

#include "mkdvq/contour.hpp"
#include "mkdvq/quadrature.hpp"

namespace mkdvq {

struct SolveOptions {
    int order = 16;               // Gauss nodes per panel
    double tol = 1e-10;           // post-hoc jump residual bound
    double resolve_tol = 1e-13;   // Legendre tail bound for panel refinement
    double max_panel = 0.5;       // initial panel length
    double min_panel = 1e-6;      // refinement floor
    double graded_split_min = 0.05;  // graded panels are bisected only above this length
    double drop_tol = 1e-17;      // panels with |w| below this everywhere are dropped
    bool adaptive = true;
    int max_nodes = 6000;
    bool check_residual = true;
    int direct_limit = 1000;      // above this many nodes GMRES replaces LU
    double gmres_tol = 1e-15;
};

struct PanelInfo {
    Panel pan;
    int segment = 0;
    int first_node = 0;
    /// Innermost panel at a graded endpoint; μ is not polynomial there, so
    /// residual probes skip it.
    bool singular_end = false;
};

/// Discrete solution of m+ = m- v: μ = m- at the collocation nodes.
class RHSolution {
public:
    /// m(k) off the contour.
    Mat2 m(cplx k) const;
    /// Boundary values at a point on segment `seg`; side = +1 (left) or -1.
    Mat2 m_boundary(cplx k, int seg, int side) const;
    /// -(1/2πi) ∫ μ w ds.
    Mat2 first_moment() const;
    /// Max jump residual |m+ - m- v| at `per_segment` probe points per segment,
    /// chosen between collocation nodes.
    double jump_residual(int per_segment = 4) const;
    /// Solves (I - C_w) ν = C_-(μ w') for a perturbed jump derivative w' given at the
    /// nodes, returning the derivative of the first moment.
    Mat2 first_moment_derivative(const std::vector<Mat2>& dw) const;

    std::size_t size() const { return nodes.size(); }

    std::vector<PanelInfo> panels;
    std::vector<cplx> nodes;
    std::vector<cplx> weights;  // complex ds weights
    std::vector<Mat2> w;        // v - I at nodes
    std::vector<Mat2> mu;
    std::vector<int> node_panel;
    const GaussRule* rule = nullptr;
    RHProblem problem;

private:
    friend RHSolution solve_rh(const RHProblem&, const SolveOptions&);
    std::shared_ptr<const void> lu_;  // collocation system (LU or GMRES)
    Mat2 cauchy(const std::vector<Mat2>& f, cplx k, int on_panel) const;
};

/// Mapped-Gauss collocation for μ = I + C_-(μ w).
RHSolution solve_rh(const RHProblem& prob, const SolveOptions& opt = {});

Mat2 first_moment(const RHSolution& sol);

/// u = recovery * M1(1,2); throws NonRealRecovery if |Im u| > tol.
double extract_u(const RHSolution& sol, double tol = 1e-8);

}  // namespace mkdvq
