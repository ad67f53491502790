#include "mkdvq/rh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>

#include <Eigen/LU>
#include <unsupported/Eigen/IterativeSolvers>

#include "mkdvq/errors.hpp"

namespace mkdvq {

namespace {

using LU = Eigen::PartialPivLU<Eigen::MatrixXcd>;

// Collocation matrix with either a dense factorization or restarted GMRES.
struct LinearSystem {
    Eigen::MatrixXcd A;
    std::unique_ptr<LU> lu;
    double tol = 1e-14;

    Eigen::MatrixXcd solve(const Eigen::MatrixXcd& rhs) const {
        if (lu) return lu->solve(rhs);
        Eigen::GMRES<Eigen::MatrixXcd, Eigen::IdentityPreconditioner> gm(A);
        gm.set_restart(300);
        gm.setTolerance(tol);
        gm.setMaxIterations(3000);
        Eigen::MatrixXcd X(rhs.rows(), rhs.cols());
        for (int c = 0; c < rhs.cols(); ++c) {
            X.col(c) = gm.solve(rhs.col(c));
            if (gm.info() != Eigen::Success)
                throw Error(ErrorKind::SingularSystem, "GMRES did not converge; the operator is close to singular");
        }
        return X;
    }
};
const cplx kInv2PiI = 1.0 / (2.0 * kPi * kI);

double panel_tail(const GaussRule& g, const std::vector<Mat2>& wv) {
    double tail = 0.0, scale = 1.0;
    std::vector<cplx> f(g.p);
    for (int e = 0; e < 4; ++e) {
        for (int i = 0; i < g.p; ++i) {
            f[i] = wv[i](e / 2, e % 2);
            scale = std::max(scale, std::abs(f[i]));
        }
        auto c = legendre_coeffs(g, f.data());
        tail = std::max(tail, std::abs(c[g.p - 1]) + std::abs(c[g.p - 2]));
    }
    return tail / scale;
}

std::vector<Mat2> sample_w(const GaussRule& g, const Panel& pan, const JumpFn& v) {
    std::vector<Mat2> out(g.p);
    for (int i = 0; i < g.p; ++i) out[i] = v(pan.node(g, i)) - Mat2::Identity();
    return out;
}

double max_entry(const std::vector<Mat2>& wv) {
    double m = 0.0;
    for (const auto& x : wv) m = std::max(m, maxabs(x));
    return m;
}

}  // namespace

RHSolution solve_rh(const RHProblem& prob, const SolveOptions& opt) {
    const GaussRule& g = gauss_rule(opt.order);
    RHSolution sol;
    sol.rule = &g;
    sol.problem = prob;

    // Panelization: uniform start, dyadic grading toward flagged endpoints,
    // then bisection until the Legendre tail of w is below resolve_tol.
    for (std::size_t sj = 0; sj < prob.contour.segments.size(); ++sj) {
        const auto& seg = prob.contour.segments[sj];
        const auto& v = prob.jump.v[sj];
        cplx A = seg.start(), B = seg.end();
        double L = seg.length;
        double floor_len = std::min(opt.min_panel, 0.25 * L);
        int n0 = std::max(1, static_cast<int>(std::ceil(L / opt.max_panel)));
        std::vector<Panel> initial;
        for (int i = 0; i < n0; ++i)
            initial.push_back({A + (B - A) * (double(i) / n0), A + (B - A) * (double(i + 1) / n0)});
        // Dyadic panels toward a graded endpoint are final: the endpoint
        // singularity never passes the tail test but is resolved geometrically.
        std::vector<Panel> graded_front, graded_back;
        if (seg.grade_start) {
            Panel first = initial.front();
            initial.erase(initial.begin());
            while (first.length() > floor_len) {
                cplx m = first.mid();
                graded_front.push_back({m, first.b});
                first.b = m;
            }
            graded_front.push_back(first);
            std::reverse(graded_front.begin(), graded_front.end());
        }
        if (seg.grade_end && !initial.empty()) {
            Panel last = initial.back();
            initial.pop_back();
            while (last.length() > floor_len) {
                cplx m = last.mid();
                graded_back.push_back({last.a, m});
                last.a = m;
            }
            graded_back.push_back(last);
        } else if (seg.grade_end && !graded_front.empty()) {
            // Single initial panel graded at both ends: regrade the outermost piece.
            Panel last = graded_front.back();
            graded_front.pop_back();
            while (last.length() > floor_len) {
                cplx m = last.mid();
                graded_back.push_back({last.a, m});
                last.a = m;
            }
            graded_back.push_back(last);
        }
        std::vector<Panel> done;
        std::deque<std::pair<Panel, bool>> work;
        for (auto& p : graded_front) work.push_back({p, true});
        for (auto& p : initial) work.push_back({p, false});
        for (auto& p : graded_back) work.push_back({p, true});
        while (!work.empty()) {
            auto [p, graded] = work.front();
            work.pop_front();
            auto wv = sample_w(g, p, v);
            double mag = max_entry(wv);
            if (!std::isfinite(mag)) throw Error(ErrorKind::StripTooNarrow, "non-finite jump on " + seg.tag);
            double min_len = graded ? std::max(2.0 * floor_len, opt.graded_split_min) : 2.0 * floor_len;
            bool split = opt.adaptive && p.length() > min_len && mag > opt.drop_tol &&
                         panel_tail(g, wv) > opt.resolve_tol;
            if (split) {
                cplx m = p.mid();
                work.push_front({{m, p.b}, graded});
                work.push_front({{p.a, m}, graded});
                if (done.size() + work.size() > static_cast<std::size_t>(opt.max_nodes / g.p + 1))
                    throw Error(ErrorKind::QuadratureFailure, "panel budget exceeded on segment " + seg.tag);
                continue;
            }
            if (mag <= opt.drop_tol) continue;
            done.push_back(p);
        }
        for (auto& p : done) {
            PanelInfo info{p, static_cast<int>(sj), static_cast<int>(sol.nodes.size())};
            info.singular_end = (seg.grade_start && p.a == A) || (seg.grade_end && p.b == B);
            auto wv = sample_w(g, p, v);
            for (int i = 0; i < g.p; ++i) {
                sol.nodes.push_back(p.node(g, i));
                sol.weights.push_back(p.weight(g, i));
                sol.w.push_back(wv[i]);
                sol.node_panel.push_back(static_cast<int>(sol.panels.size()));
            }
            sol.panels.push_back(info);
        }
    }
    const int N = static_cast<int>(sol.nodes.size());
    if (N > opt.max_nodes) throw Error(ErrorKind::QuadratureFailure, "too many collocation nodes");
    sol.mu.assign(N, Mat2::Identity());
    if (N == 0) return sol;

    Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(2 * N, 2 * N);
    std::vector<cplx> W(g.p);
    for (int j = 0; j < N; ++j) {
        const cplx k = sol.nodes[j];
        for (std::size_t pi = 0; pi < sol.panels.size(); ++pi) {
            const auto& P = sol.panels[pi];
            bool own = static_cast<int>(pi) == sol.node_panel[j];
            cauchy_weights(g, P.pan, k, own, W.data());
            for (int q = 0; q < g.p; ++q) {
                int i = P.first_node + q;
                cplx K = W[q] * kInv2PiI;
                if (own && i == j) K -= 0.5;
                const Mat2& wi = sol.w[i];
                for (int c = 0; c < 2; ++c)
                    for (int b = 0; b < 2; ++b) A(2 * j + c, 2 * i + b) -= K * wi(b, c);
            }
        }
    }
    auto sys = std::make_shared<LinearSystem>();
    sys->tol = opt.gmres_tol;
    if (N <= opt.direct_limit) {
        sys->lu = std::make_unique<LU>(A);
        double rc = sys->lu->rcond();
        if (!(rc > 1e-14)) throw Error(ErrorKind::SingularSystem, "collocation matrix rcond = " + std::to_string(rc));
    } else {
        sys->A = std::move(A);
    }
    Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(2 * N, 2);
    for (int j = 0; j < N; ++j) {
        rhs(2 * j, 0) = 1.0;
        rhs(2 * j + 1, 1) = 1.0;
    }
    Eigen::MatrixXcd X = sys->solve(rhs);
    for (int j = 0; j < N; ++j)
        for (int a = 0; a < 2; ++a)
            for (int c = 0; c < 2; ++c) sol.mu[j](a, c) = X(2 * j + c, a);
    sol.lu_ = sys;
    if (opt.check_residual) {
        double res = sol.jump_residual(2);
        if (!(res <= opt.tol)) {
            char buf[96];
            std::snprintf(buf, sizeof buf, "jump residual %.3e exceeds %.3e", res, opt.tol);
            throw Error(ErrorKind::ResidualTooLarge, buf);
        }
    }
    return sol;
}

Mat2 RHSolution::cauchy(const std::vector<Mat2>& f, cplx k, int on_panel) const {
    Mat2 acc = Mat2::Zero();
    std::vector<cplx> W(rule->p);
    for (std::size_t pi = 0; pi < panels.size(); ++pi) {
        const auto& P = panels[pi];
        cauchy_weights(*rule, P.pan, k, static_cast<int>(pi) == on_panel, W.data());
        for (int q = 0; q < rule->p; ++q) acc += W[q] * f[P.first_node + q];
    }
    return acc * kInv2PiI;
}

Mat2 RHSolution::m(cplx k) const {
    std::vector<Mat2> U(size());
    for (std::size_t i = 0; i < size(); ++i) U[i] = mu[i] * w[i];
    return Mat2::Identity() + cauchy(U, k, -1);
}

Mat2 RHSolution::m_boundary(cplx k, int seg, int side) const {
    std::vector<Mat2> U(size());
    for (std::size_t i = 0; i < size(); ++i) U[i] = mu[i] * w[i];
    int own = -1;
    for (std::size_t pi = 0; pi < panels.size(); ++pi) {
        if (panels[pi].segment != seg) continue;
        cplx xi = panels[pi].pan.local(k);
        if (std::abs(xi.imag()) < 1e-9 && std::abs(xi.real()) <= 1.0) {
            own = static_cast<int>(pi);
            break;
        }
    }
    Mat2 val = Mat2::Identity() + cauchy(U, k, own);
    if (own >= 0) {
        std::vector<cplx> L(rule->p);
        interp_weights(*rule, panels[own].pan.local(k), L.data());
        Mat2 Uk = Mat2::Zero();
        for (int q = 0; q < rule->p; ++q) Uk += L[q] * U[panels[own].first_node + q];
        val += 0.5 * double(side) * Uk;
    }
    return val;
}

Mat2 RHSolution::first_moment() const {
    Mat2 acc = Mat2::Zero();
    for (std::size_t i = 0; i < size(); ++i) acc += weights[i] * (mu[i] * w[i]);
    return -acc * kInv2PiI;
}

double RHSolution::jump_residual(int per_segment) const {
    double worst = 0.0;
    for (std::size_t pi = 0; pi < panels.size(); ++pi) {
        if (pi % std::max<std::size_t>(1, panels.size() / (per_segment * problem.contour.segments.size() + 1)) != 0) continue;
        const auto& P = panels[pi];
        if (P.singular_end) continue;
        // Probe between the two central nodes.
        int c = rule->p / 2;
        double xi = 0.5 * (rule->x[c - 1] + rule->x[c]);
        cplx k = P.pan.mid() + P.pan.half() * xi;
        Mat2 v = problem.jump.v[P.segment](k);
        Mat2 mp = m_boundary(k, P.segment, +1), mm = m_boundary(k, P.segment, -1);
        worst = std::max(worst, maxabs(mp - mm * v) / (1.0 + maxabs(v)));
    }
    return worst;
}

Mat2 RHSolution::first_moment_derivative(const std::vector<Mat2>& dw) const {
    const int N = static_cast<int>(size());
    if (N == 0) return Mat2::Zero();
    std::vector<Mat2> F(N);
    for (int i = 0; i < N; ++i) F[i] = mu[i] * dw[i];
    Eigen::MatrixXcd rhs(2 * N, 2);
    std::vector<cplx> L(rule->p);
    for (int j = 0; j < N; ++j) {
        Mat2 cm = cauchy(F, nodes[j], node_panel[j]) - 0.5 * F[j];
        for (int a = 0; a < 2; ++a)
            for (int c = 0; c < 2; ++c) rhs(2 * j + c, a) = cm(a, c);
    }
    auto sys = std::static_pointer_cast<const LinearSystem>(lu_);
    Eigen::MatrixXcd X = sys->solve(rhs);
    Mat2 acc = Mat2::Zero();
    for (int j = 0; j < N; ++j) {
        Mat2 nu;
        for (int a = 0; a < 2; ++a)
            for (int c = 0; c < 2; ++c) nu(a, c) = X(2 * j + c, a);
        acc += weights[j] * (nu * w[j] + mu[j] * dw[j]);
    }
    return -acc * kInv2PiI;
}

Mat2 first_moment(const RHSolution& sol) { return sol.first_moment(); }

double extract_u(const RHSolution& sol, double tol) {
    cplx u = sol.problem.recovery * sol.first_moment()(0, 1);
    if (std::abs(u.imag()) > tol)
        throw Error(ErrorKind::NonRealRecovery, "Im u = " + std::to_string(u.imag()));
    return u.real();
}

}  // namespace mkdvq
