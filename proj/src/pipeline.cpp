#include "mkdvq/pipeline.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "mkdvq/errors.hpp"

namespace mkdvq {

using nlohmann::json;

Route route_from_string(const std::string& s) {
    if (s == "sigma") return Route::Sigma;
    if (s == "similarity") return Route::Similarity;
    if (s == "selfsimilar") return Route::SelfSimilar;
    throw Error(ErrorKind::Config, "unknown route '" + s + "' (sigma, similarity, selfsimilar)");
}

const char* to_string(Route r) {
    switch (r) {
        case Route::Sigma: return "sigma";
        case Route::Similarity: return "similarity";
        case Route::SelfSimilar: return "selfsimilar";
    }
    return "?";
}

RHProblem build_route_problem(const ReflectionData& refl, double x, double t, Route route, const NumericOptions& opt) {
    switch (route) {
        case Route::Sigma: return build_sigma_problem(refl, x, t, opt.build);
        case Route::Similarity: {
            if (!(x > 0.0) || !(t > 0.0)) throw Error(ErrorKind::DomainViolation, "similarity route needs x, t > 0");
            double k0 = std::sqrt(x / t / 12.0);
            auto delta = build_delta(refl, DeltaVariant::Similarity, k0, opt.quad_tol);
            return build_similarity_problem(refl, x, t, delta, opt.build);
        }
        case Route::SelfSimilar: {
            auto delta = build_delta(refl, DeltaVariant::SelfSimilar, 0.0, opt.quad_tol);
            return build_selfsimilar_problem(refl, x, t, delta, opt.build);
        }
    }
    throw Error(ErrorKind::Config, "bad route");
}

NumericValue u_numeric(const ReflectionData& refl, double x, double t, Route route, const NumericOptions& opt) {
    RHSolution sol = solve_rh(build_route_problem(refl, x, t, route, opt), opt.solve);
    NumericValue v;
    v.u = extract_u(sol);
    v.nodes = sol.size();
    v.residual = sol.size() ? sol.jump_residual() : 0.0;
    return v;
}

std::string mu_nodes_csv(const RHSolution& sol) {
    std::ostringstream out;
    out.precision(17);
    out << "segment_id,node_re,node_im,mu11_re,mu11_im,mu12_re,mu12_im,mu21_re,mu21_im,mu22_re,mu22_im\n";
    for (std::size_t i = 0; i < sol.nodes.size(); ++i) {
        const Mat2& m = sol.mu[i];
        out << sol.panels[std::size_t(sol.node_panel[i])].segment << ',' << sol.nodes[i].real() << ','
            << sol.nodes[i].imag();
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) out << ',' << m(r, c).real() << ',' << m(r, c).imag();
        out << '\n';
    }
    return out.str();
}

int default_threads() {
    if (const char* env = std::getenv("MKDVQ_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 1;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& f) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first;
    std::mutex mu;
    auto work = [&] {
        for (std::size_t i; (i = next++) < n;) {
            try {
                f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!first) first = std::current_exception();
                next = n;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int k = 0; k < std::min<int>(threads, int(n)); ++k) pool.emplace_back(work);
    for (auto& th : pool) th.join();
    if (first) std::rethrow_exception(first);
}

namespace {

void finish_rate(RateReport& rep) {
    bool all_zero = true;
    for (double e : rep.err) all_zero = all_zero && e == 0.0;
    if (all_zero) {
        rep.trivial = true;
        rep.pass = true;
        rep.slope = 0.0;
        return;
    }
    std::vector<std::pair<double, double>> pairs;
    for (std::size_t i = 0; i < rep.scale.size(); ++i) pairs.emplace_back(rep.scale[i], rep.err[i]);
    rep.slope = fit_decay_exponent(pairs, rep.min_span);
}

}  // namespace

RateReport verify_similarity(const ReflectionData& refl, double k0, const std::vector<double>& taus,
                             const NumericOptions& opt, int threads, double min_span) {
    if (taus.empty()) throw Error(ErrorKind::Config, "empty tau ladder");
    if (!(k0 > 0.0)) throw Error(ErrorKind::Config, "k0 must be positive");
    RateReport rep;
    rep.kind = "similarity";
    rep.data_label = refl.label;
    rep.fixed = k0;
    rep.min_span = min_span;
    rep.criterion = "slope <= -0.2";
    const std::size_t n = taus.size();
    rep.scale = taus;
    rep.x.resize(n);
    rep.t.resize(n);
    rep.u_num.resize(n);
    rep.u_asym.resize(n);
    rep.err.resize(n);
    SectorOptions so;
    so.allow_outside = true;
    parallel_for(n, threads, [&](std::size_t i) {
        double t = taus[i] / (12.0 * k0 * k0 * k0), x = 12.0 * k0 * k0 * t;
        rep.x[i] = x;
        rep.t[i] = t;
        rep.u_num[i] = u_numeric(refl, x, t, Route::Similarity, opt).u;
        rep.u_asym[i] = u_similarity(refl, x, t, so);
        rep.err[i] = std::sqrt(t * k0) * std::abs(rep.u_num[i] - rep.u_asym[i]);
    });
    finish_rate(rep);
    if (!rep.trivial) rep.pass = rep.slope <= -0.2;
    return rep;
}

RateReport verify_selfsimilar(const ReflectionData& refl, double c, const std::vector<double>& ts,
                              const NumericOptions& opt, int threads, double min_span) {
    if (ts.empty()) throw Error(ErrorKind::Config, "empty t ladder");
    if (!(c > 0.0)) throw Error(ErrorKind::Config, "x t^{-1/3} must be positive");
    RateReport rep;
    rep.kind = "selfsimilar";
    rep.data_label = refl.label;
    rep.fixed = c;
    rep.min_span = min_span;
    rep.criterion = "|slope + 2/3| <= 0.15";
    const std::size_t n = ts.size();
    rep.scale = ts;
    rep.x.resize(n);
    rep.t.resize(n);
    rep.u_num.resize(n);
    rep.u_asym.resize(n);
    rep.err.resize(n);
    // y = -x/(3t)^{1/3} is the same for every rung, so one Painlevé value serves all.
    cplx s = kI * refl.r(cplx(0.0, 0.0));
    PainleveSolution pw;
    pw.stokes = stokes_from_s(s);
    pw.method = "rh";
    double y = -c / std::cbrt(3.0);
    double uP = s == 0.0 ? 0.0 : solve_painleve_rh(pw.stokes, y).u.real();
    pw.eval = [uP, y](double yy) {
        if (std::abs(yy - y) > 1e-12 * (1.0 + std::abs(y))) throw Error(ErrorKind::DomainViolation, "unexpected y");
        return uP;
    };
    SectorOptions so;
    so.allow_outside = true;
    parallel_for(n, threads, [&](std::size_t i) {
        double t = ts[i], x = c * std::cbrt(t);
        rep.x[i] = x;
        rep.t[i] = t;
        rep.u_num[i] = u_numeric(refl, x, t, Route::SelfSimilar, opt).u;
        rep.u_asym[i] = u_selfsimilar(refl, x, t, pw, so);
        rep.err[i] = std::abs(rep.u_num[i] - rep.u_asym[i]);
    });
    finish_rate(rep);
    if (!rep.trivial) rep.pass = std::abs(rep.slope + 2.0 / 3.0) <= 0.15;
    return rep;
}

std::string RateReport::to_json() const {
    json j;
    j["kind"] = kind;
    j["data"] = data_label;
    j[kind == "similarity" ? "k0" : "x_over_t13"] = fixed;
    j[kind == "similarity" ? "tau" : "t"] = scale;
    j["x"] = x;
    j["t_values"] = t;
    j["u_num"] = u_num;
    j["u_asym"] = u_asym;
    j["err"] = err;
    if (trivial)
        j["slope"] = nullptr;
    else
        j["slope"] = slope;
    j["min_span"] = min_span;
    j["criterion"] = criterion;
    j["pass"] = pass;
    return j.dump(2) + "\n";
}

std::string RateReport::to_csv() const {
    std::ostringstream out;
    out.precision(17);
    out << (kind == "similarity" ? "tau" : "t") << ",x,t,u_num,u_asym,err\n";
    for (std::size_t i = 0; i < scale.size(); ++i)
        out << scale[i] << ',' << x[i] << ',' << t[i] << ',' << u_num[i] << ',' << u_asym[i] << ',' << err[i] << '\n';
    return out.str();
}

namespace {

HalfLineData truncated(const SimState& st, const SimProblem& prob, double horizon) {
    SimState cut = st;
    std::size_t m = 0;
    while (m < st.trace_t.size() && st.trace_t[m] <= horizon + 1e-12) ++m;
    cut.trace_t.resize(m);
    cut.g0.resize(m);
    cut.g1.resize(m);
    cut.g2.resize(m);
    return to_half_line_data(cut, prob);
}

struct SampleData {
    cplx A, B, bT;
};

SampleData sample(const HalfLineData& d, const HalfLineData& snap, cplx k, double tol) {
    Eigen::Vector2cd tc = integrate_t_system(d, k, tol).col(1);
    return {tc(1), tc(0), integrate_x_system(snap, k, tol)(0, 1)};
}

}  // namespace

GlobalRelationReport verify_global_relation(const GlobalRelationConfig& cfg) {
    if (cfg.samples.empty()) throw Error(ErrorKind::Config, "global relation needs sample points");
    for (cplx k : cfg.samples)
        if (!in_closure_D1(k)) throw Error(ErrorKind::DomainViolation, "sample outside the closure of D1");
    GlobalRelationReport rep;
    SimConfig fine_cfg = cfg.sim;
    fine_cfg.h = cfg.sim.h / 2.0;
    SimState coarse = simulate(cfg.problem, cfg.sim);
    SimState fine = simulate(cfg.problem, fine_cfg);
    rep.h_coarse = coarse.h;
    rep.h_fine = fine.h;
    rep.T = fine.t;
    rep.samples = cfg.samples;
    rep.mass_end = mass(fine, false);
    HalfLineData dc = to_half_line_data(coarse, cfg.problem), df = to_half_line_data(fine, cfg.problem);
    HalfLineData sc = snapshot_data(coarse), sf = snapshot_data(fine);
    double worst_plain = 0.0, worst_horizon = 0.0;
    for (cplx k : cfg.samples) {
        Eigen::Vector2cd x = integrate_x_system(df, k, cfg.tol).col(1);
        cplx a = x(1), b = x(0);
        SampleData c = sample(dc, sc, k, cfg.tol), f = sample(df, sf, k, cfg.tol);
        cplx E = std::exp(8.0 * kI * k * k * k * rep.T);
        double plain = std::abs(f.A * b - f.B * a);
        double hor = std::abs(f.A * b - f.B * a - E * f.bT);
        rep.residual_horizon.push_back(hor);
        worst_horizon = std::max(worst_horizon, hor);
        if (std::abs(E) < cfg.horizon_cut) {
            rep.residual_plain.push_back(plain);
            worst_plain = std::max(worst_plain, plain);
            rep.horizon_weight_max = std::max(rep.horizon_weight_max, std::abs(E));
        } else {
            rep.residual_plain.push_back(std::numeric_limits<double>::quiet_NaN());
        }
        rep.sim_budget = std::max({rep.sim_budget, std::abs(f.A - c.A), std::abs(f.B - c.B), std::abs(E * (f.bT - c.bT))});
    }
    // Each residual combines three adaptive ODE solves run to tol.
    rep.quad_budget = 3.0 * cfg.tol;
    rep.residual_pass = worst_plain <= rep.bound() && worst_horizon <= rep.bound();
    rep.r0 = SpectralFunctions(df, cfg.tol).r(0.0).real();
    rep.r0_coarse = SpectralFunctions(dc, cfg.tol).r(0.0).real();
    rep.r0_pass = std::abs(rep.r0) <= rep.bound();
    for (double H : cfg.history_horizons) {
        if (H > rep.T) continue;
        rep.r0_history.emplace_back(H, SpectralFunctions(truncated(fine, cfg.problem, H), cfg.tol).r(0.0).real());
    }
    return rep;
}

std::string GlobalRelationReport::to_json() const {
    json j;
    j["kind"] = "global_relation";
    j["h_coarse"] = h_coarse;
    j["h_fine"] = h_fine;
    j["T"] = T;
    json s = json::array();
    for (std::size_t i = 0; i < samples.size(); ++i) {
        json e{{"k", {samples[i].real(), samples[i].imag()}}, {"residual_horizon", residual_horizon[i]}};
        if (std::isnan(residual_plain[i]))
            e["residual_plain"] = nullptr;
        else
            e["residual_plain"] = residual_plain[i];
        s.push_back(e);
    }
    j["samples"] = s;
    j["horizon_weight_max"] = horizon_weight_max;
    j["sim_budget"] = sim_budget;
    j["quad_budget"] = quad_budget;
    j["bound"] = bound();
    j["r0"] = r0;
    j["r0_coarse"] = r0_coarse;
    json hist = json::array();
    for (auto [H, r] : r0_history) hist.push_back({H, r});
    j["r0_history"] = hist;
    j["mass_end"] = mass_end;
    j["residual_pass"] = residual_pass;
    j["r0_pass"] = r0_pass;
    j["pass"] = pass();
    return j.dump(2) + "\n";
}

namespace {

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p);
    if (!out) throw Error(ErrorKind::Config, "cannot write " + p.string());
    out << text;
}

std::string fmt(double v) {
    std::ostringstream o;
    o.precision(4);
    o << v;
    return o.str();
}

}  // namespace

std::vector<std::string> emit_plots(const std::vector<std::string>& report_paths, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::vector<std::string> scripts;
    if (report_paths.empty()) return scripts;
    for (const auto& p : report_paths)
        if (!fs::exists(p)) throw Error(ErrorKind::MissingReport, p);
    fs::create_directories(out_dir);
    for (const auto& p : report_paths) {
        std::ifstream in(p);
        json j;
        try {
            j = json::parse(in);
        } catch (const std::exception& e) {
            throw Error(ErrorKind::MissingReport, p + " is not a JSON report: " + e.what());
        }
        std::string stem = fs::path(p).stem().string();
        fs::path csv = fs::path(out_dir) / (stem + "_plot.csv"), gp = fs::path(out_dir) / (stem + ".gp");
        std::string kind = j.value("kind", "");
        std::ostringstream data, script;
        data.precision(17);
        script << "set terminal pngcairo size 800,600\n"
               << "set output '" << stem << ".png'\n"
               << "set datafile separator ','\n"
               << "set grid\n";
        if (kind == "similarity" || kind == "selfsimilar") {
            const char* sx = kind == "similarity" ? "tau" : "t";
            auto sc = j.at(sx).get<std::vector<double>>();
            auto err = j.at("err").get<std::vector<double>>();
            data << sx << ",err\n";
            for (std::size_t i = 0; i < sc.size(); ++i) data << sc[i] << ',' << err[i] << '\n';
            std::string slope = j.at("slope").is_null() ? "n/a" : fmt(j.at("slope").get<double>());
            script << "set logscale xy\n"
                   << "set xlabel '" << sx << "'\nset ylabel 'error'\n"
                   << "set label 1 'fitted slope " << slope << "' at graph 0.6, graph 0.9\n"
                   << "plot '" << csv.filename().string() << "' every ::1 using 1:2 with linespoints title '" << kind
                   << "'\n";
        } else if (kind == "global_relation") {
            data << "horizon,r0\n";
            for (const auto& e : j.at("r0_history")) data << e[0].get<double>() << ',' << e[1].get<double>() << '\n';
            script << "set logscale x\nset xlabel 'horizon T'\nset ylabel 'r_T(0)'\n"
                   << "plot '" << csv.filename().string() << "' every ::1 using 1:2 with linespoints title 'r_T(0)'\n";
        } else {
            throw Error(ErrorKind::MissingReport, p + " has unknown report kind '" + kind + "'");
        }
        write_file(csv, data.str());
        write_file(gp, script.str());
        scripts.push_back(gp.string());
    }
    return scripts;
}

}  // namespace mkdvq
