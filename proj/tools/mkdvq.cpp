// mkdvq <command> --config <path> [--out <dir>] [--threads N] [--tol X]
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mkdvq/errors.hpp"
#include "mkdvq/painleve.hpp"
#include "mkdvq/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mkdvq;

namespace {

struct Ctx {
    json cfg;
    fs::path out;
    int threads = 1;
    double tol = 0.0;  // 0: keep per-command defaults
};

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorKind::Config, msg); }

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) config_error("cannot read " + path);
    try {
        return json::parse(in);
    } catch (const std::exception& e) {
        config_error(path + ": " + e.what());
    }
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    if (!out) config_error("cannot write " + p.string());
    out << text;
    std::cout << p.string() << "\n";
}

double num(const json& j, const char* key, double dflt) {
    if (!j.contains(key)) return dflt;
    if (!j.at(key).is_number()) config_error(std::string(key) + " must be a number");
    return j.at(key).get<double>();
}

double positive(const json& j, const char* key, double dflt) {
    double v = num(j, key, dflt);
    if (!(v > 0.0)) config_error(std::string(key) + " must be positive");
    return v;
}

// A list of numbers, or {"from", "to", "n", "log"}.
std::vector<double> grid(const json& j, const char* what) {
    std::vector<double> g;
    if (j.is_array()) {
        for (const auto& v : j) {
            if (!v.is_number()) config_error(std::string(what) + ": grid entries must be numbers");
            g.push_back(v.get<double>());
        }
    } else if (j.is_object()) {
        double a = num(j, "from", 0.0), b = num(j, "to", 0.0);
        int n = j.value("n", 0);
        bool lg = j.value("log", false);
        if (n < 1) config_error(std::string(what) + ": n must be >= 1");
        if (lg && (!(a > 0.0) || !(b > 0.0))) config_error(std::string(what) + ": log grid needs positive ends");
        for (int i = 0; i < n; ++i) {
            double s = n == 1 ? 0.0 : double(i) / (n - 1);
            g.push_back(lg ? a * std::pow(b / a, s) : a + (b - a) * s);
        }
    } else {
        config_error(std::string(what) + ": expected a list or {from, to, n}");
    }
    if (g.empty()) config_error(std::string(what) + ": grid is empty");
    return g;
}

std::vector<double> grid_of(const json& cfg, const char* key) {
    if (!cfg.contains(key)) config_error(std::string("missing ") + key);
    return grid(cfg.at(key), key);
}

cplx complex_of(const json& j, const char* what) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    config_error(std::string(what) + ": expected a number or [re, im]");
}

HalfLineData half_line(const json& j) {
    if (j.is_string()) return half_line_data_from_json(load_json(j.get<std::string>()).dump());
    return half_line_data_from_json(j.dump());
}

std::vector<cplx> samples_of(const json& cfg) {
    std::vector<cplx> ks;
    if (cfg.contains("samples")) {
        for (const auto& e : cfg.at("samples")) ks.push_back(complex_of(e, "samples"));
    } else {
        for (double r : {0.3, 0.5, 0.8})
            for (double a : {-kPi / 2, -kPi / 2 - kPi / 12, -kPi / 2 + kPi / 12}) ks.push_back(std::polar(r, a));
    }
    if (ks.empty()) config_error("samples: empty list");
    return ks;
}

ReflectionData reflection(const json& cfg, double tol) {
    if (!cfg.contains("reflection")) config_error("missing reflection");
    const json& r = cfg.at("reflection");
    if (r.contains("spectral")) {
        HalfLineData d = half_line(r.at("spectral"));
        double K = positive(r, "K", 8.0);
        int n = r.value("n", 2048);
        if (n < 4) config_error("reflection.n must be >= 4");
        return build_reflection(SpectralFunctions(d, tol > 0 ? tol : 1e-10), chebyshev_grid(K, n));
    }
    std::string preset = r.value("preset", "");
    ReflectionData refl;
    if (preset == "zero")
        refl = zero_reflection();
    else if (preset == "odd")
        refl = odd_preset(num(r, "gamma", 1.0), positive(r, "kappa", 1.0));
    else if (preset == "even")
        refl = even_preset(num(r, "gamma", -0.4), positive(r, "kappa", 1.0));
    else
        config_error("reflection.preset must be zero, odd or even (or give reflection.spectral)");
    if (r.contains("h_eta")) refl = with_rational_h(refl, num(r, "h_eta", 0.0));
    return refl;
}

NumericOptions numeric_options(const Ctx& c) {
    NumericOptions o;
    if (c.tol > 0.0) o.solve.tol = c.tol;
    if (c.cfg.contains("solver")) {
        const json& s = c.cfg.at("solver");
        o.solve.order = s.value("order", o.solve.order);
        o.solve.max_nodes = s.value("max_nodes", o.solve.max_nodes);
        o.solve.tol = positive(s, "tol", o.solve.tol);
        o.build.trunc_tol = positive(s, "trunc_tol", o.build.trunc_tol);
        if (o.solve.order < 2) config_error("solver.order must be >= 2");
    }
    return o;
}

SimConfig sim_config(const json& cfg) {
    SimConfig s;
    if (!cfg.contains("sim")) return s;
    const json& j = cfg.at("sim");
    s.x_max = positive(j, "x_max", s.x_max);
    s.h = positive(j, "h", s.h);
    s.t_end = num(j, "t_end", s.t_end);
    s.cfl_fraction = positive(j, "cfl_fraction", s.cfl_fraction);
    s.dt = num(j, "dt", s.dt);
    s.sponge_fraction = num(j, "sponge_fraction", s.sponge_fraction);
    s.sponge_strength = num(j, "sponge_strength", s.sponge_strength);
    s.trace_dt = positive(j, "trace_dt", s.trace_dt);
    return s;
}

// u0, g0, g1 of a HalfLineData document become the simulator's inputs.
SimProblem sim_problem(const json& cfg) {
    json d = cfg;
    d.erase("sim");
    d.erase("mode");
    d.erase("samples");
    d.erase("history");
    d.erase("tol");
    HalfLineData hd = half_line_data_from_json(d.dump());
    if (hd.u0.is_zero() && !cfg.contains("u0")) config_error("simulation needs u0");
    SimProblem p;
    p.u0 = [f = hd.u0](double x) { return f(x); };
    p.g0 = [f = hd.g0](double t) { return f(t); };
    if (!hd.g1.is_zero()) p.g1 = [f = hd.g1](double t) { return f(t); };
    return p;
}

int cmd_spectral(const Ctx& c) {
    double tol = c.tol > 0 ? c.tol : num(c.cfg, "tol", 1e-10);
    if (!(tol > 0.0)) config_error("tol must be positive");
    if (!c.cfg.contains("data")) config_error("missing data");
    HalfLineData d = half_line(c.cfg.at("data"));
    double K = 8.0;
    int n = 2048;
    if (c.cfg.contains("grid")) {
        K = positive(c.cfg.at("grid"), "K", K);
        n = c.cfg.at("grid").value("n", n);
    }
    if (n < 4) config_error("grid.n must be >= 4");
    SpectralFunctions sf(d, tol);
    auto g = chebyshev_grid(K, n);
    std::vector<cplx> r(g.size()), h(g.size());
    parallel_for(g.size(), c.threads, [&](std::size_t i) {
        h[i] = sf.h(cplx(g[i], 0.0));
        r[i] = sf.r(g[i]);
    });
    std::ostringstream csv;
    csv.precision(17);
    csv << "k_re,k_im,r_re,r_im,h_re,h_im\n";
    double sup = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        csv << g[i] << ",0," << r[i].real() << ',' << r[i].imag() << ',' << h[i].real() << ',' << h[i].imag() << '\n';
        sup = std::max(sup, std::abs(r[i]));
    }
    if (sup >= 1.0) throw Error(ErrorKind::ReflectionTooLarge, "sup |r| = " + std::to_string(sup));
    write_text(c.out / "reflection.csv", csv.str());
    json s{{"sup_r", sup}, {"r0", {sf.r(0.0).real(), sf.r(0.0).imag()}}, {"corner_mismatch", d.corner_mismatch()}};
    auto ks = samples_of(c.cfg);
    s["global_relation_residual"] = global_relation_residual(sf, ks);
    write_text(c.out / "spectral.json", s.dump(2) + "\n");
    return 0;
}

int cmd_rhsolve(const Ctx& c) {
    ReflectionData refl = reflection(c.cfg, c.tol);
    Route route = route_from_string(c.cfg.value("route", "sigma"));
    auto xs = grid_of(c.cfg, "x"), ts = grid_of(c.cfg, "t");
    NumericOptions o = numeric_options(c);
    std::size_t n = xs.size() * ts.size();
    std::vector<NumericValue> vals(n);
    parallel_for(n, c.threads, [&](std::size_t i) { vals[i] = u_numeric(refl, xs[i / ts.size()], ts[i % ts.size()], route, o); });
    std::ostringstream csv;
    csv.precision(17);
    csv << "x,t,u,residual,nodes\n";
    for (std::size_t i = 0; i < n; ++i)
        csv << xs[i / ts.size()] << ',' << ts[i % ts.size()] << ',' << vals[i].u << ',' << vals[i].residual << ','
            << vals[i].nodes << '\n';
    write_text(c.out / "rhsolve.csv", csv.str());
    if (c.cfg.value("dump", false)) {
        RHProblem p = build_route_problem(refl, xs[0], ts[0], route, o);
        write_text(c.out / "contour.json", contour_to_json(p.contour) + "\n");
        write_text(c.out / "mu_nodes.csv", mu_nodes_csv(solve_rh(p, o.solve)));
    }
    return 0;
}

int cmd_asymptote(const Ctx& c) {
    ReflectionData refl = reflection(c.cfg, c.tol);
    auto xs = grid_of(c.cfg, "x"), ts = grid_of(c.cfg, "t");
    SectorOptions so;
    if (c.cfg.contains("sector")) {
        so.tau_min = positive(c.cfg.at("sector"), "tau_min", so.tau_min);
        so.N = positive(c.cfg.at("sector"), "N", so.N);
    }
    so.allow_outside = c.cfg.value("allow_outside", false);
    bool compare = c.cfg.value("compare", false);
    NumericOptions o = numeric_options(c);
    std::size_t n = xs.size() * ts.size();
    std::vector<SimilarityParams> ps(n);
    std::vector<double> ua(n), un(n, NAN);
    parallel_for(n, c.threads, [&](std::size_t i) {
        double x = xs[i / ts.size()], t = ts[i % ts.size()];
        ps[i] = similarity_params(refl, x, t);
        ua[i] = u_similarity(refl, x, t, so);
        if (compare) un[i] = u_numeric(refl, x, t, Route::Similarity, o).u;
    });
    std::ostringstream csv;
    csv.precision(17);
    csv << "x,t,zeta,k0,tau,nu,phi,u_asymptotic" << (compare ? ",u_numeric,err" : "") << "\n";
    std::vector<std::pair<double, double>> pairs;
    for (std::size_t i = 0; i < n; ++i) {
        double x = xs[i / ts.size()], t = ts[i % ts.size()];
        const auto& p = ps[i];
        csv << x << ',' << t << ',' << p.zeta << ',' << p.k0 << ',' << p.tau << ',' << p.nu << ',' << p.phi << ','
            << ua[i];
        if (compare) {
            double e = std::sqrt(t * p.k0) * std::abs(un[i] - ua[i]);
            csv << ',' << un[i] << ',' << e;
            pairs.emplace_back(p.tau, e);
        }
        csv << '\n';
    }
    write_text(c.out / "asymptote.csv", csv.str());
    json s{{"points", n}};
    if (compare) {
        bool zero = true;
        for (auto& pr : pairs) zero = zero && pr.second == 0.0;
        if (zero)
            s["slope"] = nullptr;
        else
            s["slope"] = fit_decay_exponent(pairs, num(c.cfg, "min_span", 10.0));
    }
    write_text(c.out / "asymptote.json", s.dump(2) + "\n");
    return 0;
}

int cmd_painleve(const Ctx& c) {
    if (!c.cfg.contains("s")) config_error("missing s");
    cplx s = complex_of(c.cfg.at("s"), "s");
    if (std::abs(s.real()) > 0.0 || !(std::abs(s) < 1.0)) config_error("s must be purely imaginary with |s| < 1");
    auto ys = grid_of(c.cfg, "y");
    std::string method = c.cfg.value("method", "both");
    if (method != "rh" && method != "ode" && method != "both") config_error("method must be rh, ode or both");
    StokesTriple st = stokes_from_s(s);
    PainleveOptions po;
    if (c.tol > 0) po.tol = c.tol;
    std::vector<PainleveSolution> sols;
    if (method != "ode") {
        PainleveSolution p;
        p.stokes = st;
        p.method = "rh";
        p.y = ys;
        p.u.resize(ys.size());
        p.err.resize(ys.size());
        std::vector<double> im(ys.size());
        parallel_for(ys.size(), c.threads, [&](std::size_t i) {
            auto v = solve_painleve_rh(st, ys[i], po);
            p.u[i] = v.u.real();
            im[i] = v.u.imag();
            p.err[i] = v.err_est;
        });
        p.du = im;  // carries Im u^P for the table below
        sols.push_back(p);
    }
    if (method != "rh") {
        auto p = ode_oracle(st, ys, num(c.cfg, "y_match", 8.0), c.tol > 0 ? c.tol : 1e-13, po);
        p.du.assign(ys.size(), 0.0);
        sols.push_back(p);
    }
    std::ostringstream csv;
    csv.precision(17);
    csv << "y,uP_re,uP_im,err_est,method\n";
    for (const auto& p : sols)
        for (std::size_t i = 0; i < ys.size(); ++i)
            csv << ys[i] << ',' << p.u[i] << ',' << p.du[i] << ',' << p.err[i] << ',' << p.method << '\n';
    write_text(c.out / "painleve.csv", csv.str());
    return 0;
}

int cmd_simulate(const Ctx& c) {
    SimProblem p = sim_problem(c.cfg);
    SimConfig sc = sim_config(c.cfg);
    SimState st = simulate(p, sc);
    write_traces_csv(st, (c.out / "traces.csv").string());
    std::cout << (c.out / "traces.csv").string() << "\n";
    write_snapshot_csv(st, (c.out / "snapshot.csv").string());
    std::cout << (c.out / "snapshot.csv").string() << "\n";
    json s{{"h", st.h}, {"dt", st.dt}, {"t", st.t}, {"mass", mass(st, false)}, {"scheme", st.scheme},
           {"trace_samples", st.trace_t.size()}};
    write_text(c.out / "simulate.json", s.dump(2) + "\n");
    return 0;
}

int cmd_verify(const Ctx& c) {
    std::string mode = c.cfg.value("mode", "");
    std::vector<std::string> reports;
    bool pass = true;
    if (mode == "similarity" || mode == "selfsimilar") {
        ReflectionData refl = reflection(c.cfg, c.tol);
        NumericOptions o = numeric_options(c);
        double span = positive(c.cfg, "min_span", 10.0);
        RateReport rep = mode == "similarity"
                             ? verify_similarity(refl, positive(c.cfg, "k0", 1.0), grid_of(c.cfg, "tau"), o, c.threads, span)
                             : verify_selfsimilar(refl, positive(c.cfg, "x_over_t13", 1.0), grid_of(c.cfg, "t"), o,
                                                  c.threads, span);
        fs::path p = c.out / (mode + "_report.json");
        write_text(p, rep.to_json());
        write_text(c.out / (mode + "_report.csv"), rep.to_csv());
        reports.push_back(p.string());
        pass = rep.pass;
    } else if (mode == "global_relation") {
        GlobalRelationConfig g;
        g.problem = sim_problem(c.cfg);
        g.sim = sim_config(c.cfg);
        g.tol = c.tol > 0 ? c.tol : positive(c.cfg, "tol", 1e-10);
        g.samples = samples_of(c.cfg);
        if (c.cfg.contains("history")) g.history_horizons = grid_of(c.cfg, "history");
        auto rep = verify_global_relation(g);
        fs::path p = c.out / "global_relation_report.json";
        write_text(p, rep.to_json());
        reports.push_back(p.string());
        pass = rep.pass();
    } else if (mode == "plots") {
        for (const auto& r : c.cfg.value("reports", json::array())) reports.push_back(r.get<std::string>());
    } else {
        config_error("verify.mode must be similarity, selfsimilar, global_relation or plots");
    }
    for (const auto& s : emit_plots(reports, c.out.string())) std::cout << s << "\n";
    std::cout << (pass ? "PASS" : "FAIL") << "\n";
    return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mKdV quarter-plane long-time asymptotics toolkit"};
    app.require_subcommand(1);
    std::string config, out = "out";
    int threads = 0;
    double tol = 0.0;
    const char* names[] = {"spectral", "rhsolve", "asymptote", "painleve", "simulate", "verify"};
    for (const char* n : names) {
        auto* sub = app.add_subcommand(n);
        sub->add_option("--config", config, "JSON job configuration")->required();
        sub->add_option("--out", out, "output directory");
        sub->add_option("--threads", threads, "worker threads (default MKDVQ_THREADS or 1)");
        sub->add_option("--tol", tol, "tolerance override");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    std::string cmd = app.get_subcommands().front()->get_name();
    try {
        if (threads < 0) config_error("--threads must be >= 0");
        if (tol < 0.0) config_error("--tol must be positive");
        Ctx c;
        c.cfg = load_json(config);
        if (!c.cfg.is_object()) config_error("configuration must be a JSON object");
        c.out = out;
        c.threads = threads > 0 ? threads : default_threads();
        c.tol = tol;
        fs::create_directories(c.out);
        if (cmd == "spectral") return cmd_spectral(c);
        if (cmd == "rhsolve") return cmd_rhsolve(c);
        if (cmd == "asymptote") return cmd_asymptote(c);
        if (cmd == "painleve") return cmd_painleve(c);
        if (cmd == "simulate") return cmd_simulate(c);
        return cmd_verify(c);
    } catch (const Error& e) {
        std::cerr << "mkdvq " << cmd << ": " << e.what() << "\n";
        return e.kind() == ErrorKind::Config ? 2 : 1;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "mkdvq " << cmd << ": ConfigError: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "mkdvq " << cmd << ": " << e.what() << "\n";
        return 1;
    }
}
