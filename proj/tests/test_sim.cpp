#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "fixtures.hpp"
#include "mkdvq/errors.hpp"
#include "mkdvq/sim.hpp"

using namespace mkdvq;

TEST_CASE("boundary stencils are fourth order on exact fields") {
    auto field = [](double h, std::vector<double>& u) {
        u.resize(8);
        for (int j = 0; j < 8; ++j) u[j] = std::sin(1.3 * j * h + 0.4);
    };
    double e1_prev = 0, e2_prev = 0;
    for (double h : {0.1, 0.05}) {
        std::vector<double> u;
        field(h, u);
        double e1 = std::abs(trace_ux(u, h) - 1.3 * std::cos(0.4));
        double e2 = std::abs(trace_uxx(u, h) + 1.69 * std::sin(0.4));
        if (e1_prev > 0) {
            CHECK(std::log2(e1_prev / e1) > 3.7);
            CHECK(std::log2(e2_prev / e2) > 3.7);
        }
        e1_prev = e1;
        e2_prev = e2;
    }
}

TEST_CASE("manufactured solution converges at second order") {
    double e1 = fixtures::mms_error(0.2), e2 = fixtures::mms_error(0.1);
    CHECK(std::log2(e1 / e2) >= 1.8);
}

TEST_CASE("periodic harness conserves mass and keeps constant states") {
    CHECK(fixtures::periodic_mass_drift(1.0) <= 1e-6);
    SimConfig cfg;
    cfg.periodic = true;
    cfg.x_max = 10.0;
    cfg.t_end = 0.2;
    SimProblem p;
    p.u0 = [](double) { return 0.25; };
    auto st = simulate(p, cfg);
    for (double v : st.u) CHECK(std::abs(v - 0.25) < 1e-14);
}

TEST_CASE("zero data stays zero and the traces vanish") {
    SimConfig cfg;
    cfg.x_max = 10.0;
    cfg.t_end = 0.1;
    SimProblem p;
    p.u0 = [](double) { return 0.0; };
    auto st = simulate(p, cfg);
    for (double v : st.u) CHECK(v == 0.0);
    auto tr = extract_traces(st);
    CHECK(!tr.t.empty());
    for (double v : tr.g2) CHECK(v == 0.0);
}

TEST_CASE("step guards") {
    SimConfig cfg;
    cfg.x_max = 5.0;
    SimProblem p;
    p.u0 = [](double) { return 0.0; };
    auto st = init_state(p, cfg);
    CHECK_THROWS_AS(step(st, p, cfg, 2.0 * cfg.h * cfg.h * cfg.h), Error);
    p.u0 = [](double x) { return x > 2.0 && x < 2.2 ? NAN : 0.0; };
    st = init_state(p, cfg);
    CHECK_THROWS_AS(step(st, p, cfg, cfg.step_size()), Error);
}

TEST_CASE("traces become half-line data with a matching corner") {
    SimConfig cfg;
    cfg.x_max = 20.0;
    cfg.t_end = 0.5;
    SimProblem p;
    p.u0 = [](double x) { return 0.1 * std::exp(-(x - 4) * (x - 4)); };
    p.g0 = [](double t) { return 0.1 * t * t * std::exp(-t); };
    auto st = simulate(p, cfg);
    auto d = to_half_line_data(st, p);
    CHECK(d.t_max == doctest::Approx(st.trace_t.back()));
    CHECK(d.tail == TailModel::Kind::None);
    CHECK(std::abs(d.g0(0.3) - p.g0(0.3)) < 1e-6);
    auto snap = snapshot_data(st);
    CHECK(snap.u0(5.0) == doctest::Approx(st.u[50]).epsilon(1e-8));
    auto dir = std::filesystem::temp_directory_path() / "mkdvq_sim_test";
    std::filesystem::create_directories(dir);
    CHECK_NOTHROW(write_traces_csv(st, (dir / "traces.csv").string()));
    CHECK(std::filesystem::file_size(dir / "traces.csv") > 0);
}
