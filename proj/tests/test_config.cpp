#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ohe/config.hpp"
#include "ohe/scenario.hpp"

using namespace ohe;

TEST_CASE("bundled configs parse and validate") {
    for (const auto& name : config::bundled_names()) {
        auto cfg = config::load_config(name);
        CHECK(cfg.name == name);
        CHECK(!cfg.states.empty());
        CHECK(cfg.t_end > 0.0);
    }
    auto de = config::load_config("default_engine");
    CHECK(de.params.g == doctest::Approx(1.0 / 3.0));
    CHECK(de.params.gamma_m == doctest::Approx(1.0 / 3000.0));
    auto r = baths::engine_rates(de.params);
    CHECK(r.gain());

    auto sb = config::load_config("single_bath");
    CHECK(!baths::engine_rates(sb.params).gain());
    CHECK(sb.states.size() == 3);

    auto f2 = config::load_config("fig2_states");
    CHECK(f2.states.size() == 4);
}

TEST_CASE("config errors carry key paths") {
    CHECK_THROWS_WITH_AS(config::parse_config("engine.omega_o = nope\n"),
                         doctest::Contains("engine.omega_o"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(config::parse_config("bogus_key = 1\n"),
                         doctest::Contains("missing key"), std::invalid_argument);

    // unknown keys are rejected
    std::string text = config::bundled_text("default_engine");
    text += "\nextra.unknown_key = 3\n";
    CHECK_THROWS_WITH_AS(config::parse_config(text), doctest::Contains("unknown keys"),
                         std::invalid_argument);

    // duplicate keys are rejected
    std::string dup = config::bundled_text("default_engine");
    dup += "\nengine.g = 0.5\n";
    CHECK_THROWS_WITH_AS(config::parse_config(dup), doctest::Contains("duplicate"),
                         std::invalid_argument);
}

TEST_CASE("time grid") {
    auto cfg = config::load_config("default_engine");
    auto t = cfg.time_grid();
    CHECK(t.size() == cfg.samples);
    CHECK(t.front() == 0.0);
    CHECK(t.back() == doctest::Approx(cfg.t_end));
}

TEST_CASE("deterministic artifacts for a fixed config") {
    namespace fs = std::filesystem;
    auto cfg = config::load_config("default_engine");
    cfg.t_end = 30.0;
    cfg.samples = 31;

    auto read_all = [](const std::string& dir) {
        std::ostringstream all;
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(dir)) files.push_back(e.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            std::ifstream in(f);
            all << f.filename().string() << "\n" << in.rdbuf();
        }
        return all.str();
    };

    const auto art1 = scenario::run_scenario(cfg);
    scenario::write_artifacts(art1, "/tmp/ohe_test_out1");
    const auto art2 = scenario::run_scenario(cfg);
    scenario::write_artifacts(art2, "/tmp/ohe_test_out2");
    CHECK(read_all("/tmp/ohe_test_out1") == read_all("/tmp/ohe_test_out2"));

    // CSV schema header is the pinned one
    std::ifstream in("/tmp/ohe_test_out1/analytic_coherent.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "t,E_M,S_M,W_max,W_unitary,T_M,J_h,J_c,P_max,eta,spohn_slack");
    // full round-trip precision floats
    std::string row;
    std::getline(in, row);
    CHECK(row.find(',') != std::string::npos);
    fs::remove_all("/tmp/ohe_test_out1");
    fs::remove_all("/tmp/ohe_test_out2");
}

TEST_CASE("analytic pipeline rejects states without a nonnegative P function") {
    auto cfg = config::load_config("default_engine");
    cfg.states[0].spec = hilbert::StateSpec::fock(1);
    cfg.states[0].label = "fock";
    CHECK_THROWS_WITH_AS(scenario::run_scenario(cfg), doctest::Contains("oracle"),
                         std::invalid_argument);
}

TEST_CASE("sweep over a scalar key") {
    auto cfg = config::load_config("default_engine");
    cfg.t_end = 30.0;
    cfg.samples = 31;
    cfg.raw["time.t_end"] = "30.0";
    cfg.raw["time.samples"] = "31";

    CHECK_THROWS_WITH_AS(scenario::sweep(cfg, "pipeline", {1.0}),
                         doctest::Contains("not a sweepable"), std::invalid_argument);

    auto res = scenario::sweep(cfg, "bath.hot.temperature", {4.0, 5.0, 6.0});
    REQUIRE(res.rows.size() == 3);
    // gamma is non-increasing in the hot temperature with the stop-band fixed
    CHECK(res.rows[1].gamma <= res.rows[0].gamma + 1e-15);
    CHECK(res.rows[2].gamma <= res.rows[1].gamma + 1e-15);
    CHECK(res.rows[0].value == doctest::Approx(4.0));
    CHECK(res.rows[0].n_o > 0.0);

    const auto files = scenario::write_sweep(res, "/tmp/ohe_test_sweep");
    std::ifstream in(files.front());
    std::string header;
    std::getline(in, header);
    CHECK(header == "value,gamma,d,n_O,peak_eta,beyond_carnot_duration");
    std::filesystem::remove_all("/tmp/ohe_test_sweep");
}

TEST_CASE("relative deviation helper") {
    CHECK(scenario::relative_deviation({1.0, 2.0}, {1.0, 2.0}) == 0.0);
    CHECK(scenario::relative_deviation({0.0, 2.0}, {0.1, 2.0}) == doctest::Approx(0.05));
    CHECK_THROWS_AS(scenario::relative_deviation({1.0}, {1.0, 2.0}), std::invalid_argument);
}
