#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "madelab/run.hpp"

using namespace madelab;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("madelab-test-" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("the six presets exist and round-trip") {
    const auto presets = run::list_presets();
    REQUIRE(presets.size() == 6);
    const std::vector<std::string> names = {"linear-theorem3", "coherent-theorem4",
                                            "bohm-1d",         "bohm-3d-spin",
                                            "double-slit",     "local-hj-demo"};
    for (std::size_t i = 0; i < names.size(); ++i) {
        CHECK(presets[i].name == names[i]);
        CHECK(!presets[i].description.empty());
        const auto cfg = run::preset(names[i]);
        CHECK(run::validate(cfg).empty());
    }
    CHECK_THROWS_AS(run::preset("no-such-preset"), ValidationError);
}

TEST_CASE("validation collects every violation at once") {
    run::RunConfig cfg = run::preset("bohm-1d");
    cfg.mass = -2.0;
    cfg.grid_points = 100;
    cfg.dt = 0.0;
    const auto bad = run::validate(cfg);
    CHECK(bad.size() == 3);

    nlohmann::json j;
    j["kind"] = "bohm-linear-1d";
    j["mass"] = -1.0;
    j["grid_points"] = 100;
    j["bogus_key"] = 1;
    try {
        run::config_from_json(j);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("mass") != std::string::npos);
        CHECK(msg.find("grid_points") != std::string::npos);
        CHECK(msg.find("bogus_key") != std::string::npos);
    }
}

TEST_CASE("config JSON round-trips") {
    const auto cfg = run::preset("double-slit");
    const auto j = run::config_to_json(cfg);
    const auto back = run::config_from_json(j);
    CHECK(back.kind == cfg.kind);
    CHECK(back.hbars == cfg.hbars);
    CHECK(back.sigma0 == cfg.sigma0);
    CHECK(back.seed == cfg.seed);
    CHECK(back.t_final == cfg.t_final);
}

TEST_CASE("local-hj-demo run produces the expected files and caustic time") {
    auto cfg = run::preset("local-hj-demo");
    const auto dir = fresh_dir("localhj");
    cfg.out_dir = dir.string();
    const auto result = run::execute(cfg);

    for (const char* f : {"report.json", "manifest.json", "local_action_free.csv",
                          "local_action_linear.csv", "local_action_harmonic.csv"}) {
        CAPTURE(f);
        CHECK(fs::exists(dir / f));
    }

    const auto rep = nlohmann::json::parse(slurp(dir / "report.json"));
    CHECK(rep["local_hj_residual_max"]["free"].get<double>() < 1e-11);
    CHECK(rep["local_hj_residual_max"]["linear"].get<double>() < 1e-6);
    CHECK(rep["local_hj_residual_max"]["harmonic"].get<double>() < 1e-6);
    const double caustic = rep["harmonic_caustic_time"].get<double>();
    CHECK(std::abs(caustic - 0.5 * std::numbers::pi) < 2.5e-3);

    const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest["counts"]["caustic_detected"].get<bool>());
    CHECK(manifest["config"]["kind"] == "local-hj-demo");
    CHECK(manifest.contains("tolerances"));
    CHECK(manifest.contains("wall_clock_seconds"));
}

TEST_CASE("bohm-1d run: deterministic data files for a fixed seed") {
    auto cfg = run::preset("bohm-1d");
    cfg.n_samples = 400; // keep the unit test quick; the full preset runs in acceptance
    const auto dir_a = fresh_dir("det-a");
    const auto dir_b = fresh_dir("det-b");

    cfg.out_dir = dir_a.string();
    run::execute(cfg);
    cfg.out_dir = dir_b.string();
    run::execute(cfg);

    for (const char* f : {"report.json", "trajectories.csv", "fields_t0.csv",
                          "fields_t4.csv"}) {
        CAPTURE(f);
        CHECK(slurp(dir_a / f) == slurp(dir_b / f));
    }

    // A different seed must change the trajectory data.
    auto other = cfg;
    other.seed = cfg.seed + 1;
    const auto dir_c = fresh_dir("det-c");
    other.out_dir = dir_c.string();
    run::execute(other);
    CHECK(slurp(dir_a / "trajectories.csv") != slurp(dir_c / "trajectories.csv"));

    const auto rep = nlohmann::json::parse(slurp(dir_a / "report.json"));
    CHECK(rep["endpoint_max_rel_error"].get<double>() < 1e-4);
}

TEST_CASE("execute refuses invalid configs") {
    auto cfg = run::preset("bohm-1d");
    cfg.t_final = -1.0;
    CHECK_THROWS_AS(run::execute(cfg), ValidationError);
}
