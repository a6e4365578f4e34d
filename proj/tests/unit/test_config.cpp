#include <doctest.h>

#include "sfde/app.hpp"
#include "sfde/config.hpp"
#include "sfde/csv.hpp"
#include "sfde/error.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace sfde;

namespace {

std::string config_error(std::string_view text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.field() + " | " + e.what();
    }
    return "no error";
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("sfde_test_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("paper preset with the first benchmark triple") {
    const auto cfg = parse_config("preset = paper\nalpha = 0.4\ns = 0.3\nhurst = 0.2\n");
    CHECK(cfg.model.alpha == 0.4);
    CHECK(cfg.model.s == 0.3);
    CHECK(cfg.model.hurst == 0.2);
    CHECK(cfg.model.T == 0.5);
    CHECK(cfg.model.N == 20);
    CHECK(cfg.model.L == 1024);
    CHECK(cfg.paths == 1000);
    CHECK(cfg.f == FieldSource::paper);
    CHECK(cfg.g == FieldSource::paper);
    CHECK(cfg.h == TimeProfile::paper);

    // preset expands first, wherever it is written
    const auto late = parse_config("L = 64\n# comment\n  preset = paper   # trailing\n");
    CHECK(late.model.L == 64);
    CHECK(late.model.N == 20);
}

TEST_CASE("range violations name the field") {
    CHECK(config_error("hurst = 1.0").starts_with("hurst | line 1: hurst:"));
    CHECK(config_error("\nalpha = 0").starts_with("alpha | line 2:"));
    CHECK(config_error("s = -0.1").starts_with("s |"));
    CHECK(config_error("T = 0").starts_with("T |"));
    CHECK(config_error("L = 0").starts_with("L |"));
    CHECK(config_error("N = 0").starts_with("N |"));
    CHECK(config_error("delta = 1").starts_with("delta |"));
    CHECK(config_error("h = constant\nh_value = 0").starts_with("h_value | line 2:"));
    CHECK(config_error("h = constant\nh_value = -2").starts_with("h_value |"));
    CHECK(config_error("N = 3\nf = coeffs\nf_coeffs = 1, 2").starts_with("f_coeffs |"));
    CHECK(config_error("g_coeffs = 1").starts_with("g_coeffs |"));
    CHECK(config_error("paths = 0").starts_with("paths |"));
}

TEST_CASE("malformed lines report their line number") {
    CHECK(config_error("alpha = 0.4\nthis is not a pair\n").find("line 2:") != std::string::npos);
    CHECK(config_error("alpha = abc").starts_with("alpha | line 1: alpha: expected a number"));
    CHECK(config_error("L = 1.5").starts_with("L |"));
    CHECK(config_error("L = -3").starts_with("L |"));
    CHECK(config_error("x = 1") == "x | line 1: unknown key 'x'");
    CHECK(config_error("seed = 1\nseed = 2").find("repeated") != std::string::npos);
    CHECK(config_error("alpha =").starts_with("alpha |"));
    CHECK(config_error("= 3").find("missing key") != std::string::npos);
    CHECK(config_error("preset = huge").starts_with("preset |"));
    CHECK(config_error("method = fast").starts_with("method |"));
}

TEST_CASE("serialize round trip") {
    const std::string text =
        "preset = paper\nalpha = 0.123456789012345678\nhurst = 0.7\nseed = 18446744073709551615\n"
        "N = 3\nf = coeffs\nf_coeffs = 0.1, -2.5e-7, 3\ng = zero\nh = constant\nh_value = 2.5\n"
        "method = cholesky\ndenominator = montecarlo\ndelta = 0\nthreads = 4\ntriples = single\nout = results/a\n";
    const auto cfg = parse_config(text);
    CHECK(cfg.seed == 18446744073709551615ull);
    CHECK(cfg.f_coeffs == std::vector<double>{0.1, -2.5e-7, 3.0});
    const auto again = parse_config(serialize(cfg));
    CHECK(again == cfg);
    CHECK(serialize(again) == serialize(cfg));
    CHECK(parse_config(serialize(RunConfig{})) == RunConfig{});
    CHECK(parse_config("") == RunConfig{});
}

TEST_CASE("benchmark triples expand to six runs") {
    const auto cfg = parse_config("preset = paper\ntriples = paper\n");
    const auto runs = model_runs(cfg);
    REQUIRE(runs.size() == 6);
    CHECK(runs[1].alpha == 0.6);
    CHECK(runs[1].s == 0.7);
    CHECK(runs[1].hurst == 0.2);
    CHECK(runs[5].L == 1024);
}

TEST_CASE("csv number format") {
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(0.5) == "0.5");
    CHECK(format_number(-3.0) == "-3");
    CHECK(format_number(1.0 / 3.0) == "0.33333333333333331");
    CHECK(format_number(1e-300) == "1e-300");
    CsvTable t{"a", "b"};
    t.row().add(1.5).add(std::uint64_t{2});
    t.row().add("x").add(0.0);
    CHECK(t.text() == "a,b\n1.5,2\nx,0");
    CHECK_THROWS_AS(t.add(1.0), InputError);
}

TEST_CASE("run_subcommand writes deterministic files") {
    auto cfg = parse_config("preset = paper\nL = 64\nN = 4\npaths = 40\nseed = 7\n");
    const auto a = scratch_dir("det_a");
    const auto b = scratch_dir("det_b");
    for (std::string_view sub : {"fbm", "direct", "ensemble"}) {
        cfg.out = a.string();
        const auto files = run_subcommand(sub, cfg);
        cfg.out = b.string();
        CHECK(run_subcommand(sub, cfg) == files);
        for (const auto& f : files) {
            CAPTURE(f);
            CHECK(slurp(a / f) == slurp(b / f));
            CHECK(!slurp(a / f).empty());
        }
    }
    const auto fbm = slurp(a / "fbm.csv");
    CHECK(fbm.starts_with("t,w\n0,0\n"));
    CHECK(std::count(fbm.begin(), fbm.end(), '\n') == 66);
    CHECK(slurp(a / "ensemble_mean.csv").starts_with("k,mean,stderr\n"));
    CHECK(slurp(a / "direct.csv").starts_with("n,t,k,u\n"));

    cfg.seed = 8;
    cfg.out = b.string();
    run_subcommand("fbm", cfg);
    CHECK(slurp(a / "fbm.csv") != slurp(b / "fbm.csv"));
    std::filesystem::remove_all(a);
    std::filesystem::remove_all(b);
}

TEST_CASE("dispatch maps failures onto exit codes") {
    auto cfg = parse_config("L = 16\nN = 2\npaths = 1\n");
    cfg.out = scratch_dir("codes").string();
    std::ostringstream err;
    CHECK(dispatch("ensemble", cfg, err) == kExitConfig);
    const auto line = err.str();
    CHECK(line.starts_with("error: config: paths:"));
    CHECK(std::count(line.begin(), line.end(), '\n') == 1);

    cfg.paths = 20;
    cfg.g = FieldSource::zero;
    err.str("");
    CHECK(dispatch("reconstruct", cfg, err) == kExitInversion);
    CHECK(err.str().starts_with("error: inversion:"));

    cfg.g = FieldSource::paper;
    cfg.model.alpha = 0.2;
    cfg.model.hurst = 0.2;
    err.str("");
    CHECK(dispatch("phi", cfg, err) == kExitDomain);

    err.str("");
    CHECK(dispatch("plot", cfg, err) == kExitInput);
    std::filesystem::remove_all(cfg.out);
}
