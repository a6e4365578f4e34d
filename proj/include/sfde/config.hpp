#pragma once

#include "sfde/fbm.hpp"
#include "sfde/model.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace sfde {

enum class FieldSource { paper, zero, coeffs };
enum class TimeProfile { paper, constant };  // paper: h(t) = t + 1
enum class Denominator { quadrature, montecarlo };
enum class TripleSet { single, paper };

/// Everything a run depends on. Output files are a pure function of this and the subcommand.
struct RunConfig {
    std::string preset = "none";
    ModelParams model{0.5, 0.5, 0.5, 1.0, 256, 10};
    std::size_t paths = 500;
    std::uint64_t seed = 1;
    FieldSource f = FieldSource::paper;
    FieldSource g = FieldSource::paper;
    std::vector<double> f_coeffs;
    std::vector<double> g_coeffs;
    TimeProfile h = TimeProfile::paper;
    double h_value = 1.0;
    double h_floor = 1e-8;
    std::size_t x_points = 201;
    FbmMethod method = FbmMethod::circulant;
    Denominator denominator = Denominator::quadrature;
    double delta = 1e-4;
    double phi_tol = 1e-6;
    unsigned threads = 1;
    TripleSet triples = TripleSet::single;
    std::string out = ".";

    bool operator==(const RunConfig&) const = default;
};

/// Flat `key = value` lines, `#` starts a comment. `preset` is applied before the
/// other keys regardless of where it appears. Malformed lines, unknown or repeated
/// keys and out-of-range values throw ConfigError naming the key (and the line).
RunConfig parse_config(std::string_view text);

/// Every key written explicitly, doubles with 17 significant digits, so that
/// parse_config(serialize(c)) == c.
std::string serialize(const RunConfig& cfg);

/// Sets one key as if it appeared in a config file (used for command-line overrides).
/// Does not validate; call validate afterwards.
void apply_override(RunConfig& cfg, std::string_view key, std::string_view value);

/// Range checks shared by parse_config and the CLI overrides.
void validate(const RunConfig& cfg);

/// Model parameters of each run: the configured triple, or the six benchmark triples.
std::vector<ModelParams> model_runs(const RunConfig& cfg);

/// f, g and h on the model grid; h below h_floor throws ConfigError naming `h`.
SourceSpec make_source(const RunConfig& cfg, const ModelParams& p);

std::string_view to_string(FieldSource v);
std::string_view to_string(TimeProfile v);
std::string_view to_string(Denominator v);
std::string_view to_string(TripleSet v);

}  // namespace sfde
