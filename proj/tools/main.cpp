#include "sfde/app.hpp"
#include "sfde/config.hpp"
#include "sfde/error.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw sfde::IoError("cannot read config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulation and source reconstruction for a stochastic time-space fractional diffusion equation"};
    app.set_version_flag("--version", sfde::kVersion);
    app.require_subcommand(1, 1);

    std::string config_path;
    std::optional<std::string> out, seed, paths, method, denominator;
    app.add_option("--config", config_path, "flat key = value config file");
    app.add_option("--out", out, "output directory (overrides `out`)");
    app.add_option("--seed", seed, "64-bit seed (overrides `seed`)");
    app.add_option("--paths", paths, "Monte Carlo path count M (overrides `paths`)");
    app.add_option("--method", method, "fBm sampler: circulant or cholesky");
    app.add_option("--denominator", denominator, "Phi source: quadrature or montecarlo");
    app.fallthrough();

    const char* help[] = {
        "one fBm path -> fbm.csv (t,w)",
        "one trajectory of every mode -> direct.csv (n,t,k,u)",
        "moments of u_k(T) -> ensemble_mean.csv, ensemble_cov.csv",
        "denominator matrix -> phi.csv (k,l,phi,regime)",
        "recover f and |g| -> reconstruct.csv, reconstruct_diagnostics.csv",
        "decay of Phi_kk and v1_k(T) -> instability.csv",
    };
    std::size_t i = 0;
    for (auto name : sfde::subcommands()) app.add_subcommand(std::string(name), help[i++]);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: usage: " << e.what() << '\n';
        return sfde::kExitUsage;
    }
    const std::string subcommand = app.get_subcommands().front()->get_name();

    sfde::RunConfig cfg;
    try {
        if (!config_path.empty()) cfg = sfde::parse_config(read_file(config_path));
        const std::pair<const char*, const std::optional<std::string>*> overrides[] = {
            {"out", &out}, {"seed", &seed}, {"paths", &paths}, {"method", &method}, {"denominator", &denominator}};
        for (const auto& [key, value] : overrides)
            if (*value) sfde::apply_override(cfg, key, **value);
        sfde::validate(cfg);
    } catch (...) {
        const auto f = sfde::classify(std::current_exception());
        std::cerr << "error: " << f.category << ": " << f.message << '\n';
        return f.code;
    }
    return sfde::dispatch(subcommand, cfg, std::cerr);
}
