#include "sfde/app.hpp"

#include "sfde/cov_kernel.hpp"
#include "sfde/csv.hpp"
#include "sfde/ensemble.hpp"
#include "sfde/error.hpp"
#include "sfde/random.hpp"
#include "sfde/reconstruction.hpp"
#include "sfde/time_stepping.hpp"

#include <charconv>
#include <filesystem>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

namespace sfde {

namespace {

namespace fs = std::filesystem;

// Run seed for Monte Carlo denominators, disjoint from the ensemble's path indices.
constexpr std::uint64_t kPhiStream = ~std::uint64_t{0};

std::string shortest(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

std::string with_tag(std::string_view base, const std::string& tag) {
    return std::string(base) + (tag.empty() ? "" : "_" + tag) + ".csv";
}

/// key=value lines in insertion order.
class Meta {
public:
    void set(const std::string& key, const std::string& value) { lines_ += key + "=" + value + "\n"; }
    void set(const std::string& key, double value) { set(key, format_number(value)); }
    void set(const std::string& key, std::size_t value) { set(key, std::to_string(value)); }
    const std::string& text() const { return lines_; }

private:
    std::string lines_;
};

struct Run {
    const RunConfig& cfg;
    ModelParams p;
    std::string tag;
    std::string prefix;  // "run<i>." in the sidecar
    Meta& meta;
    std::vector<std::string>& files;

    fs::path file(std::string_view base) {
        auto name = with_tag(base, tag);
        files.push_back(name);
        return fs::path(cfg.out) / name;
    }

    FbmGenerator generator() {
        FbmGenerator gen(p.hurst, p.T, p.L, cfg.method);
        meta.set(prefix + "method_requested", std::string(to_string(gen.requested_method())));
        meta.set(prefix + "method_used", std::string(to_string(gen.method())));
        for (const auto& w : gen.warnings()) meta.set(prefix + "warning", w);
        return gen;
    }

    void need_ensemble() const {
        if (cfg.paths < 2)
            throw ConfigError("paths", "paths: the sample covariance needs at least 2 paths, got " +
                                           std::to_string(cfg.paths));
    }

    EnsembleStats ensemble(const SourceSpec& src) {
        need_ensemble();
        generator();
        return run_ensemble(p, src, cfg.paths, cfg.seed, {cfg.method, cfg.threads});
    }

    PhiMatrix denominators() {
        if (cfg.denominator == Denominator::montecarlo) {
            need_ensemble();
            std::vector<std::size_t> modes(p.N);
            for (std::size_t k = 1; k <= p.N; ++k) modes[k - 1] = k;
            const auto run_seed = derive_stream_seed(cfg.seed, kPhiStream);
            const auto mc = phi_mc_modes(p, modes, cfg.paths, run_seed, cfg.method, cfg.threads);
            PhiMatrix phi;
            phi.N = p.N;
            phi.values = mc.estimate;
            phi.regime = phi_regime(p.hurst);
            meta.set(prefix + "phi_source", "montecarlo");
            meta.set(prefix + "phi_paths", cfg.paths);
            return phi;
        }
        PhiOptions opts;
        opts.rel_tol = cfg.phi_tol;
        opts.threads = cfg.threads;
        auto phi = phi_matrix(p, opts);
        meta.set(prefix + "phi_source", "quadrature");
        meta.set(prefix + "phi_cells", phi.cells);
        meta.set(prefix + "phi_rel_change", phi.rel_change);
        meta.set(prefix + "phi_converged", std::string(phi.converged ? "true" : "false"));
        if (!phi.converged)
            meta.set(prefix + "warning", "Phi did not reach phi_tol at " + std::to_string(phi.cells) + " cells");
        return phi;
    }
};

double exact_value(FieldSource src, const std::vector<double>& coeffs, double (*fn)(double), double x) {
    switch (src) {
        case FieldSource::paper: return fn(x);
        case FieldSource::zero: return 0.0;
        case FieldSource::coeffs: {
            double sum = 0.0;
            for (std::size_t k = 1; k <= coeffs.size(); ++k) sum += coeffs[k - 1] * sine_basis(k, x);
            return sum;
        }
    }
    return 0.0;
}

void cmd_fbm(Run& r) {
    const auto path = r.generator().sample(r.cfg.seed, 0);
    CsvTable t{"t", "w"};
    for (std::size_t n = 0; n <= path.steps(); ++n) t.row().add(r.p.time(n)).add(path.values[n]);
    t.save(r.file("fbm"));
}

void cmd_direct(Run& r) {
    const auto src = make_source(r.cfg, r.p);
    const auto path = r.generator().sample(r.cfg.seed, 0);
    const auto u = step_field(r.p, src, path);
    CsvTable t{"n", "t", "k", "u"};
    for (std::size_t n = 0; n <= r.p.L; ++n)
        for (std::size_t k = 1; k <= r.p.N; ++k)
            t.row().add(std::uint64_t{n}).add(r.p.time(n)).add(std::uint64_t{k}).add(u.at(k, n));
    t.save(r.file("direct"));
}

void cmd_ensemble(Run& r) {
    const auto stats = r.ensemble(make_source(r.cfg, r.p));
    CsvTable mean{"k", "mean", "stderr"};
    for (std::size_t k = 1; k <= r.p.N; ++k)
        mean.row().add(std::uint64_t{k}).add(stats.mean[k - 1]).add(stats.stderr_mean[k - 1]);
    mean.save(r.file("ensemble_mean"));
    CsvTable cov{"k", "l", "cov"};
    for (std::size_t k = 1; k <= r.p.N; ++k)
        for (std::size_t l = 1; l <= r.p.N; ++l) cov.row().add(std::uint64_t{k}).add(std::uint64_t{l}).add(stats.cov_at(k, l));
    cov.save(r.file("ensemble_cov"));
}

void cmd_phi(Run& r) {
    const auto phi = r.denominators();
    const auto regime = to_string(phi.regime);
    CsvTable t{"k", "l", "phi", "regime"};
    for (std::size_t k = 1; k <= r.p.N; ++k)
        for (std::size_t l = 1; l <= r.p.N; ++l)
            t.row().add(std::uint64_t{k}).add(std::uint64_t{l}).add(phi.at(k, l)).add(regime);
    t.save(r.file("phi"));
}

void cmd_reconstruct(Run& r) {
    const auto src = make_source(r.cfg, r.p);
    const auto stats = r.ensemble(src);
    const auto phi = r.denominators();
    const auto x = uniform_grid(r.cfg.x_points);
    const auto rec = reconstruct(r.p, stats, phi, src.h, x, r.cfg.delta);

    std::vector<double> f_exact(x.size()), g_exact(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        f_exact[j] = exact_value(r.cfg.f, r.cfg.f_coeffs, benchmark::f, x[j]);
        g_exact[j] = std::abs(exact_value(r.cfg.g, r.cfg.g_coeffs, benchmark::g, x[j]));
    }
    CsvTable t{"x", "f_exact", "f_rec", "g_abs_exact", "g_abs_rec"};
    for (std::size_t j = 0; j < x.size(); ++j)
        t.row().add(x[j]).add(f_exact[j]).add(rec.f_grid[j]).add(g_exact[j]).add(rec.g_abs_grid[j]);
    t.save(r.file("reconstruct"));

    CsvTable d{"k", "lambda", "v1", "phi_kk", "G_kk", "accepted"};
    std::size_t accepted = 0;
    for (const auto& m : rec.modes) {
        d.row().add(std::uint64_t{m.k}).add(m.lambda).add(m.v1).add(m.phi_kk).add(m.G_kk).add(std::uint64_t{m.accepted});
        accepted += m.accepted;
    }
    d.save(r.file("reconstruct_diagnostics"));

    r.meta.set(r.prefix + "reference_mode", rec.reference_mode);
    r.meta.set(r.prefix + "accepted_modes", accepted);
    r.meta.set(r.prefix + "f_rel_l2", relative_l2(rec.f_grid, f_exact));
    r.meta.set(r.prefix + "g_abs_rel_l2", relative_l2(rec.g_abs_grid, g_exact));
}

void cmd_instability(Run& r) {
    const auto src = make_source(r.cfg, r.p);
    const auto phi = r.denominators();
    const auto rep = instability_report(r.p, src.h, phi);
    CsvTable t{"k", "lambda", "v1", "phi_kk", "amplification"};
    for (const auto& row : rep.rows)
        t.row().add(std::uint64_t{row.k}).add(row.lambda).add(row.v1).add(row.phi_kk).add(row.amplification);
    t.save(r.file("instability"));
    r.meta.set(r.prefix + "phi_slope", rep.phi_slope);
    r.meta.set(r.prefix + "phi_bound", rep.phi_bound);
    r.meta.set(r.prefix + "v1_slope", rep.v1_slope);
    r.meta.set(r.prefix + "v1_bound", rep.v1_bound);
}

const std::map<std::string_view, std::function<void(Run&)>>& commands() {
    static const std::map<std::string_view, std::function<void(Run&)>> table{
        {"fbm", cmd_fbm},         {"direct", cmd_direct},           {"ensemble", cmd_ensemble},
        {"phi", cmd_phi},         {"reconstruct", cmd_reconstruct}, {"instability", cmd_instability},
    };
    return table;
}

}  // namespace

const std::vector<std::string_view>& subcommands() {
    static const std::vector<std::string_view> names{"fbm", "direct", "ensemble", "phi", "reconstruct", "instability"};
    return names;
}

std::vector<std::string> run_subcommand(std::string_view subcommand, const RunConfig& cfg) {
    const auto it = commands().find(subcommand);
    if (it == commands().end()) throw InputError("unknown subcommand '" + std::string(subcommand) + "'");
    validate(cfg);

    Meta meta;
    meta.set("subcommand", std::string(subcommand));
    meta.set("version", std::string(kVersion));
    meta.set("seed", std::to_string(cfg.seed));
    meta.set("rng", kRngDescription);
    meta.set("gaussian_transform", kGaussianTransform);
    meta.set("path_substream", "path i uses derive_stream_seed(seed, i)");
    meta.set("phi_substream", "montecarlo denominators run with seed derive_stream_seed(seed, 2^64-1)");
    std::istringstream lines(serialize(cfg));
    for (std::string line; std::getline(lines, line);) {
        const auto eq = line.find(" = ");
        if (line.substr(0, eq) == "out") continue;  // keep the sidecar independent of where it is written
        meta.set("config." + line.substr(0, eq), line.substr(eq + 3));
    }

    std::vector<std::string> files;
    const auto runs = model_runs(cfg);
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const auto& p = runs[i];
        std::string tag;
        if (cfg.triples == TripleSet::paper)
            tag = "a" + shortest(p.alpha) + "_s" + shortest(p.s) + "_H" + shortest(p.hurst);
        const std::string prefix = "run" + std::to_string(i + 1) + ".";
        meta.set(prefix + "alpha", p.alpha);
        meta.set(prefix + "s", p.s);
        meta.set(prefix + "hurst", p.hurst);
        Run run{cfg, p, tag, prefix, meta, files};
        it->second(run);
    }
    const std::string meta_name = std::string(subcommand) + ".meta";
    meta.set("files", [&] {
        std::string all;
        for (const auto& f : files) all += (all.empty() ? "" : ",") + f;
        return all;
    }());
    write_text(fs::path(cfg.out) / meta_name, meta.text());
    files.push_back(meta_name);
    return files;
}

Failure classify(std::exception_ptr e) {
    try {
        std::rethrow_exception(e);
    } catch (const ConfigError& x) {
        return {kExitConfig, "config", x.what()};
    } catch (const InversionError& x) {
        return {kExitInversion, "inversion", x.what()};
    } catch (const DomainError& x) {
        return {kExitDomain, "domain", x.what()};
    } catch (const InputError& x) {
        return {kExitInput, "input", x.what()};
    } catch (const IoError& x) {
        return {kExitIo, "io", x.what()};
    } catch (const fs::filesystem_error& x) {
        return {kExitIo, "io", x.what()};
    } catch (const std::exception& x) {
        return {kExitInternal, "internal", x.what()};
    } catch (...) {
        return {kExitInternal, "internal", "unknown failure"};
    }
}

int dispatch(std::string_view subcommand, const RunConfig& cfg, std::ostream& err) {
    try {
        run_subcommand(subcommand, cfg);
        return kExitOk;
    } catch (...) {
        auto f = classify(std::current_exception());
        for (auto& c : f.message)
            if (c == '\n') c = ' ';
        err << "error: " << f.category << ": " << f.message << '\n';
        return f.code;
    }
}

}  // namespace sfde
