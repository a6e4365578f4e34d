#include "sfde/config.hpp"

#include "sfde/csv.hpp"
#include "sfde/error.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <string>

namespace sfde {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view expected, std::string_view got) {
    throw ConfigError(std::string(key), std::string(key) + ": expected " + std::string(expected) + ", got '" +
                                            std::string(got) + "'");
}

double to_double(std::string_view key, std::string_view v) {
    double out = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) bad_value(key, "a number", v);
    return out;
}

std::uint64_t to_u64(std::string_view key, std::string_view v) {
    std::uint64_t out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) bad_value(key, "a nonnegative integer", v);
    return out;
}

std::vector<double> to_list(std::string_view key, std::string_view v) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= v.size()) {
        const auto comma = std::min(v.find(',', pos), v.size());
        const auto item = trim(v.substr(pos, comma - pos));
        if (item.empty()) bad_value(key, "a comma-separated list of numbers", v);
        out.push_back(to_double(key, item));
        pos = comma + 1;
    }
    return out;
}

std::string from_list(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0) out += ", ";
        out += format_number(v[i]);
    }
    return out;
}

template <class E>
E to_enum(std::string_view key, std::string_view v, std::initializer_list<std::pair<std::string_view, E>> names) {
    std::string expected;
    for (const auto& [name, value] : names) {
        if (v == name) return value;
        expected += expected.empty() ? "" : "|";
        expected += name;
    }
    bad_value(key, "one of " + expected, v);
}

FieldSource to_field(std::string_view key, std::string_view v) {
    return to_enum<FieldSource>(key, v, {{"paper", FieldSource::paper}, {"zero", FieldSource::zero},
                                         {"coeffs", FieldSource::coeffs}});
}

struct Key {
    std::string_view name;
    std::function<void(RunConfig&, std::string_view)> set;
    std::function<std::string(const RunConfig&)> get;  // empty string: omit from serialize
};

const std::vector<Key>& keys() {
    using C = RunConfig;
    const auto num = [](double v) { return format_number(v); };
    static const std::vector<Key> table{
        {"alpha", [](C& c, auto v) { c.model.alpha = to_double("alpha", v); }, [=](const C& c) { return num(c.model.alpha); }},
        {"s", [](C& c, auto v) { c.model.s = to_double("s", v); }, [=](const C& c) { return num(c.model.s); }},
        {"hurst", [](C& c, auto v) { c.model.hurst = to_double("hurst", v); }, [=](const C& c) { return num(c.model.hurst); }},
        {"T", [](C& c, auto v) { c.model.T = to_double("T", v); }, [=](const C& c) { return num(c.model.T); }},
        {"L", [](C& c, auto v) { c.model.L = to_u64("L", v); }, [](const C& c) { return std::to_string(c.model.L); }},
        {"N", [](C& c, auto v) { c.model.N = to_u64("N", v); }, [](const C& c) { return std::to_string(c.model.N); }},
        {"paths", [](C& c, auto v) { c.paths = to_u64("paths", v); }, [](const C& c) { return std::to_string(c.paths); }},
        {"seed", [](C& c, auto v) { c.seed = to_u64("seed", v); }, [](const C& c) { return std::to_string(c.seed); }},
        {"f", [](C& c, auto v) { c.f = to_field("f", v); }, [](const C& c) { return std::string(to_string(c.f)); }},
        {"g", [](C& c, auto v) { c.g = to_field("g", v); }, [](const C& c) { return std::string(to_string(c.g)); }},
        {"f_coeffs", [](C& c, auto v) { c.f_coeffs = to_list("f_coeffs", v); }, [](const C& c) { return from_list(c.f_coeffs); }},
        {"g_coeffs", [](C& c, auto v) { c.g_coeffs = to_list("g_coeffs", v); }, [](const C& c) { return from_list(c.g_coeffs); }},
        {"h",
         [](C& c, auto v) {
             c.h = to_enum<TimeProfile>("h", v, {{"paper", TimeProfile::paper}, {"constant", TimeProfile::constant}});
         },
         [](const C& c) { return std::string(to_string(c.h)); }},
        {"h_value", [](C& c, auto v) { c.h_value = to_double("h_value", v); }, [=](const C& c) { return num(c.h_value); }},
        {"h_floor", [](C& c, auto v) { c.h_floor = to_double("h_floor", v); }, [=](const C& c) { return num(c.h_floor); }},
        {"x_points", [](C& c, auto v) { c.x_points = to_u64("x_points", v); }, [](const C& c) { return std::to_string(c.x_points); }},
        {"method",
         [](C& c, auto v) {
             c.method = to_enum<FbmMethod>("method", v, {{"circulant", FbmMethod::circulant}, {"cholesky", FbmMethod::cholesky}});
         },
         [](const C& c) { return std::string(to_string(c.method)); }},
        {"denominator",
         [](C& c, auto v) {
             c.denominator = to_enum<Denominator>("denominator", v, {{"quadrature", Denominator::quadrature},
                                                                     {"montecarlo", Denominator::montecarlo}});
         },
         [](const C& c) { return std::string(to_string(c.denominator)); }},
        {"delta", [](C& c, auto v) { c.delta = to_double("delta", v); }, [=](const C& c) { return num(c.delta); }},
        {"phi_tol", [](C& c, auto v) { c.phi_tol = to_double("phi_tol", v); }, [=](const C& c) { return num(c.phi_tol); }},
        {"threads",
         [](C& c, auto v) {
             const auto t = to_u64("threads", v);
             if (t > 1024) bad_value("threads", "at most 1024", v);
             c.threads = static_cast<unsigned>(t);
         },
         [](const C& c) { return std::to_string(c.threads); }},
        {"triples",
         [](C& c, auto v) {
             c.triples = to_enum<TripleSet>("triples", v, {{"single", TripleSet::single}, {"paper", TripleSet::paper}});
         },
         [](const C& c) { return std::string(to_string(c.triples)); }},
        {"out", [](C& c, auto v) { c.out = std::string(v); }, [](const C& c) { return c.out; }},
    };
    return table;
}

void apply_preset(RunConfig& c, std::string_view name) {
    if (name == "none") {
        c = RunConfig{};
        return;
    }
    if (name != "paper") bad_value("preset", "none or paper", name);
    c = RunConfig{};
    c.preset = "paper";
    const auto& first = benchmark::kTriples[0];
    c.model = ModelParams{first.alpha, first.s, first.hurst, benchmark::kT, benchmark::kL, benchmark::kN};
    c.paths = benchmark::kPaths;
    c.f = c.g = FieldSource::paper;
    c.h = TimeProfile::paper;
}

void require(bool ok, const char* field, const std::string& what) {
    if (!ok) throw ConfigError(field, std::string(field) + ": " + what);
}

void check_unit_interval(double v, const char* field) {
    require(v > 0.0 && v < 1.0, field, "must lie in the open interval (0, 1), got " + format_number(v));
}

void check_coeffs(FieldSource src, const std::vector<double>& c, std::size_t N, const char* field,
                  const char* list) {
    if (src == FieldSource::coeffs) {
        require(c.size() == N, list, "needs exactly N = " + std::to_string(N) + " values, got " +
                                         std::to_string(c.size()));
        for (double v : c) require(std::isfinite(v), list, "values must be finite");
    } else {
        require(c.empty(), list, std::string("given but ") + field + " is not 'coeffs'");
    }
}

}  // namespace

std::string_view to_string(FieldSource v) {
    switch (v) {
        case FieldSource::paper: return "paper";
        case FieldSource::zero: return "zero";
        case FieldSource::coeffs: return "coeffs";
    }
    return "?";
}
std::string_view to_string(TimeProfile v) { return v == TimeProfile::paper ? "paper" : "constant"; }
std::string_view to_string(Denominator v) { return v == Denominator::quadrature ? "quadrature" : "montecarlo"; }
std::string_view to_string(TripleSet v) { return v == TripleSet::single ? "single" : "paper"; }

void validate(const RunConfig& c) {
    check_unit_interval(c.model.alpha, "alpha");
    check_unit_interval(c.model.s, "s");
    check_unit_interval(c.model.hurst, "hurst");
    require(c.model.T > 0.0 && std::isfinite(c.model.T), "T", "must be positive, got " + format_number(c.model.T));
    require(c.model.L >= 1, "L", "needs at least one time step");
    require(c.model.N >= 1, "N", "needs at least one mode");
    require(c.paths >= 1, "paths", "needs at least one path");
    check_coeffs(c.f, c.f_coeffs, c.model.N, "f", "f_coeffs");
    check_coeffs(c.g, c.g_coeffs, c.model.N, "g", "g_coeffs");
    require(c.h_floor > 0.0 && std::isfinite(c.h_floor), "h_floor", "must be positive");
    require(std::isfinite(c.h_value), "h_value", "must be finite");
    if (c.h == TimeProfile::constant)
        require(c.h_value >= c.h_floor, "h_value",
                "h = " + format_number(c.h_value) + " is below h_floor = " + format_number(c.h_floor));
    else
        require(1.0 >= c.h_floor, "h", "h(t) = t + 1 falls below h_floor = " + format_number(c.h_floor));
    require(c.x_points >= 2, "x_points", "needs at least two grid points");
    require(c.delta >= 0.0 && c.delta < 1.0, "delta", "must lie in [0, 1), got " + format_number(c.delta));
    require(c.phi_tol > 0.0 && std::isfinite(c.phi_tol), "phi_tol", "must be positive");
    require(!c.out.empty(), "out", "must not be empty");
    if (c.triples == TripleSet::paper) {
        require(c.f != FieldSource::coeffs && c.g != FieldSource::coeffs, "triples",
                "the benchmark triples use N from the config; explicit coefficients are not supported with them");
    }
}

RunConfig parse_config(std::string_view text) {
    struct Entry {
        std::string_view value;
        std::size_t line;
    };
    std::map<std::string, Entry, std::less<>> entries;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto eol = std::min(text.find('\n', pos), text.size());
        auto line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = "line " + std::to_string(line_no) + ": ";
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("", where + "expected 'key = value', got '" + std::string(line) + "'");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("", where + "missing key before '='");
        if (value.empty()) throw ConfigError(std::string(key), where + std::string(key) + ": missing value");
        bool known = key == "preset";
        for (const auto& k : keys()) known = known || k.name == key;
        if (!known) throw ConfigError(std::string(key), where + "unknown key '" + std::string(key) + "'");
        if (entries.contains(key))
            throw ConfigError(std::string(key), where + std::string(key) + ": repeated (first set on line " +
                                                    std::to_string(entries.find(key)->second.line) + ")");
        entries.emplace(std::string(key), Entry{value, line_no});
    }

    auto at_line = [&](const ConfigError& e) {
        const auto it = entries.find(e.field());
        if (it == entries.end()) return e;
        return ConfigError(e.field(), "line " + std::to_string(it->second.line) + ": " + e.what());
    };

    RunConfig cfg;
    try {
        if (const auto it = entries.find("preset"); it != entries.end()) apply_preset(cfg, it->second.value);
        for (const auto& k : keys())
            if (const auto it = entries.find(k.name); it != entries.end()) k.set(cfg, it->second.value);
        validate(cfg);
    } catch (const ConfigError& e) {
        throw at_line(e);
    }
    return cfg;
}

void apply_override(RunConfig& cfg, std::string_view key, std::string_view value) {
    for (const auto& k : keys())
        if (k.name == key) return k.set(cfg, trim(value));
    throw ConfigError(std::string(key), "unknown key '" + std::string(key) + "'");
}

std::string serialize(const RunConfig& cfg) {
    std::string out = "preset = " + cfg.preset + "\n";
    for (const auto& k : keys()) {
        const auto v = k.get(cfg);
        if (v.empty()) continue;
        out += std::string(k.name) + " = " + v + "\n";
    }
    return out;
}

std::vector<ModelParams> model_runs(const RunConfig& cfg) {
    if (cfg.triples == TripleSet::single) return {cfg.model};
    std::vector<ModelParams> runs;
    for (const auto& t : benchmark::kTriples) {
        ModelParams p = cfg.model;
        p.alpha = t.alpha;
        p.s = t.s;
        p.hurst = t.hurst;
        runs.push_back(p);
    }
    return runs;
}

SourceSpec make_source(const RunConfig& cfg, const ModelParams& p) {
    auto field = [&](FieldSource src, const std::vector<double>& coeffs, double (*fn)(double)) -> SineField {
        switch (src) {
            case FieldSource::paper: return project_onto_sines(fn, p.N);
            case FieldSource::zero: return SineField(p.N, 0.0);
            case FieldSource::coeffs: return coeffs;
        }
        return {};
    };
    SourceSpec src;
    src.f = field(cfg.f, cfg.f_coeffs, benchmark::f);
    src.g = field(cfg.g, cfg.g_coeffs, benchmark::g);
    if (cfg.h == TimeProfile::paper)
        src.h = sample_h(p, benchmark::h);
    else
        src.h.assign(p.L, cfg.h_value);
    try {
        src.validate(p, cfg.h_floor);
    } catch (const std::exception& e) {
        throw ConfigError("h", std::string("h: ") + e.what());
    }
    return src;
}

}  // namespace sfde
