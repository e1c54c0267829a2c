#include "isolab/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

namespace isolab {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
    throw ConfigError(origin + ":" + std::to_string(line) + ": " + msg);
}

// Parameter names in positional order for each scalar kind.
const std::map<std::string, std::vector<std::string>>& scalar_params() {
    static const std::map<std::string, std::vector<std::string>> table{
        {"constant", {"value"}},
        {"exp-approach-below", {"amplitude", "rate"}},
        {"exp-approach-above", {"amplitude", "rate"}},
        {"counterexample-phi", {"M", "scale", "offset"}},
        {"power-approach-below", {"amplitude", "power"}},
        {"power-approach-above", {"amplitude", "power"}},
        {"tabulated-radial", {"file"}},
    };
    return table;
}

const std::map<std::string, std::vector<std::string>>& anisotropic_params() {
    static const std::map<std::string, std::vector<std::string>> table{
        {"abs-cos", {"a", "b", "axis"}},
        {"fourier-anisotropy", {"g", "cos", "sin"}},
    };
    return table;
}

// Recursive reader for kind(arg, name=value, ...) expressions.
class SpecParser {
public:
    SpecParser(std::string text, std::string origin, int line)
        : s_(std::move(text)), origin_(std::move(origin)), line_(line) {}

    DensitySpec parse() {
        DensitySpec spec = parse_spec();
        skip_ws();
        if (i_ != s_.size()) error("unexpected trailing text '" + s_.substr(i_) + "'");
        return spec;
    }

private:
    std::string s_;
    std::string origin_;
    int line_;
    std::size_t i_ = 0;

    [[noreturn]] void error(const std::string& msg) const { fail(origin_, line_, msg); }

    void skip_ws() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    bool peek(char c) {
        skip_ws();
        return i_ < s_.size() && s_[i_] == c;
    }
    void expect(char c) {
        if (!peek(c)) error(std::string("expected '") + c + "'");
        ++i_;
    }
    std::string token() {
        skip_ws();
        const std::size_t b = i_;
        while (i_ < s_.size() && s_[i_] != ',' && s_[i_] != '(' && s_[i_] != ')' && s_[i_] != '=' &&
               s_[i_] != '[' && s_[i_] != ']' && !std::isspace(static_cast<unsigned char>(s_[i_]))) {
            ++i_;
        }
        return s_.substr(b, i_ - b);
    }
    std::string quoted_or_token() {
        if (!peek('"')) return token();
        ++i_;
        const std::size_t b = i_;
        while (i_ < s_.size() && s_[i_] != '"') ++i_;
        if (i_ == s_.size()) error("unterminated string");
        return s_.substr(b, i_++ - b);
    }
    double number(const std::string& what) {
        const std::string t = token();
        try {
            return parse_decimal(t, what);
        } catch (const ConfigError& e) {
            error(e.what());
        }
    }
    std::vector<double> list(const std::string& what) {
        std::vector<double> out;
        expect('[');
        if (peek(']')) {
            ++i_;
            return out;
        }
        for (;;) {
            out.push_back(number(what));
            if (peek(']')) {
                ++i_;
                return out;
            }
            expect(',');
        }
    }

    DensitySpec parse_spec() {
        DensitySpec spec;
        spec.kind = token();
        if (spec.kind.empty()) error("expected a density kind");
        const bool scalar = scalar_params().count(spec.kind) > 0;
        const bool aniso = anisotropic_params().count(spec.kind) > 0;
        if (spec.kind == "custom") error("custom densities cannot be given in a config file");
        if (!scalar && !aniso) error("unknown density kind '" + spec.kind + "'");
        const auto& names = scalar ? scalar_params().at(spec.kind) : anisotropic_params().at(spec.kind);

        std::set<std::string> seen;
        if (peek('(')) {
            ++i_;
            std::size_t pos = 0;
            while (!peek(')')) {
                if (!seen.empty() || pos > 0) expect(',');
                // Named when the next token is followed by '='.
                const std::size_t save = i_;
                std::string name = token();
                if (peek('=')) {
                    ++i_;
                } else {
                    i_ = save;
                    if (pos >= names.size()) error("too many arguments for " + spec.kind);
                    name = names[pos];
                }
                ++pos;
                if (std::find(names.begin(), names.end(), name) == names.end()) {
                    error("unknown parameter '" + name + "' for " + spec.kind);
                }
                if (!seen.insert(name).second) error("duplicate parameter '" + name + "'");
                read_value(spec, name);
            }
            ++i_;
        }
        fill_defaults(spec, seen);
        return spec;
    }

    void read_value(DensitySpec& spec, const std::string& name) {
        if (name == "file") {
            spec.file = quoted_or_token();
        } else if (name == "axis") {
            spec.axis = list("axis");
        } else if (name == "cos") {
            spec.cos_terms = list("cos");
        } else if (name == "sin") {
            spec.sin_terms = list("sin");
        } else if (name == "a" || name == "b" || name == "g") {
            DensitySpec part = parse_spec();
            if (!scalar_params().count(part.kind)) error("'" + name + "' must be a scalar density");
            spec.parts[name] = std::move(part);
        } else {
            spec.params[name] = number(name);
        }
    }

    void fill_defaults(DensitySpec& spec, const std::set<std::string>& seen) {
        auto need = [&](const char* name) {
            if (!seen.count(name)) error(spec.kind + " needs parameter '" + name + "'");
        };
        auto dflt = [&](const char* name, double v) { spec.params.emplace(name, v); };
        const std::string& k = spec.kind;
        if (k == "constant") {
            need("value");
        } else if (k == "exp-approach-below" || k == "exp-approach-above") {
            dflt("amplitude", 1.0);
            dflt("rate", 1.0);
        } else if (k == "counterexample-phi") {
            need("M");
            need("scale");
            dflt("offset", 1.0);
        } else if (k == "power-approach-below" || k == "power-approach-above") {
            need("amplitude");
            dflt("power", 1.0);
        } else if (k == "tabulated-radial") {
            need("file");
        } else if (k == "abs-cos") {
            need("a");
            need("b");
            need("axis");
        } else if (k == "fourier-anisotropy") {
            need("g");
        }
    }
};

void resolve_files(DensitySpec& spec, const std::string& base_dir) {
    if (!spec.file.empty()) {
        const std::filesystem::path p(spec.file);
        if (p.is_relative()) spec.file = (std::filesystem::path(base_dir) / p).lexically_normal().string();
    }
    for (auto& [_, part] : spec.parts) resolve_files(part, base_dir);
}

int parse_int(const std::string& text, const std::string& what) {
    int v = 0;
    const auto* b = text.data();
    const auto* e = text.data() + text.size();
    const auto r = std::from_chars(b, e, v);
    if (text.empty() || r.ec != std::errc() || r.ptr != e) {
        throw ConfigError(what + ": expected an integer, got '" + text + "'");
    }
    return v;
}

std::uint64_t parse_u64(const std::string& text, const std::string& what) {
    std::uint64_t v = 0;
    const auto* e = text.data() + text.size();
    const auto r = std::from_chars(text.data(), e, v);
    if (text.empty() || r.ec != std::errc() || r.ptr != e) {
        throw ConfigError(what + ": expected a nonnegative integer, got '" + text + "'");
    }
    return v;
}

bool parse_bool(const std::string& text, const std::string& what) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw ConfigError(what + ": expected true or false, got '" + text + "'");
}

std::vector<double> parse_list(std::string text, const std::string& what) {
    text = trim(text);
    if (text.size() >= 2 && text.front() == '[' && text.back() == ']') text = text.substr(1, text.size() - 2);
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_decimal(trim(item), what));
    if (out.empty()) throw ConfigError(what + ": empty list");
    return out;
}

std::string canonical_list(const std::vector<double>& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + fmt17(v[i]);
    return out + "]";
}

struct Entry {
    std::string value;
    int line = 0;
};

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys{
        "n", "seed", "preset", "volume",
        "density.f", "density.h",
        "annulus.inner_radius", "annulus.outer_radius", "annulus.radial_samples",
        "annulus.angular_samples",
        "search.R_min", "search.R_max", "search.R_count", "search.theta_samples",
        "search.epsilon", "search.eta", "search.max_candidates", "search.vol_tol",
        "optimizer.modes", "optimizer.max_iterations", "optimizer.initial_step",
        "optimizer.min_step", "optimizer.centre_distances", "optimizer.volume_rel_tol",
        "optimizer.r_min",
        "counterexample.M", "counterexample.samples", "counterexample.modes",
        "counterexample.max_centre_distance", "counterexample.run_optimizer",
        "counterexample.far_ball_R",
        "scan.R",
        "slicing.R",
        "output.dir",
    };
    return keys;
}

}  // namespace

double parse_decimal(const std::string& text, const std::string& what) {
    static const std::regex decimal(R"([+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?)");
    if (!std::regex_match(text, decimal)) {
        throw ConfigError(what + ": expected a decimal literal, got '" + text + "'");
    }
    double v = 0.0;
    const auto* e = text.data() + text.size();
    const char* b = text.data() + (text[0] == '+' ? 1 : 0);
    const auto r = std::from_chars(b, e, v);
    if (r.ec != std::errc() || r.ptr != e || !std::isfinite(v)) {
        throw ConfigError(what + ": value out of range '" + text + "'");
    }
    return v;
}

std::uint64_t fnv1a(std::string_view data) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string canonical_text(const DensitySpec& spec) {
    std::vector<std::string> args;
    for (const auto& [k, v] : spec.params) args.push_back(k + "=" + fmt17(v));
    for (const auto& [k, part] : spec.parts) args.push_back(k + "=" + canonical_text(part));
    if (!spec.file.empty()) args.push_back("file=\"" + spec.file + "\"");
    if (!spec.axis.empty()) args.push_back("axis=" + canonical_list(spec.axis));
    if (!spec.cos_terms.empty()) args.push_back("cos=" + canonical_list(spec.cos_terms));
    if (!spec.sin_terms.empty()) args.push_back("sin=" + canonical_list(spec.sin_terms));
    std::sort(args.begin(), args.end());
    std::string out = spec.kind + "(";
    for (std::size_t i = 0; i < args.size(); ++i) out += (i ? "," : "") + args[i];
    return out + ")";
}

ScalarDensity make_scalar(const DensitySpec& spec, const WarningSink& warn) {
    const auto& p = spec.params;
    const std::string& k = spec.kind;
    if (k == "constant") return constant_density(p.at("value"));
    if (k == "exp-approach-below") return exp_approach_below(p.at("amplitude"), p.at("rate"));
    if (k == "exp-approach-above") return exp_approach_above(p.at("amplitude"), p.at("rate"));
    if (k == "counterexample-phi") return counterexample_phi(p.at("M"), p.at("scale"), p.at("offset"));
    if (k == "power-approach-below") return power_approach_below(p.at("amplitude"), p.at("power"));
    if (k == "power-approach-above") return power_approach_above(p.at("amplitude"), p.at("power"));
    if (k == "tabulated-radial") return tabulated_radial_from_csv(spec.file, warn);
    throw ConfigError("'" + k + "' is not a scalar density kind");
}

AnisotropicDensity make_anisotropic(const DensitySpec& spec, const WarningSink& warn) {
    if (spec.kind == "abs-cos") {
        Point axis = Point::Map(spec.axis.data(), static_cast<Eigen::Index>(spec.axis.size()));
        if (!(axis.norm() > 0)) throw ConfigError("abs-cos axis must be nonzero");
        return abs_cos_anisotropy(make_scalar(spec.parts.at("a"), warn),
                                  make_scalar(spec.parts.at("b"), warn), axis);
    }
    if (spec.kind == "fourier-anisotropy") {
        return fourier_anisotropy(make_scalar(spec.parts.at("g"), warn), spec.cos_terms, spec.sin_terms);
    }
    return isotropic(make_scalar(spec, warn));
}

ScalarDensity Scenario::make_f(const std::function<void(const std::string&)>& warn) const {
    return make_scalar(f, warn);
}

AnisotropicDensity Scenario::make_h(const std::function<void(const std::string&)>& warn) const {
    return make_anisotropic(h, warn);
}

std::string Scenario::hash() const {
    std::string text;
    for (const auto& [k, v] : canonical) text += k + "=" + v + "\n";
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(text)));
    return buf;
}

void Scenario::set_override(const std::string& key, const std::string& value) {
    canonical[key] = value;
}

Scenario parse_config(const std::string& text, const std::string& origin, const std::string& base_dir) {
    std::map<std::string, Entry> entries;
    std::string section;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash_pos = raw.find('#');
        const std::string s = trim(hash_pos == std::string::npos ? raw : raw.substr(0, hash_pos));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') fail(origin, line, "malformed section header '" + s + "'");
            section = trim(s.substr(1, s.size() - 2));
            if (section.empty()) fail(origin, line, "empty section name");
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) fail(origin, line, "expected 'key = value', got '" + s + "'");
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (key.empty()) fail(origin, line, "missing key");
        const std::string full = section.empty() ? key : section + "." + key;
        if (!known_keys().count(full)) fail(origin, line, "unknown key '" + full + "'");
        if (entries.count(full)) fail(origin, line, "duplicate key '" + full + "'");
        entries[full] = Entry{value, line};
    }

    Scenario sc;
    auto with = [&](const std::string& key, auto&& apply) {
        auto it = entries.find(key);
        if (it == entries.end()) return;
        try {
            apply(it->second.value);
        } catch (const ConfigError& e) {
            const std::string msg = e.what();
            // Spec parser errors already carry a location.
            if (msg.rfind(origin + ":", 0) == 0) throw;
            fail(origin, it->second.line, msg);
        } catch (const Error& e) {
            fail(origin, it->second.line, key + ": " + e.what());
        }
    };

    with("n", [&](const std::string& v) { sc.n = parse_int(v, "n"); });
    with("seed", [&](const std::string& v) { sc.seed = parse_u64(v, "seed"); });
    with("volume", [&](const std::string& v) {
        sc.volume = parse_decimal(v, "volume");
        if (!(*sc.volume > 0)) throw ConfigError("volume must be positive");
    });
    with("counterexample.M", [&](const std::string& v) { sc.M = parse_decimal(v, "M"); });
    with("preset", [&](const std::string& v) {
        if (v != "escape-to-infinity" && v != "sec4") throw ConfigError("unknown preset '" + v + "'");
        if (entries.count("density.f") || entries.count("density.h")) {
            throw ConfigError("this preset fixes both densities; remove density.f and density.h");
        }
        if (!(sc.M > 0)) throw ConfigError("this preset needs counterexample.M > 0");
        sc.preset = "escape-to-infinity";
        sc.f = DensitySpec{"counterexample-phi", {{"M", sc.M}, {"scale", 3.0}, {"offset", 1.0}}, {}, {}, {}, {}, {}};
        sc.h = DensitySpec{"counterexample-phi", {{"M", sc.M}, {"scale", 1.0}, {"offset", 1.0}}, {}, {}, {}, {}, {}};
    });
    for (const char* key : {"density.f", "density.h"}) {
        with(key, [&](const std::string& v) {
            DensitySpec spec = SpecParser(v, origin, entries[key].line).parse();
            if (std::string(key) == "density.f") {
                if (!scalar_params().count(spec.kind)) {
                    throw ConfigError("density.f must be a scalar kind, got '" + spec.kind + "'");
                }
                sc.f = std::move(spec);
            } else {
                sc.h = std::move(spec);
            }
        });
    }
    if (sc.f.kind.empty()) throw ConfigError(origin + ": density.f is required (or preset = escape-to-infinity)");
    if (sc.h.kind.empty()) throw ConfigError(origin + ": density.h is required (or preset = escape-to-infinity)");
    if (sc.n < 2) fail(origin, entries.count("n") ? entries["n"].line : 0, "n must be at least 2");
    if (!sc.h.axis.empty() && static_cast<int>(sc.h.axis.size()) != sc.n) {
        fail(origin, entries["density.h"].line, "abs-cos axis length must equal n");
    }

    with("annulus.inner_radius", [&](const std::string& v) { sc.annulus.inner_radius = parse_decimal(v, "inner_radius"); });
    with("annulus.outer_radius", [&](const std::string& v) { sc.annulus.outer_radius = parse_decimal(v, "outer_radius"); });
    with("annulus.radial_samples", [&](const std::string& v) { sc.annulus.radial_samples = parse_int(v, "radial_samples"); });
    with("annulus.angular_samples", [&](const std::string& v) { sc.annulus.angular_samples = parse_int(v, "angular_samples"); });

    double R_min = 10.0;
    double R_max = 1e4;
    int R_count = 31;
    with("search.R_min", [&](const std::string& v) { R_min = parse_decimal(v, "R_min"); });
    with("search.R_max", [&](const std::string& v) { R_max = parse_decimal(v, "R_max"); });
    with("search.R_count", [&](const std::string& v) { R_count = parse_int(v, "R_count"); });
    if (!(R_min > 1) || !(R_max >= R_min) || R_count < 1) {
        throw ConfigError(origin + ": search schedule needs 1 < R_min <= R_max and R_count >= 1");
    }
    sc.search.R_schedule = SearchConfig::geometric_schedule(R_min, R_max, R_count);
    with("search.theta_samples", [&](const std::string& v) { sc.search.theta_samples = parse_int(v, "theta_samples"); });
    with("search.epsilon", [&](const std::string& v) { sc.search.epsilon = parse_decimal(v, "epsilon"); });
    with("search.eta", [&](const std::string& v) { sc.search.eta = parse_decimal(v, "eta"); });
    with("search.max_candidates", [&](const std::string& v) { sc.search.max_candidates = parse_int(v, "max_candidates"); });
    with("search.vol_tol", [&](const std::string& v) { sc.search.vol_tol = parse_decimal(v, "vol_tol"); });

    with("optimizer.modes", [&](const std::string& v) { sc.optimizer.modes = parse_int(v, "modes"); });
    with("optimizer.max_iterations", [&](const std::string& v) { sc.optimizer.max_iterations = parse_int(v, "max_iterations"); });
    with("optimizer.initial_step", [&](const std::string& v) { sc.optimizer.initial_step = parse_decimal(v, "initial_step"); });
    with("optimizer.min_step", [&](const std::string& v) { sc.optimizer.min_step = parse_decimal(v, "min_step"); });
    with("optimizer.centre_distances", [&](const std::string& v) { sc.optimizer.centre_distances = parse_list(v, "centre_distances"); });
    with("optimizer.volume_rel_tol", [&](const std::string& v) { sc.optimizer.volume_rel_tol = parse_decimal(v, "volume_rel_tol"); });
    with("optimizer.r_min", [&](const std::string& v) { sc.optimizer.r_min = parse_decimal(v, "r_min"); });

    with("counterexample.samples", [&](const std::string& v) { sc.samples = parse_int(v, "samples"); });
    with("counterexample.modes", [&](const std::string& v) { sc.counterexample.modes = parse_int(v, "modes"); });
    with("counterexample.max_centre_distance", [&](const std::string& v) {
        sc.counterexample.max_centre_distance = parse_decimal(v, "max_centre_distance");
    });
    with("counterexample.run_optimizer", [&](const std::string& v) { sc.counterexample.run_optimizer = parse_bool(v, "run_optimizer"); });
    with("counterexample.far_ball_R", [&](const std::string& v) { sc.counterexample.far_ball_schedule = parse_list(v, "far_ball_R"); });
    with("scan.R", [&](const std::string& v) { sc.scan_R = parse_list(v, "scan.R"); });
    with("slicing.R", [&](const std::string& v) { sc.slicing_R = parse_decimal(v, "slicing.R"); });
    with("output.dir", [&](const std::string& v) { sc.output_dir = v; });

    try {
        sc.annulus.validate();
        sc.search.validate(sc.n);
        sc.optimizer.validate();
    } catch (const DomainError& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    if (sc.samples < 0) throw ConfigError(origin + ": counterexample.samples must be nonnegative");

    auto& c = sc.canonical;
    c["n"] = std::to_string(sc.n);
    c["seed"] = std::to_string(sc.seed);
    c["preset"] = sc.preset;
    c["volume"] = sc.volume ? fmt17(*sc.volume) : "";
    c["density.f"] = canonical_text(sc.f);
    c["density.h"] = canonical_text(sc.h);
    c["annulus"] = fmt17(sc.annulus.inner_radius) + "," + fmt17(sc.annulus.outer_radius) + "," +
                   std::to_string(sc.annulus.radial_samples) + "," + std::to_string(sc.annulus.angular_samples);
    c["search"] = canonical_list(sc.search.R_schedule) + "," + std::to_string(sc.search.theta_samples) + "," +
                  fmt17(sc.search.epsilon) + "," + fmt17(sc.search.eta) + "," +
                  std::to_string(sc.search.max_candidates) + "," + fmt17(sc.search.vol_tol);
    c["optimizer"] = std::to_string(sc.optimizer.modes) + "," + std::to_string(sc.optimizer.max_iterations) + "," +
                     fmt17(sc.optimizer.initial_step) + "," + fmt17(sc.optimizer.min_step) + "," +
                     canonical_list(sc.optimizer.centre_distances) + "," + fmt17(sc.optimizer.volume_rel_tol) +
                     "," + fmt17(sc.optimizer.r_min);
    c["counterexample"] = fmt17(sc.M) + "," + std::to_string(sc.samples) + "," +
                          std::to_string(sc.counterexample.modes) + "," +
                          fmt17(sc.counterexample.max_centre_distance) + "," +
                          (sc.counterexample.run_optimizer ? "1" : "0") + "," +
                          canonical_list(sc.counterexample.far_ball_schedule);
    c["scan.R"] = canonical_list(sc.scan_R);
    c["slicing.R"] = fmt17(sc.slicing_R);

    resolve_files(sc.f, base_dir);
    resolve_files(sc.h, base_dir);
    return sc;
}

Scenario load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    const auto dir = std::filesystem::path(path).parent_path();
    return parse_config(ss.str(), path, dir.empty() ? "." : dir.string());
}

}  // namespace isolab
