#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "isolab/constructions.hpp"
#include "isolab/densities.hpp"
#include "isolab/profile.hpp"

namespace isolab {

/// A catalog density as written in a scenario file. Anisotropic kinds carry
/// their scalar ingredients in `parts` (a, b for abs-cos; g for fourier).
struct DensitySpec {
    std::string kind;
    std::map<std::string, double> params;
    std::string file;  // resolved path for tabulated-radial
    std::vector<double> axis;
    std::vector<double> cos_terms;
    std::vector<double> sin_terms;
    std::map<std::string, DensitySpec> parts;
};

struct Scenario {
    int n = 2;
    std::uint64_t seed = 0;
    std::string preset;
    DensitySpec f;
    DensitySpec h;
    Annulus annulus;
    SearchConfig search;
    OptimizerConfig optimizer;
    CounterexampleConfig counterexample;
    double M = 10.0;
    int samples = 500;
    std::vector<double> scan_R{1.5, 2.0, 3.0, 5.0, 10.0, 20.0, 50.0, 100.0};
    std::optional<double> volume;
    double slicing_R = 10.0;
    std::string output_dir = "isolab-out";
    /// Every effective setting as key -> value text, the input of hash().
    std::map<std::string, std::string> canonical;

    ScalarDensity make_f(const std::function<void(const std::string&)>& warn = {}) const;
    AnisotropicDensity make_h(const std::function<void(const std::string&)>& warn = {}) const;
    /// FNV-1a of the canonical settings, as 16 hex digits.
    std::string hash() const;
    /// Records a command-line override in the canonical settings.
    void set_override(const std::string& key, const std::string& value);
};

/// Reads `key = value` lines with optional [section] headers; `#` starts a
/// comment. Unknown keys and malformed values raise ConfigError naming the
/// line.
Scenario load_config(const std::string& path);
Scenario parse_config(const std::string& text, const std::string& origin = "<string>",
                      const std::string& base_dir = ".");

using WarningSink = std::function<void(const std::string&)>;

ScalarDensity make_scalar(const DensitySpec& spec, const WarningSink& warn = {});
/// Scalar kinds give isotropic h.
AnisotropicDensity make_anisotropic(const DensitySpec& spec, const WarningSink& warn = {});
/// kind(name=value, ...) with sorted names and 17 significant digits.
std::string canonical_text(const DensitySpec& spec);

std::uint64_t fnv1a(std::string_view data);

/// Strict decimal literal; anything else raises ConfigError.
double parse_decimal(const std::string& text, const std::string& what);

}  // namespace isolab
