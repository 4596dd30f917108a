#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "weyl/experiments.hpp"

namespace weyl {

struct VolumeSettings {
    /// Points for kappa fits; empty means the region centre.
    std::vector<cplx> kappa_points;
    double t_lo = 1e-4;
    double t_hi = 1e-1;
    int n_points = 7;
};

struct SpectrumSettings {
    /// -1: unperturbed operator; otherwise the trial index of the potential.
    int trial = 0;
    /// Pseudospectrum box; unset means the bounding box of omega.
    std::optional<Rectangle> box;
    int n_re = 41;
    int n_im = 31;
};

struct LineCheckSettings {
    TrigPoly g = TrigPoly::monomial(-1);
    double h = 0.1;
    int k_max = 5;
    int K = 80;
    int n_trials = 20;
    /// Regions whose counts are checked against the closed-form spectrum.
    std::vector<Region> regions{Region::rectangle(-1.0, 1.0, 0.1, 0.9), Region::rectangle(-1.0, 1.0, -0.9, -0.1)};
};

struct IdentitySettings {
    int n_matrices = 50;
    int dim = 20;
    int n_psd = 20;
    int psd_dim = 50;
    double alpha = 0.1;
    double t_probe = 0.3;
    double chi_c = 1.0;
};

/// Everything one config file can hold; subcommands read the parts they need.
struct LabConfig {
    ExperimentConfig experiment;
    VolumeSettings volume;
    SpectrumSettings spectrum;
    LineCheckSettings line_check;
    IdentitySettings identity;
};

/// Parses a YAML config. Unknown keys and malformed values raise ConfigError
/// with "<source>:<line>: <key>: <problem>".
LabConfig parse_config(const std::string& text, const std::string& source = "<config>");

/// Reads and parses a file; a missing file raises ConfigError naming the path.
LabConfig load_config(const std::string& path);

/// Resolved config as YAML, readable by parse_config. `threads` is left out:
/// it changes wall time only, and reports must not depend on it.
std::string config_to_yaml(const LabConfig& config);

}  // namespace weyl
