// config.hpp - run configuration: sectioned key-value files, flag overrides, validation

#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "meanforce/models.hpp"
#include "meanforce/oracle.hpp"
#include "meanforce/weak.hpp"

namespace meanforce::cli {

// Unknown keys, malformed values, out-of-range parameters. Maps to exit code 65.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// "section.key" -> raw value; list values are kept comma-joined
using KeyValues = std::map<std::string, std::string>;

KeyValues read_config_file(const std::string& path);

struct SweepConfig {
    double t_min{0.1};
    double t_max{50};
    int n_points{60};
    bool log_spacing{true};

    std::vector<double> temperatures() const;
};

struct OracleConfig {
    std::vector<int> n_modes{1, 2, 3};
    std::vector<int> cutoff{8};
    double omega_max{0};
    long dimension_cap{kDefaultDimensionCap};
};

struct RunConfig {
    models::ModelSpec model{models::VSystem{}};
    SpectralDensity::Form bath{OhmicExponential{10, 1}};
    double lambda{0.1};
    double beta{1};
    Normalization normalization{Normalization::Binomial};
    models::Regime regime{models::Regime::UltrastrongDerived};
    SweepConfig sweep;
    OracleConfig oracle;
    QuadratureOptions quadrature;
    ValidityThresholds validity;
    std::string csv_path;
    std::string json_path;
    int threads{1};

    KeyValues entries;  // every key in effect, defaults included, for output metadata

    SpectralDensity spectral_density() const { return SpectralDensity(bath); }
};

// Builds and fully validates a configuration. Throws ConfigError.
RunConfig make_config(const KeyValues& kv);

// Worker count: hardware concurrency capped by MEANFORCE_THREADS when set.
int thread_budget();

}  // namespace meanforce::cli
