#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fslab/bent.hpp"
#include "fslab/evolution.hpp"
#include "fslab/params.hpp"

namespace fslab::cli {

struct GridConfig {
    int dim = 1;
    std::size_t tangentialPoints = 64;
    double halfLength = 10.0;
    std::size_t normalNodes = 64;
    double truncation = 0.0;  // 0: chosen from the decay rates
    double mapLength = kDefaultMapLength;
};

struct SolveConfig {
    cplx lambda{4.0, 0.0};
    std::string data = "gaussian";  // gaussian | zero
    double amplitude = 1.0;
};

struct ScanConfig {
    std::size_t samples = 10000;
    std::size_t validationSamples = 100000;
    std::size_t classSamples = 400;  // per multiplier-class scan, doubled for the refinement check
    double lambdaMinFactor = 1.0;
    double lambdaMaxFactor = 1e4;
    double xiMin = 1e-3;
    double xiMax = 1e3;
};

struct RBoundConfig {
    std::size_t operators = 8;
    std::size_t testVectors = 4;
    std::size_t trials = 200;
    double q = 2.0;
    double power = 1.0;
    double lambdaMaxFactor = 100.0;
    std::size_t tangentialPoints = 32;
    std::size_t normalNodes = 32;
};

struct EvolveConfig {
    ContourSpec contour;
    std::vector<double> times{0.1, 0.5, 1.0, 2.0};
    std::vector<double> xi{0.0, 0.5, 2.0};
    std::size_t normalNodes = 64;
    double truncation = 20.0;
    double gamma0 = 0.0;
    bool maximalRegularity = false;
    std::size_t steps = 200;
    double horizon = 2.0;
};

struct BentConfig {
    DiffeoSpec diffeo{0.05, 1.0};
    cplx lambda{16.0, 0.0};
    NeumannOptions neumann;
    int probes = 8;
    double dataAmplitude = 1.0;
};

struct RunConfig {
    FluidParams fluid;
    SectorSpec sector;
    GridConfig grid;
    SolveConfig solve;
    ScanConfig scan;
    RBoundConfig rbound;
    EvolveConfig evolve;
    BentConfig bent;
    std::optional<std::uint64_t> seed;
    std::string outDir = ".";
    std::set<std::string> sections;  // sections present in the file
};

// Parses the INI dialect documented in tools/examples/baseline.ini. Unknown sections
// or keys and malformed values raise ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

extern const std::vector<std::string> kCommands;

// Sections a command reads; all must be present in the file.
std::vector<std::string> required_sections(const std::string& command);
bool needs_seed(const std::string& command);

// Tolerances with their defaults for a command; overrides must name existing keys.
std::map<std::string, double> default_tolerances(const std::string& command);
void apply_override(std::map<std::string, double>& tol, const std::string& assignment);

// Canonical text of everything the command reads, with numbers at 17 digits.
std::string canonical_text(const RunConfig& cfg, const std::string& command,
                           const std::map<std::string, double>& tolerances);
std::uint64_t fnv1a(const std::string& text);

}  // namespace fslab::cli
