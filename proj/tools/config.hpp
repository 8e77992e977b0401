#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "eta/distributions.hpp"

namespace eta::cli {

// Invalid flags, config keys, or missing input files (exit code 2).
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Training divergence, fit failures (exit code 3).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A failed randomized property check (exit code 4).
struct PropertyViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Problem { kToy1d, kToy2d, kCustomCsv };

enum class ReferenceKind { kAnalytic, kCsv, kGevd };

// Flat key=value experiment configuration; unknown keys are rejected.
struct ExperimentConfig {
    Problem problem = Problem::kToy1d;
    std::vector<std::size_t> hidden = {256, 256, 256};
    double lr = 1e-3;
    std::size_t steps_erm = 3000;
    std::size_t steps_eta = 3000;
    double lambda = 1.0;
    double tau = 0.0;
    std::size_t omega = 30;
    std::size_t batch = 0;
    std::size_t n_train = 100;
    std::size_t pool_size = 10000;
    std::size_t n_reference = 1000000;
    std::size_t n_eval = 100000;
    double sigma2 = 10.0;
    std::array<double, 2> exclusion_center = {2.0, 2.0};
    double exclusion_radius = 1.5;
    std::string quantile_blocks = "auto";  // auto | toy1d | toy2d | "a:b:n;a:b:n;..."
    ReferenceKind reference_kind = ReferenceKind::kAnalytic;
    std::string reference_path;             // for csv:/gevd: references
    std::string observable = "identity";    // custom-csv only; toys fix their own
    std::string dataset_csv;                // custom-csv inputs
    std::string pool_csv;
    std::string init_checkpoint;            // optional ERM init for eta training
    std::size_t checkpoint_interval = 0;    // 0 disables periodic checkpoints
    std::uint64_t seed = 123;
    std::string out = "out";
    double consistency_q = 0.99;
    double tail_eval_min_q = 0.9;
    std::vector<double> threshold_qs = {0.9, 0.95, 0.99, 0.995, 0.999};
    bool quiet = false;
};

// Parses a config file (lines of `key = value`, '#' comments); keys not in
// the schema raise UsageError. Values given in `overrides` win over the file.
ExperimentConfig load_config(const std::optional<std::string>& path,
                             const std::map<std::string, std::string>& overrides);

// Canonical echo of the effective configuration (sorted keys), written into
// the output directory for provenance.
std::string render_config(const ExperimentConfig& config);

// Derived named sub-seeds; all randomness flows from these.
enum class SeedPurpose : std::uint64_t {
    kTrainData = 1,
    kPool = 2,
    kReference = 3,
    kModelInit = 4,
    kEval = 5,
    kShuffle = 6,
    kBounds = 7,
};
std::uint64_t sub_seed(std::uint64_t master, SeedPurpose purpose);

QuantileSet resolve_quantile_set(const ExperimentConfig& config);

}  // namespace eta::cli
