#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qae3d/model.hpp"

namespace qae3d {

/// Flat `key = value` run configuration. Unknown keys and malformed
/// values are hard errors naming the key.
struct TrainConfig {
    std::string dataset;            // CSV path (required by train/sweep)
    double fps = 0.0;               // 0 = from file header
    double train_seconds = 16.0;
    double test_seconds = 4.0;
    std::vector<int> joints;        // empty = all

    std::string model = "quantum";  // quantum|constant|mimic|fc|qecd|ceqd
    int n_qubits = 0;               // 0 = derived from V
    int n_discard = 2;
    int blocks = 8;
    std::string block_kind = "B";
    std::string architecture = "repeat";
    std::string init = "identity";
    std::string bottleneck = "marginalise";
    int fc_rank = 0;                // 0 = full dense
    int fc_match_params = 0;        // >0 = pick rank closest to this count

    long epochs = 10;
    long max_steps = 2000;
    double lr = 1e-2;
    double beta1 = 0.9;
    double beta2 = 0.99;
    double eps = 1e-8;
    double sched_factor = 0.5;
    int sched_patience = 200;
    double sched_min_lr = 1e-5;
    double sched_threshold = 1e-4;
    double ema_decay = 0.99;

    std::uint64_t seed = 0;
    std::string out = "out";
    long eval_interval = 500;
    long checkpoint_interval = 0;
};

TrainConfig parse_config_file(const std::string& path);
void apply_config_override(TrainConfig& config, const std::string& key,
                           const std::string& value);
void validate_config(const TrainConfig& config);

}  // namespace qae3d
