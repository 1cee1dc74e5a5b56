#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "qae3d/model.hpp"

namespace qae3d {

struct AdamState {
    std::vector<double> m, v;
    long t = 0;
    double lr = 1e-2;
    double beta1 = 0.9;
    double beta2 = 0.99;
    double eps = 1e-8;

    static AdamState init(int param_count, double lr);
};

/// One bias-corrected Adam update. Throws on non-finite gradients.
void adam_step(std::vector<double>& params, const std::vector<double>& grads,
               AdamState& state);

/// Plateau schedule on a (smoothed) loss signal.
struct ScheduleState {
    double best_loss = std::numeric_limits<double>::infinity();
    int steps_since_improvement = 0;
    double factor = 0.5;
    int patience = 200;
    double min_lr = 1e-5;
    double improvement_threshold = 1e-4;
};

void schedule_update(ScheduleState& state, double loss, double& lr);

struct TrainRecord {
    long step;
    double loss;
    double lr;
};

struct EvalRecord {
    long step;
    std::string split;  // "train" or "test"
    double metric_cm;
};

struct TrainLog {
    std::vector<TrainRecord> steps;
    std::vector<EvalRecord> evals;

    void save_csv(const std::string& path) const;
    static TrainLog load_csv(const std::string& path);
};

struct TrainOptions {
    long epochs = 10;
    long max_steps = 2000;  // 0 = no cap
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
    long eval_interval = 500;       // 0 = only first/last
    long checkpoint_interval = 0;   // 0 = off
    std::string checkpoint_dir;    // used when checkpoint_interval > 0
};

/// Mean Euclidean distance in cm over a split, in original units.
double evaluate_mean_cm(const Model& model, const std::vector<PointCloud>& norm_frames,
                        const std::vector<PointCloud>& orig_frames,
                        std::vector<double>* per_frame = nullptr);

/// Batch-size-1 training with per-epoch seeded reshuffling. Evaluation
/// rows are appended at step 0, every eval_interval steps, and at the end.
TrainLog train(Model& model, const std::vector<PointCloud>& train_norm,
               const std::vector<PointCloud>& train_orig,
               const std::vector<PointCloud>& test_norm,
               const std::vector<PointCloud>& test_orig, const TrainOptions& opts);

}  // namespace qae3d
