#pragma once

#include <memory>

#include "qae3d/config.hpp"
#include "qae3d/data.hpp"
#include "qae3d/training.hpp"

namespace qae3d {

/// Joint-selected, normalised, chunk-split dataset plus everything the
/// model builder needs.
struct PreparedData {
    NormalizationParams norm;
    int n_vertices = 0;
    int n_qubits = 0;
    std::vector<PointCloud> train_orig, test_orig;
    std::vector<PointCloud> train_norm, test_norm;
};

PreparedData prepare_data(const MotionDataset& dataset, const TrainConfig& config);

/// Builds the model named by config.model with consistent sizes; the
/// constant baseline is fitted on the training split.
std::unique_ptr<Model> build_model(const TrainConfig& config, const PreparedData& data);

struct ExperimentResult {
    std::unique_ptr<Model> model;
    TrainLog log;
    double final_train_cm = 0.0;
    double final_test_cm = 0.0;
    int param_count = 0;
};

TrainOptions train_options_from_config(const TrainConfig& config);

/// Full run on an already-loaded dataset: prepare, build, train, evaluate.
ExperimentResult run_experiment(const MotionDataset& dataset, const TrainConfig& config);

}  // namespace qae3d
