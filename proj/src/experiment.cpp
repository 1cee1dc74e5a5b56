#include "qae3d/experiment.hpp"

#include <cmath>
#include <stdexcept>

#include "qae3d/baselines.hpp"

namespace qae3d {

PreparedData prepare_data(const MotionDataset& dataset, const TrainConfig& config) {
    MotionDataset working = dataset;
    if (config.fps > 0.0) working.fps = config.fps;
    if (!config.joints.empty()) working = select_joints(working, config.joints);

    PreparedData data;
    data.n_vertices = working.n_vertices();
    if (data.n_vertices < 1) throw std::runtime_error("dataset has no vertices");
    const int derived_n = qubits_for_vertices(data.n_vertices);
    data.n_qubits = config.n_qubits > 0 ? config.n_qubits : derived_n;
    if (data.n_qubits < derived_n)
        throw std::runtime_error("config key 'n_qubits': too small for vertex count");
    if (config.n_discard >= data.n_qubits)
        throw std::runtime_error("config key 'n_discard': must be below n_qubits");

    // Box fitted on the full dataset before splitting.
    data.norm = compute_normalization(working);
    const MotionDataset normalized = normalize_dataset(working, data.norm);

    SplitSpec spec{config.train_seconds, config.test_seconds};
    auto [train_orig, test_orig] = chunked_split(working, spec);
    auto [train_norm, test_norm] = chunked_split(normalized, spec);
    data.train_orig = std::move(train_orig.frames);
    data.test_orig = std::move(test_orig.frames);
    data.train_norm = std::move(train_norm.frames);
    data.test_norm = std::move(test_norm.frames);
    if (data.train_norm.empty()) throw std::runtime_error("training split is empty");
    return data;
}

std::unique_ptr<Model> build_model(const TrainConfig& config, const PreparedData& data) {
    validate_config(config);
    QuantumModelConfig qc;
    qc.block_kind = block_kind_from_name(config.block_kind);
    qc.architecture = architecture_from_name(config.architecture);
    qc.init = init_scheme_from_name(config.init);
    qc.blocks = config.blocks;
    qc.n_qubits = data.n_qubits;
    qc.n_discard = config.n_discard;
    qc.n_vertices = data.n_vertices;
    qc.bottleneck = bottleneck_from_name(config.bottleneck);
    qc.seed = config.seed;

    std::unique_ptr<Model> model;
    if (config.model == "quantum") {
        model = std::make_unique<QuantumModel>(qc);
    } else if (config.model == "constant") {
        model = std::make_unique<ConstantModel>(
            ConstantModel::fit(data.train_orig, data.norm));
    } else if (config.model == "mimic") {
        model = std::make_unique<MimicModel>(data.n_qubits, config.n_discard,
                                             data.n_vertices, config.seed);
    } else if (config.model == "fc") {
        const int latent = 1 << (data.n_qubits - config.n_discard);
        int rank = config.fc_rank;
        if (config.fc_match_params > 0)
            rank = FullyConnectedModel::match_rank(config.fc_match_params,
                                                   data.n_vertices, latent);
        model = std::make_unique<FullyConnectedModel>(data.n_vertices, latent, rank,
                                                      config.seed);
    } else if (config.model == "qecd") {
        model = std::make_unique<HybridModel>(HybridKind::QuantumEncoder, qc);
    } else if (config.model == "ceqd") {
        model = std::make_unique<HybridModel>(HybridKind::QuantumDecoder, qc);
    } else {
        throw std::runtime_error("unknown model kind: " + config.model);
    }
    model->set_normalization(data.norm);
    return model;
}

TrainOptions train_options_from_config(const TrainConfig& config) {
    TrainOptions opts;
    opts.epochs = config.epochs;
    opts.max_steps = config.max_steps;
    opts.lr = config.lr;
    opts.beta1 = config.beta1;
    opts.beta2 = config.beta2;
    opts.eps = config.eps;
    opts.sched_factor = config.sched_factor;
    opts.sched_patience = config.sched_patience;
    opts.sched_min_lr = config.sched_min_lr;
    opts.sched_threshold = config.sched_threshold;
    opts.ema_decay = config.ema_decay;
    opts.seed = config.seed;
    opts.eval_interval = config.eval_interval;
    opts.checkpoint_interval = config.checkpoint_interval;
    opts.checkpoint_dir = config.out;
    return opts;
}

ExperimentResult run_experiment(const MotionDataset& dataset, const TrainConfig& config) {
    const PreparedData data = prepare_data(dataset, config);
    ExperimentResult result;
    result.model = build_model(config, data);
    result.param_count = result.model->param_count();
    result.log = train(*result.model, data.train_norm, data.train_orig, data.test_norm,
                       data.test_orig, train_options_from_config(config));
    result.final_train_cm = evaluate_mean_cm(*result.model, data.train_norm, data.train_orig);
    result.final_test_cm = data.test_norm.empty()
                               ? 0.0
                               : evaluate_mean_cm(*result.model, data.test_norm,
                                                  data.test_orig);
    return result;
}

}  // namespace qae3d
