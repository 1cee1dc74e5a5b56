#include "qae3d/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "adjoint.hpp"
#include "json.hpp"
#include "qae3d/baselines.hpp"
#include "qae3d/loss.hpp"
#include "qae3d/rng.hpp"

namespace qae3d {

const char* bottleneck_name(BottleneckKind kind) {
    return kind == BottleneckKind::Marginalise ? "marginalise" : "elu";
}

BottleneckKind bottleneck_from_name(const std::string& name) {
    if (name == "marginalise") return BottleneckKind::Marginalise;
    if (name == "elu") return BottleneckKind::SubvectorElu;
    throw std::invalid_argument("unknown bottleneck kind: " + name);
}

namespace {

void check_quantum_config(const QuantumModelConfig& c) {
    if (c.n_discard <= 0 || c.n_discard >= c.n_qubits)
        throw std::invalid_argument("need 0 < N_B < N");
    if (4 * std::int64_t{c.n_vertices} > (std::int64_t{1} << c.n_qubits))
        throw std::invalid_argument("4V exceeds 2^N");
    if (c.blocks < 1) throw std::invalid_argument("need at least one block");
}

nlohmann::json quantum_config_json(const QuantumModelConfig& c) {
    nlohmann::json j;
    j["block_kind"] = block_kind_name(c.block_kind);
    j["architecture"] = architecture_name(c.architecture);
    j["init"] = init_scheme_name(c.init);
    j["blocks"] = c.blocks;
    j["n_qubits"] = c.n_qubits;
    j["n_discard"] = c.n_discard;
    j["n_vertices"] = c.n_vertices;
    j["bottleneck"] = bottleneck_name(c.bottleneck);
    j["seed"] = c.seed;
    return j;
}

QuantumModelConfig quantum_config_from_json(const nlohmann::json& j) {
    QuantumModelConfig c;
    c.block_kind = block_kind_from_name(j.at("block_kind").get<std::string>());
    c.architecture = architecture_from_name(j.at("architecture").get<std::string>());
    c.init = init_scheme_from_name(j.at("init").get<std::string>());
    c.blocks = j.at("blocks").get<int>();
    c.n_qubits = j.at("n_qubits").get<int>();
    c.n_discard = j.at("n_discard").get<int>();
    c.n_vertices = j.at("n_vertices").get<int>();
    c.bottleneck = bottleneck_from_name(j.at("bottleneck").get<std::string>());
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
}

nlohmann::json normalization_json(const NormalizationParams& p) {
    return {{"v_min", {p.v_min[0], p.v_min[1], p.v_min[2]}}, {"scale", p.scale}};
}

NormalizationParams normalization_from_json(const nlohmann::json& j) {
    NormalizationParams p;
    const auto& v = j.at("v_min");
    p.v_min = {v.at(0).get<double>(), v.at(1).get<double>(), v.at(2).get<double>()};
    p.scale = j.at("scale").get<double>();
    return p;
}

}  // namespace

QuantumModel::QuantumModel(const QuantumModelConfig& config) : config_(config) {
    check_quantum_config(config);
    n_vertices_ = config.n_vertices;
    const auto kept = default_kept_set(config.n_qubits, config.n_discard);
    const auto discarded = default_discarded_set(config.n_qubits, config.n_discard);
    std::tie(encoder_, enc_params_) =
        build_circuit(config.blocks, config.block_kind, config.architecture, config.init,
                      config.n_qubits, kept, discarded,
                      substream_seed(config.seed, "encoder-init"));
    std::tie(decoder_, dec_params_) =
        build_circuit(config.blocks, config.block_kind, config.architecture, config.init,
                      config.n_qubits, kept, discarded,
                      substream_seed(config.seed, "decoder-init"));
}

ForwardOutput QuantumModel::forward(const PointCloud& pc_norm) const {
    const StateVector psi_in = encode_point_cloud(pc_norm, config_.n_qubits);
    const StateVector phi = apply_circuit(psi_in, encoder_, enc_params_);
    ForwardOutput out;
    StateVector restate;
    if (config_.bottleneck == BottleneckKind::Marginalise) {
        auto mid = detail::marginalise_forward(phi, config_.n_discard);
        out.latent = mid.probs;
        restate = std::move(mid.restate);
    } else {
        auto mid = detail::elu_bottleneck_forward(phi, config_.n_discard);
        out.latent = mid.normalized;
        restate = std::move(mid.restate);
    }
    const StateVector xi = apply_circuit(restate, decoder_, dec_params_);
    out.alpha = readout(xi);
    return out;
}

int QuantumModel::param_count() const {
    return encoder_.param_count + decoder_.param_count;
}

std::vector<double> QuantumModel::parameters() const {
    std::vector<double> all = enc_params_;
    all.insert(all.end(), dec_params_.begin(), dec_params_.end());
    return all;
}

void QuantumModel::set_parameters(const std::vector<double>& values) {
    if (static_cast<int>(values.size()) != param_count())
        throw std::invalid_argument("parameter count mismatch");
    std::copy(values.begin(), values.begin() + encoder_.param_count, enc_params_.begin());
    std::copy(values.begin() + encoder_.param_count, values.end(), dec_params_.begin());
}

PointCloud QuantumModel::predict_normalized(const PointCloud& pc_norm) const {
    const ForwardOutput out = forward(pc_norm);
    const double s = std::sqrt(3.0 * n_vertices_);
    PointCloud pred;
    pred.reserve(n_vertices_);
    for (int i = 0; i < n_vertices_; ++i)
        pred.push_back({out.alpha[3 * i] * s, out.alpha[3 * i + 1] * s,
                        out.alpha[3 * i + 2] * s});
    return pred;
}

double QuantumModel::loss(const PointCloud& pc_norm) const {
    return reconstruction_loss(forward(pc_norm).alpha, pc_norm, config_.n_qubits);
}

double QuantumModel::loss_and_gradient(const PointCloud& pc_norm,
                                       std::vector<double>& grad) const {
    grad.assign(param_count(), 0.0);

    const StateVector psi_in = encode_point_cloud(pc_norm, config_.n_qubits);
    const auto enc_tape = detail::run_circuit_taped(psi_in, encoder_, enc_params_);
    const StateVector& phi = enc_tape.back();

    std::vector<double> probs;
    detail::EluBottleneckResult elu_fwd;
    StateVector restate;
    if (config_.bottleneck == BottleneckKind::Marginalise) {
        auto mid = detail::marginalise_forward(phi, config_.n_discard);
        probs = std::move(mid.probs);
        restate = std::move(mid.restate);
    } else {
        elu_fwd = detail::elu_bottleneck_forward(phi, config_.n_discard);
        restate = elu_fwd.restate;
    }

    const auto dec_tape = detail::run_circuit_taped(restate, decoder_, dec_params_);
    const StateVector& xi = dec_tape.back();
    const std::vector<double> alpha = readout(xi);

    std::vector<double> d_alpha;
    const double loss_value =
        reconstruction_loss_grad(alpha, pc_norm, config_.n_qubits, d_alpha);

    StateVector cot = detail::readout_cotangent(xi, d_alpha);
    cot = detail::backprop_circuit(decoder_, dec_params_, dec_tape, std::move(cot),
                                   grad.data() + encoder_.param_count);
    StateVector g_phi =
        config_.bottleneck == BottleneckKind::Marginalise
            ? detail::marginalise_backward(cot, probs, phi, config_.n_discard)
            : detail::elu_bottleneck_backward(cot, elu_fwd, phi, config_.n_discard);
    detail::backprop_circuit(encoder_, enc_params_, enc_tape, std::move(g_phi), grad.data());

    for (double g : grad)
        if (!std::isfinite(g)) throw std::runtime_error("non-finite gradient");
    return loss_value;
}

std::string QuantumModel::checkpoint_json() const {
    nlohmann::json j;
    j["format"] = "qae3d-checkpoint";
    j["model"] = kind_name();
    j["arch"] = quantum_config_json(config_);
    j["normalization"] = normalization_json(norm_);
    j["encoder_params"] = enc_params_;
    j["decoder_params"] = dec_params_;
    return j.dump(2);
}

namespace {

std::unique_ptr<Model> load_quantum(const nlohmann::json& j) {
    auto model = std::make_unique<QuantumModel>(quantum_config_from_json(j.at("arch")));
    std::vector<double> params = j.at("encoder_params").get<std::vector<double>>();
    const auto dec = j.at("decoder_params").get<std::vector<double>>();
    params.insert(params.end(), dec.begin(), dec.end());
    model->set_parameters(params);
    return model;
}

std::unique_ptr<Model> load_constant(const nlohmann::json& j) {
    PointCloud mean;
    for (const auto& v : j.at("mean_vertices"))
        mean.push_back({v.at(0).get<double>(), v.at(1).get<double>(), v.at(2).get<double>()});
    return std::make_unique<ConstantModel>(
        std::move(mean), normalization_from_json(j.at("normalization")));
}

std::unique_ptr<Model> load_mimic(const nlohmann::json& j) {
    const auto& arch = j.at("arch");
    auto model = std::make_unique<MimicModel>(
        arch.at("n_qubits").get<int>(), arch.at("n_discard").get<int>(),
        arch.at("n_vertices").get<int>(), arch.at("seed").get<std::uint64_t>());
    model->set_parameters(j.at("params").get<std::vector<double>>());
    return model;
}

std::unique_ptr<Model> load_fc(const nlohmann::json& j) {
    const auto& arch = j.at("arch");
    auto model = std::make_unique<FullyConnectedModel>(
        arch.at("n_vertices").get<int>(), arch.at("latent_size").get<int>(),
        arch.at("rank").get<int>(), arch.at("seed").get<std::uint64_t>());
    model->set_parameters(j.at("params").get<std::vector<double>>());
    return model;
}

std::unique_ptr<Model> load_hybrid(const nlohmann::json& j, HybridKind kind) {
    auto model = std::make_unique<HybridModel>(
        kind, quantum_config_from_json(j.at("arch")));
    model->set_parameters(j.at("params").get<std::vector<double>>());
    return model;
}

}  // namespace

std::unique_ptr<Model> load_checkpoint_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    if (j.value("format", "") != "qae3d-checkpoint")
        throw std::runtime_error("not a qae3d checkpoint");
    const std::string kind = j.at("model").get<std::string>();
    std::unique_ptr<Model> model;
    if (kind == "quantum")
        model = load_quantum(j);
    else if (kind == "constant")
        model = load_constant(j);
    else if (kind == "mimic")
        model = load_mimic(j);
    else if (kind == "fc")
        model = load_fc(j);
    else if (kind == "hybrid_qe_cd")
        model = load_hybrid(j, HybridKind::QuantumEncoder);
    else if (kind == "hybrid_ce_qd")
        model = load_hybrid(j, HybridKind::QuantumDecoder);
    else
        throw std::runtime_error("unknown model kind in checkpoint: " + kind);
    if (j.contains("normalization"))
        model->set_normalization(normalization_from_json(j.at("normalization")));
    return model;
}

std::unique_ptr<Model> load_checkpoint_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return load_checkpoint_json(buffer.str());
}

void save_checkpoint_file(const Model& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
    out << model.checkpoint_json() << "\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace qae3d
