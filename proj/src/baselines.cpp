#include "qae3d/baselines.hpp"

#include <cmath>
#include <stdexcept>

#include "adjoint.hpp"
#include "json.hpp"
#include "qae3d/loss.hpp"
#include "qae3d/rng.hpp"

namespace qae3d {

double elu(double x) { return x > 0.0 ? x : std::expm1(x); }

double elu_deriv(double x) { return x > 0.0 ? 1.0 : std::exp(x); }

DenseLayer DenseLayer::random_init(int rows, int cols, bool normalize_output,
                                   std::uint64_t seed, const char* stream) {
    DenseLayer layer;
    layer.rows = rows;
    layer.cols = cols;
    layer.normalize_output = normalize_output;
    layer.weights.resize(static_cast<std::size_t>(rows) * cols);
    std::mt19937_64 rng = substream_rng(seed, stream);
    const double bound = 1.0 / std::sqrt(static_cast<double>(cols));
    std::uniform_real_distribution<double> uni(-bound, bound);
    for (double& w : layer.weights) w = uni(rng);
    return layer;
}

std::vector<double> DenseLayer::forward(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != cols)
        throw std::invalid_argument("dense layer input dimension mismatch");
    std::vector<double> y(rows, 0.0);
    for (int r = 0; r < rows; ++r) {
        double acc = 0.0;
        const double* row = weights.data() + static_cast<std::size_t>(r) * cols;
        for (int c = 0; c < cols; ++c) acc += row[c] * x[c];
        y[r] = acc;
    }
    if (normalize_output) {
        double n = 0.0;
        for (double v : y) n += v * v;
        n = std::sqrt(n);
        if (n < 1e-300) throw std::runtime_error("degenerate weights: all-zero output");
        for (double& v : y) v /= n;
    }
    return y;
}

namespace {

struct NormDenseTape {
    std::vector<double> raw;  // W x before normalisation
    double norm = 0.0;
    std::vector<double> out;
};

NormDenseTape norm_dense_forward(const DenseLayer& layer, const std::vector<double>& x) {
    NormDenseTape tape;
    tape.raw.assign(layer.rows, 0.0);
    for (int r = 0; r < layer.rows; ++r) {
        double acc = 0.0;
        const double* row = layer.weights.data() + static_cast<std::size_t>(r) * layer.cols;
        for (int c = 0; c < layer.cols; ++c) acc += row[c] * x[c];
        tape.raw[r] = acc;
    }
    double n = 0.0;
    for (double v : tape.raw) n += v * v;
    tape.norm = std::sqrt(n);
    if (tape.norm < 1e-300) throw std::runtime_error("degenerate weights: all-zero output");
    tape.out.resize(layer.rows);
    for (int r = 0; r < layer.rows; ++r) tape.out[r] = tape.raw[r] / tape.norm;
    return tape;
}

// Adds dL/dW into dw (row-major) and returns dL/dx.
std::vector<double> norm_dense_backward(const DenseLayer& layer,
                                        const std::vector<double>& x,
                                        const NormDenseTape& tape,
                                        const std::vector<double>& g_out, double* dw) {
    std::vector<double> g_raw(layer.rows);
    double dot = 0.0;
    for (int r = 0; r < layer.rows; ++r) dot += g_out[r] * tape.out[r];
    for (int r = 0; r < layer.rows; ++r)
        g_raw[r] = (g_out[r] - dot * tape.out[r]) / tape.norm;

    std::vector<double> g_x(layer.cols, 0.0);
    for (int r = 0; r < layer.rows; ++r) {
        const double* row = layer.weights.data() + static_cast<std::size_t>(r) * layer.cols;
        double* dw_row = dw + static_cast<std::size_t>(r) * layer.cols;
        for (int c = 0; c < layer.cols; ++c) {
            dw_row[c] += g_raw[r] * x[c];
            g_x[c] += row[c] * g_raw[r];
        }
    }
    return g_x;
}

// Plain (unnormalised) dense backward.
std::vector<double> dense_backward(const DenseLayer& layer, const std::vector<double>& x,
                                   const std::vector<double>& g_out, double* dw) {
    std::vector<double> g_x(layer.cols, 0.0);
    for (int r = 0; r < layer.rows; ++r) {
        const double* row = layer.weights.data() + static_cast<std::size_t>(r) * layer.cols;
        double* dw_row = dw + static_cast<std::size_t>(r) * layer.cols;
        for (int c = 0; c < layer.cols; ++c) {
            dw_row[c] += g_out[r] * x[c];
            g_x[c] += row[c] * g_out[r];
        }
    }
    return g_x;
}

double sign_or_zero(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

std::vector<double> flat_coords(const PointCloud& pc) {
    std::vector<double> x;
    x.reserve(pc.size() * 3);
    for (const Vec3& v : pc) {
        x.push_back(v[0]);
        x.push_back(v[1]);
        x.push_back(v[2]);
    }
    return x;
}

PointCloud alpha_to_normalized(const std::vector<double>& alpha, int n_vertices) {
    const double s = std::sqrt(3.0 * n_vertices);
    PointCloud pred;
    pred.reserve(n_vertices);
    for (int i = 0; i < n_vertices; ++i)
        pred.push_back({alpha[3 * i] * s, alpha[3 * i + 1] * s, alpha[3 * i + 2] * s});
    return pred;
}

nlohmann::json norm_json(const NormalizationParams& p) {
    return {{"v_min", {p.v_min[0], p.v_min[1], p.v_min[2]}}, {"scale", p.scale}};
}

}  // namespace

// ---------------------------------------------------------------- Constant

ConstantModel::ConstantModel(PointCloud mean, const NormalizationParams& norm)
    : mean_(std::move(mean)) {
    n_vertices_ = static_cast<int>(mean_.size());
    norm_ = norm;
}

ConstantModel ConstantModel::fit(const std::vector<PointCloud>& train_frames,
                                 const NormalizationParams& norm) {
    if (train_frames.empty()) throw std::invalid_argument("empty training set");
    const std::size_t v_count = train_frames.front().size();
    PointCloud mean(v_count, Vec3{0.0, 0.0, 0.0});
    for (const PointCloud& pc : train_frames) {
        if (pc.size() != v_count) throw std::invalid_argument("vertex count mismatch");
        for (std::size_t i = 0; i < v_count; ++i)
            for (int a = 0; a < 3; ++a) mean[i][a] += pc[i][a];
    }
    const double inv = 1.0 / static_cast<double>(train_frames.size());
    for (Vec3& v : mean)
        for (int a = 0; a < 3; ++a) v[a] *= inv;
    return ConstantModel(std::move(mean), norm);
}

void ConstantModel::set_parameters(const std::vector<double>& values) {
    if (!values.empty()) throw std::invalid_argument("constant baseline has no parameters");
}

PointCloud ConstantModel::predict_normalized(const PointCloud&) const {
    return normalize_cloud(mean_, norm_);
}

double ConstantModel::loss(const PointCloud& pc_norm) const {
    return vertex_loss(flat_coords(predict_normalized(pc_norm)), pc_norm);
}

double ConstantModel::loss_and_gradient(const PointCloud& pc_norm,
                                        std::vector<double>& grad) const {
    grad.clear();
    return loss(pc_norm);
}

std::string ConstantModel::checkpoint_json() const {
    nlohmann::json j;
    j["format"] = "qae3d-checkpoint";
    j["model"] = kind_name();
    nlohmann::json verts = nlohmann::json::array();
    for (const Vec3& v : mean_) verts.push_back({v[0], v[1], v[2]});
    j["mean_vertices"] = verts;
    j["normalization"] = norm_json(norm_);
    return j.dump(2);
}

// ------------------------------------------------------------------- Mimic

MimicModel::MimicModel(int n_qubits_in, int n_discard_in, int n_vertices_in,
                       std::uint64_t seed_in)
    : n_qubits(n_qubits_in), n_discard(n_discard_in), seed(seed_in) {
    if (n_discard <= 0 || n_discard >= n_qubits)
        throw std::invalid_argument("need 0 < N_B < N");
    n_vertices_ = n_vertices_in;
    const int dim = 1 << n_qubits;
    encoder = DenseLayer::random_init(dim, dim, true, seed, "dense-encoder-init");
    decoder = DenseLayer::random_init(dim, dim, true, seed, "dense-decoder-init");
}

ForwardOutput MimicModel::forward(const PointCloud& pc_norm) const {
    const std::vector<double> psi = encode_target_amplitudes(pc_norm, n_qubits);
    const std::vector<double> y1 = encoder.forward(psi);
    const std::size_t dim_b = std::size_t{1} << n_discard;
    const std::size_t dim_a = y1.size() >> n_discard;
    ForwardOutput out;
    out.latent.assign(dim_a, 0.0);
    for (std::size_t a = 0; a < dim_a; ++a)
        for (std::size_t b = 0; b < dim_b; ++b)
            out.latent[a] += y1[a * dim_b + b] * y1[a * dim_b + b];
    std::vector<double> restate(y1.size(), 0.0);
    for (std::size_t a = 0; a < dim_a; ++a)
        restate[a * dim_b] = std::sqrt(out.latent[a]);
    const std::vector<double> y2 = decoder.forward(restate);
    out.alpha.resize(y2.size());
    for (std::size_t i = 0; i < y2.size(); ++i) out.alpha[i] = std::abs(y2[i]);
    return out;
}

int MimicModel::param_count() const {
    return static_cast<int>(encoder.weights.size() + decoder.weights.size());
}

std::vector<double> MimicModel::parameters() const {
    std::vector<double> all = encoder.weights;
    all.insert(all.end(), decoder.weights.begin(), decoder.weights.end());
    return all;
}

void MimicModel::set_parameters(const std::vector<double>& values) {
    if (values.size() != encoder.weights.size() + decoder.weights.size())
        throw std::invalid_argument("parameter count mismatch");
    std::copy(values.begin(), values.begin() + encoder.weights.size(),
              encoder.weights.begin());
    std::copy(values.begin() + encoder.weights.size(), values.end(),
              decoder.weights.begin());
}

PointCloud MimicModel::predict_normalized(const PointCloud& pc_norm) const {
    return alpha_to_normalized(forward(pc_norm).alpha, n_vertices_);
}

double MimicModel::loss(const PointCloud& pc_norm) const {
    return reconstruction_loss(forward(pc_norm).alpha, pc_norm, n_qubits);
}

double MimicModel::loss_and_gradient(const PointCloud& pc_norm,
                                     std::vector<double>& grad) const {
    grad.assign(param_count(), 0.0);
    double* d_enc = grad.data();
    double* d_dec = grad.data() + encoder.weights.size();

    const std::vector<double> psi = encode_target_amplitudes(pc_norm, n_qubits);
    const NormDenseTape enc_tape = norm_dense_forward(encoder, psi);
    const std::vector<double>& y1 = enc_tape.out;

    const std::size_t dim_b = std::size_t{1} << n_discard;
    const std::size_t dim_a = y1.size() >> n_discard;
    std::vector<double> probs(dim_a, 0.0);
    for (std::size_t a = 0; a < dim_a; ++a)
        for (std::size_t b = 0; b < dim_b; ++b)
            probs[a] += y1[a * dim_b + b] * y1[a * dim_b + b];
    std::vector<double> restate(y1.size(), 0.0);
    for (std::size_t a = 0; a < dim_a; ++a) restate[a * dim_b] = std::sqrt(probs[a]);

    const NormDenseTape dec_tape = norm_dense_forward(decoder, restate);
    const std::vector<double>& y2 = dec_tape.out;
    std::vector<double> alpha(y2.size());
    for (std::size_t i = 0; i < y2.size(); ++i) alpha[i] = std::abs(y2[i]);

    std::vector<double> d_alpha;
    const double loss_value = reconstruction_loss_grad(alpha, pc_norm, n_qubits, d_alpha);

    std::vector<double> g_y2(y2.size());
    for (std::size_t i = 0; i < y2.size(); ++i) g_y2[i] = d_alpha[i] * sign_or_zero(y2[i]);
    const std::vector<double> g_restate =
        norm_dense_backward(decoder, restate, dec_tape, g_y2, d_dec);

    std::vector<double> g_y1(y1.size(), 0.0);
    for (std::size_t a = 0; a < dim_a; ++a) {
        const double dp = g_restate[a * dim_b] * 0.5 /
                          std::sqrt(std::max(probs[a], detail::kGradClamp));
        for (std::size_t b = 0; b < dim_b; ++b)
            g_y1[a * dim_b + b] = 2.0 * dp * y1[a * dim_b + b];
    }
    norm_dense_backward(encoder, psi, enc_tape, g_y1, d_enc);
    return loss_value;
}

std::string MimicModel::checkpoint_json() const {
    nlohmann::json j;
    j["format"] = "qae3d-checkpoint";
    j["model"] = kind_name();
    j["arch"] = {{"n_qubits", n_qubits},
                 {"n_discard", n_discard},
                 {"n_vertices", n_vertices_},
                 {"seed", seed}};
    j["params"] = parameters();
    j["normalization"] = norm_json(norm_);
    return j.dump(2);
}

// --------------------------------------------------------- Fully connected

FullyConnectedModel::FullyConnectedModel(int n_vertices_in, int latent_size, int rank,
                                         std::uint64_t seed)
    : latent_size_(latent_size), rank_(rank), seed_(seed) {
    if (latent_size < 1) throw std::invalid_argument("latent size must be positive");
    if (rank < 0) throw std::invalid_argument("rank must be nonnegative");
    n_vertices_ = n_vertices_in;
    const int in_dim = 3 * n_vertices_in;
    if (rank == 0) {
        layers_.push_back(
            DenseLayer::random_init(latent_size, in_dim, false, seed, "fc-encoder-init"));
        layers_.push_back(
            DenseLayer::random_init(in_dim, latent_size, false, seed, "fc-decoder-init"));
    } else {
        layers_.push_back(
            DenseLayer::random_init(latent_size, rank, false, seed, "fc-enc-p-init"));
        layers_.push_back(
            DenseLayer::random_init(rank, in_dim, false, seed, "fc-enc-q-init"));
        layers_.push_back(
            DenseLayer::random_init(in_dim, rank, false, seed, "fc-dec-p-init"));
        layers_.push_back(
            DenseLayer::random_init(rank, latent_size, false, seed, "fc-dec-q-init"));
    }
}

std::vector<double> FullyConnectedModel::forward_coords(const PointCloud& pc_norm) const {
    std::vector<double> x = flat_coords(pc_norm);
    std::vector<double> h;
    if (rank_ == 0)
        h = layers_[0].forward(x);
    else
        h = layers_[0].forward(layers_[1].forward(x));
    for (double& v : h) v = elu(v);
    if (rank_ == 0) return layers_[1].forward(h);
    return layers_[2].forward(layers_[3].forward(h));
}

int FullyConnectedModel::param_count() const {
    std::size_t total = 0;
    for (const DenseLayer& l : layers_) total += l.weights.size();
    return static_cast<int>(total);
}

std::vector<double> FullyConnectedModel::parameters() const {
    std::vector<double> all;
    for (const DenseLayer& l : layers_)
        all.insert(all.end(), l.weights.begin(), l.weights.end());
    return all;
}

void FullyConnectedModel::set_parameters(const std::vector<double>& values) {
    if (static_cast<int>(values.size()) != param_count())
        throw std::invalid_argument("parameter count mismatch");
    std::size_t offset = 0;
    for (DenseLayer& l : layers_) {
        std::copy(values.begin() + offset, values.begin() + offset + l.weights.size(),
                  l.weights.begin());
        offset += l.weights.size();
    }
}

PointCloud FullyConnectedModel::predict_normalized(const PointCloud& pc_norm) const {
    const std::vector<double> out = forward_coords(pc_norm);
    PointCloud pred;
    pred.reserve(n_vertices_);
    for (int i = 0; i < n_vertices_; ++i)
        pred.push_back({out[3 * i], out[3 * i + 1], out[3 * i + 2]});
    return pred;
}

double FullyConnectedModel::loss(const PointCloud& pc_norm) const {
    return vertex_loss(forward_coords(pc_norm), pc_norm);
}

double FullyConnectedModel::loss_and_gradient(const PointCloud& pc_norm,
                                              std::vector<double>& grad) const {
    grad.assign(param_count(), 0.0);
    std::vector<double*> dw;
    std::size_t offset = 0;
    for (const DenseLayer& l : layers_) {
        dw.push_back(grad.data() + offset);
        offset += l.weights.size();
    }

    const std::vector<double> x = flat_coords(pc_norm);
    std::vector<double> enc_mid;  // rank path only
    std::vector<double> pre_act;
    if (rank_ == 0) {
        pre_act = layers_[0].forward(x);
    } else {
        enc_mid = layers_[1].forward(x);
        pre_act = layers_[0].forward(enc_mid);
    }
    std::vector<double> h = pre_act;
    for (double& v : h) v = elu(v);
    std::vector<double> dec_mid;
    std::vector<double> out;
    if (rank_ == 0) {
        out = layers_[1].forward(h);
    } else {
        dec_mid = layers_[3].forward(h);
        out = layers_[2].forward(dec_mid);
    }

    std::vector<double> d_out;
    const double loss_value = vertex_loss_grad(out, pc_norm, d_out);

    std::vector<double> g_h;
    if (rank_ == 0) {
        g_h = dense_backward(layers_[1], h, d_out, dw[1]);
    } else {
        const std::vector<double> g_dec_mid =
            dense_backward(layers_[2], dec_mid, d_out, dw[2]);
        g_h = dense_backward(layers_[3], h, g_dec_mid, dw[3]);
    }
    for (std::size_t i = 0; i < g_h.size(); ++i) g_h[i] *= elu_deriv(pre_act[i]);
    if (rank_ == 0) {
        dense_backward(layers_[0], x, g_h, dw[0]);
    } else {
        const std::vector<double> g_enc_mid =
            dense_backward(layers_[0], enc_mid, g_h, dw[0]);
        dense_backward(layers_[1], x, g_enc_mid, dw[1]);
    }
    return loss_value;
}

std::string FullyConnectedModel::checkpoint_json() const {
    nlohmann::json j;
    j["format"] = "qae3d-checkpoint";
    j["model"] = kind_name();
    j["arch"] = {{"n_vertices", n_vertices_},
                 {"latent_size", latent_size_},
                 {"rank", rank_},
                 {"seed", seed_}};
    j["params"] = parameters();
    j["normalization"] = norm_json(norm_);
    return j.dump(2);
}

int FullyConnectedModel::match_rank(int target_param_count, int n_vertices,
                                    int latent_size) {
    if (target_param_count <= 0) throw std::invalid_argument("target must be positive");
    const int per_rank = 2 * (3 * n_vertices + latent_size);
    const int lo = std::max(1, target_param_count / per_rank);
    const int err_lo = std::abs(lo * per_rank - target_param_count);
    const int err_hi = std::abs((lo + 1) * per_rank - target_param_count);
    return err_hi < err_lo ? lo + 1 : lo;
}

// ------------------------------------------------------------------ Hybrid

HybridModel::HybridModel(HybridKind hybrid, const QuantumModelConfig& quantum_config)
    : hybrid_(hybrid), quantum_config_(quantum_config) {
    if (quantum_config.n_discard <= 0 || quantum_config.n_discard >= quantum_config.n_qubits)
        throw std::invalid_argument("need 0 < N_B < N");
    n_vertices_ = quantum_config.n_vertices;
    const auto kept = default_kept_set(quantum_config.n_qubits, quantum_config.n_discard);
    const auto discarded =
        default_discarded_set(quantum_config.n_qubits, quantum_config.n_discard);
    const char* circuit_stream =
        hybrid == HybridKind::QuantumEncoder ? "encoder-init" : "decoder-init";
    const char* dense_stream =
        hybrid == HybridKind::QuantumEncoder ? "dense-decoder-init" : "dense-encoder-init";
    std::tie(circuit_, circuit_params_) = build_circuit(
        quantum_config.blocks, quantum_config.block_kind, quantum_config.architecture,
        quantum_config.init, quantum_config.n_qubits, kept, discarded,
        substream_seed(quantum_config.seed, circuit_stream));
    const int dim = 1 << quantum_config.n_qubits;
    dense_ = DenseLayer::random_init(dim, dim, true, quantum_config.seed, dense_stream);
}

const char* HybridModel::kind_name() const {
    return hybrid_ == HybridKind::QuantumEncoder ? "hybrid_qe_cd" : "hybrid_ce_qd";
}

ForwardOutput HybridModel::forward(const PointCloud& pc_norm) const {
    const int nb = quantum_config_.n_discard;
    ForwardOutput out;
    if (hybrid_ == HybridKind::QuantumEncoder) {
        const StateVector psi_in = encode_point_cloud(pc_norm, quantum_config_.n_qubits);
        const StateVector phi = apply_circuit(psi_in, circuit_, circuit_params_);
        out.latent = marginal_probabilities(phi, nb);
        std::vector<double> restate(phi.dim(), 0.0);
        const std::size_t dim_b = std::size_t{1} << nb;
        for (std::size_t a = 0; a < out.latent.size(); ++a)
            restate[a * dim_b] = std::sqrt(out.latent[a]);
        const std::vector<double> y = dense_.forward(restate);
        out.alpha.resize(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) out.alpha[i] = std::abs(y[i]);
    } else {
        const std::vector<double> psi =
            encode_target_amplitudes(pc_norm, quantum_config_.n_qubits);
        const std::vector<double> y1 = dense_.forward(psi);
        const std::size_t dim_b = std::size_t{1} << nb;
        const std::size_t dim_a = y1.size() >> nb;
        out.latent.assign(dim_a, 0.0);
        for (std::size_t a = 0; a < dim_a; ++a)
            for (std::size_t b = 0; b < dim_b; ++b)
                out.latent[a] += y1[a * dim_b + b] * y1[a * dim_b + b];
        StateVector restate(quantum_config_.n_qubits);
        for (std::size_t a = 0; a < dim_a; ++a)
            restate.amplitudes[a * dim_b] = std::sqrt(out.latent[a]);
        const StateVector xi = apply_circuit(restate, circuit_, circuit_params_);
        out.alpha = readout(xi);
    }
    return out;
}

int HybridModel::param_count() const {
    return circuit_.param_count + static_cast<int>(dense_.weights.size());
}

std::vector<double> HybridModel::parameters() const {
    std::vector<double> all = circuit_params_;
    all.insert(all.end(), dense_.weights.begin(), dense_.weights.end());
    return all;
}

void HybridModel::set_parameters(const std::vector<double>& values) {
    if (static_cast<int>(values.size()) != param_count())
        throw std::invalid_argument("parameter count mismatch");
    std::copy(values.begin(), values.begin() + circuit_.param_count,
              circuit_params_.begin());
    std::copy(values.begin() + circuit_.param_count, values.end(),
              dense_.weights.begin());
}

PointCloud HybridModel::predict_normalized(const PointCloud& pc_norm) const {
    return alpha_to_normalized(forward(pc_norm).alpha, n_vertices_);
}

double HybridModel::loss(const PointCloud& pc_norm) const {
    return reconstruction_loss(forward(pc_norm).alpha, pc_norm, quantum_config_.n_qubits);
}

double HybridModel::loss_and_gradient(const PointCloud& pc_norm,
                                      std::vector<double>& grad) const {
    grad.assign(param_count(), 0.0);
    double* d_circuit = grad.data();
    double* d_dense = grad.data() + circuit_.param_count;
    const int n = quantum_config_.n_qubits;
    const int nb = quantum_config_.n_discard;
    const std::size_t dim_b = std::size_t{1} << nb;

    if (hybrid_ == HybridKind::QuantumEncoder) {
        const StateVector psi_in = encode_point_cloud(pc_norm, n);
        const auto tape = detail::run_circuit_taped(psi_in, circuit_, circuit_params_);
        const StateVector& phi = tape.back();
        const auto mid = detail::marginalise_forward(phi, nb);
        std::vector<double> restate_real(phi.dim(), 0.0);
        for (std::size_t a = 0; a < mid.probs.size(); ++a)
            restate_real[a * dim_b] = std::real(mid.restate.amplitudes[a * dim_b]);
        const NormDenseTape dec_tape = norm_dense_forward(dense_, restate_real);
        std::vector<double> alpha(dec_tape.out.size());
        for (std::size_t i = 0; i < alpha.size(); ++i)
            alpha[i] = std::abs(dec_tape.out[i]);

        std::vector<double> d_alpha;
        const double loss_value = reconstruction_loss_grad(alpha, pc_norm, n, d_alpha);
        std::vector<double> g_y(alpha.size());
        for (std::size_t i = 0; i < alpha.size(); ++i)
            g_y[i] = d_alpha[i] * sign_or_zero(dec_tape.out[i]);
        const std::vector<double> g_restate =
            norm_dense_backward(dense_, restate_real, dec_tape, g_y, d_dense);
        StateVector restate_cot(n);
        for (std::size_t i = 0; i < g_restate.size(); ++i)
            restate_cot.amplitudes[i] = g_restate[i];
        StateVector g_phi = detail::marginalise_backward(restate_cot, mid.probs, phi, nb);
        detail::backprop_circuit(circuit_, circuit_params_, tape, std::move(g_phi),
                                 d_circuit);
        return loss_value;
    }

    const std::vector<double> psi = encode_target_amplitudes(pc_norm, n);
    const NormDenseTape enc_tape = norm_dense_forward(dense_, psi);
    const std::vector<double>& y1 = enc_tape.out;
    const std::size_t dim_a = y1.size() >> nb;
    std::vector<double> probs(dim_a, 0.0);
    for (std::size_t a = 0; a < dim_a; ++a)
        for (std::size_t b = 0; b < dim_b; ++b)
            probs[a] += y1[a * dim_b + b] * y1[a * dim_b + b];
    StateVector restate(n);
    for (std::size_t a = 0; a < dim_a; ++a)
        restate.amplitudes[a * dim_b] = std::sqrt(probs[a]);
    const auto tape = detail::run_circuit_taped(restate, circuit_, circuit_params_);
    const StateVector& xi = tape.back();
    const std::vector<double> alpha = readout(xi);

    std::vector<double> d_alpha;
    const double loss_value = reconstruction_loss_grad(alpha, pc_norm, n, d_alpha);
    StateVector cot = detail::readout_cotangent(xi, d_alpha);
    const StateVector g_restate = detail::backprop_circuit(
        circuit_, circuit_params_, tape, std::move(cot), d_circuit);
    std::vector<double> g_y1(y1.size(), 0.0);
    for (std::size_t a = 0; a < dim_a; ++a) {
        const double dp = std::real(g_restate.amplitudes[a * dim_b]) * 0.5 /
                          std::sqrt(std::max(probs[a], detail::kGradClamp));
        for (std::size_t b = 0; b < dim_b; ++b)
            g_y1[a * dim_b + b] = 2.0 * dp * y1[a * dim_b + b];
    }
    norm_dense_backward(dense_, psi, enc_tape, g_y1, d_dense);
    return loss_value;
}

std::string HybridModel::checkpoint_json() const {
    nlohmann::json j;
    j["format"] = "qae3d-checkpoint";
    j["model"] = kind_name();
    nlohmann::json arch;
    arch["block_kind"] = block_kind_name(quantum_config_.block_kind);
    arch["architecture"] = architecture_name(quantum_config_.architecture);
    arch["init"] = init_scheme_name(quantum_config_.init);
    arch["blocks"] = quantum_config_.blocks;
    arch["n_qubits"] = quantum_config_.n_qubits;
    arch["n_discard"] = quantum_config_.n_discard;
    arch["n_vertices"] = quantum_config_.n_vertices;
    arch["bottleneck"] = bottleneck_name(quantum_config_.bottleneck);
    arch["seed"] = quantum_config_.seed;
    j["arch"] = arch;
    j["params"] = parameters();
    j["normalization"] = norm_json(norm_);
    return j.dump(2);
}

}  // namespace qae3d
