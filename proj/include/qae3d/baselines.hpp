#pragma once

#include <cstdint>

#include "qae3d/model.hpp"

namespace qae3d {

double elu(double x);
double elu_deriv(double x);

/// Bias-free dense layer, optionally with unit-norm output.
struct DenseLayer {
    int rows = 0;
    int cols = 0;
    bool normalize_output = false;
    std::vector<double> weights;  // row-major rows x cols

    static DenseLayer random_init(int rows, int cols, bool normalize_output,
                                  std::uint64_t seed, const char* stream);

    std::vector<double> forward(const std::vector<double>& x) const;
};

/// Mean-mesh predictor fitted on the training split (original units).
class ConstantModel : public Model {
public:
    ConstantModel(PointCloud mean, const NormalizationParams& norm);

    static ConstantModel fit(const std::vector<PointCloud>& train_frames,
                             const NormalizationParams& norm);

    const PointCloud& mean_cloud() const { return mean_; }

    const char* kind_name() const override { return "constant"; }
    int param_count() const override { return 0; }
    std::vector<double> parameters() const override { return {}; }
    void set_parameters(const std::vector<double>& values) override;
    PointCloud predict_normalized(const PointCloud& pc_norm) const override;
    double loss(const PointCloud& pc_norm) const override;
    double loss_and_gradient(const PointCloud& pc_norm,
                             std::vector<double>& grad) const override;
    std::string checkpoint_json() const override;

private:
    PointCloud mean_;  // original units
};

/// Classical twin of the quantum model: each circuit becomes one
/// norm-normalised square dense layer; encoding, squared-value
/// bottleneck, re-embedding, and modulus readout are unchanged.
class MimicModel : public Model {
public:
    MimicModel(int n_qubits, int n_discard, int n_vertices, std::uint64_t seed);

    ForwardOutput forward(const PointCloud& pc_norm) const;

    const char* kind_name() const override { return "mimic"; }
    int param_count() const override;
    std::vector<double> parameters() const override;
    void set_parameters(const std::vector<double>& values) override;
    PointCloud predict_normalized(const PointCloud& pc_norm) const override;
    double loss(const PointCloud& pc_norm) const override;
    double loss_and_gradient(const PointCloud& pc_norm,
                             std::vector<double>& grad) const override;
    std::string checkpoint_json() const override;

    DenseLayer encoder, decoder;
    int n_qubits = 0;
    int n_discard = 0;
    std::uint64_t seed = 0;
};

/// 3V -> latent -> 3V dense auto-encoder with an ELU bottleneck, no
/// auxiliaries, no padding, no output normalisation. rank = 0 means full
/// dense; rank > 0 factorises each layer as P * Q for parameter parity.
class FullyConnectedModel : public Model {
public:
    FullyConnectedModel(int n_vertices, int latent_size, int rank, std::uint64_t seed);

    std::vector<double> forward_coords(const PointCloud& pc_norm) const;
    int latent_size() const { return latent_size_; }
    int rank() const { return rank_; }

    const char* kind_name() const override { return "fc"; }
    int param_count() const override;
    std::vector<double> parameters() const override;
    void set_parameters(const std::vector<double>& values) override;
    PointCloud predict_normalized(const PointCloud& pc_norm) const override;
    double loss(const PointCloud& pc_norm) const override;
    double loss_and_gradient(const PointCloud& pc_norm,
                             std::vector<double>& grad) const override;
    std::string checkpoint_json() const override;

    /// Rank whose factorised parameter count is closest to target.
    static int match_rank(int target_param_count, int n_vertices, int latent_size);

private:
    int latent_size_ = 0;
    int rank_ = 0;
    std::uint64_t seed_ = 0;
    // rank == 0: w0_ = encoder, w1_ = decoder. rank > 0: encoder = w0_ * w1_,
    // decoder = w2_ * w3_.
    std::vector<DenseLayer> layers_;
};

enum class HybridKind { QuantumEncoder, QuantumDecoder };  // QE-CD / CE-QD

/// One quantum half, one mimic-style dense half, marginalisation in the
/// middle.
class HybridModel : public Model {
public:
    HybridModel(HybridKind hybrid, const QuantumModelConfig& quantum_config);

    ForwardOutput forward(const PointCloud& pc_norm) const;
    HybridKind hybrid_kind() const { return hybrid_; }

    const char* kind_name() const override;
    int param_count() const override;
    std::vector<double> parameters() const override;
    void set_parameters(const std::vector<double>& values) override;
    PointCloud predict_normalized(const PointCloud& pc_norm) const override;
    double loss(const PointCloud& pc_norm) const override;
    double loss_and_gradient(const PointCloud& pc_norm,
                             std::vector<double>& grad) const override;
    std::string checkpoint_json() const override;

    HybridKind hybrid_;
    QuantumModelConfig quantum_config_;
    CircuitSpec circuit_;
    ParameterVector circuit_params_;
    DenseLayer dense_;
};

}  // namespace qae3d
