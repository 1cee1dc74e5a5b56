#pragma once

#include <memory>
#include <string>
#include <vector>

#include "qae3d/circuit.hpp"
#include "qae3d/geometry.hpp"

namespace qae3d {

enum class BottleneckKind { Marginalise, SubvectorElu };

const char* bottleneck_name(BottleneckKind kind);
BottleneckKind bottleneck_from_name(const std::string& name);

struct ForwardOutput {
    std::vector<double> alpha;   // 2^N nonnegative readout amplitudes
    std::vector<double> latent;  // length 2^(N - N_B)
};

/// Common surface for the quantum model and every trainable baseline:
/// flat parameter access, per-sample loss gradient, and a normalised
/// point-cloud prediction used by the metric.
class Model {
public:
    virtual ~Model() = default;

    virtual const char* kind_name() const = 0;
    virtual int param_count() const = 0;
    virtual std::vector<double> parameters() const = 0;
    virtual void set_parameters(const std::vector<double>& values) = 0;

    virtual PointCloud predict_normalized(const PointCloud& pc_norm) const = 0;
    virtual double loss(const PointCloud& pc_norm) const = 0;
    virtual double loss_and_gradient(const PointCloud& pc_norm,
                                     std::vector<double>& grad) const = 0;

    virtual std::string checkpoint_json() const = 0;

    int n_vertices() const { return n_vertices_; }
    const NormalizationParams& normalization() const { return norm_; }
    void set_normalization(const NormalizationParams& p) { norm_ = p; }

protected:
    int n_vertices_ = 0;
    NormalizationParams norm_;
};

struct QuantumModelConfig {
    BlockKind block_kind = BlockKind::B;
    ArchitectureType architecture = ArchitectureType::Repeat;
    InitScheme init = InitScheme::Identity;
    int blocks = 8;
    int n_qubits = 6;
    int n_discard = 2;
    int n_vertices = 16;
    BottleneckKind bottleneck = BottleneckKind::Marginalise;
    std::uint64_t seed = 0;
};

/// The fully quantum auto-encoder: amplitude encoding, encoder circuit,
/// partial-trace (or sub-vector ELU) bottleneck, decoder circuit,
/// amplitude readout. Gradients come from an adjoint pass over taped
/// intermediate states.
class QuantumModel : public Model {
public:
    explicit QuantumModel(const QuantumModelConfig& config);

    const QuantumModelConfig& config() const { return config_; }
    const CircuitSpec& encoder() const { return encoder_; }
    const CircuitSpec& decoder() const { return decoder_; }
    const ParameterVector& encoder_params() const { return enc_params_; }
    const ParameterVector& decoder_params() const { return dec_params_; }

    ForwardOutput forward(const PointCloud& pc_norm) const;

    const char* kind_name() const override { return "quantum"; }
    int param_count() const override;
    std::vector<double> parameters() const override;
    void set_parameters(const std::vector<double>& values) override;
    PointCloud predict_normalized(const PointCloud& pc_norm) const override;
    double loss(const PointCloud& pc_norm) const override;
    double loss_and_gradient(const PointCloud& pc_norm,
                             std::vector<double>& grad) const override;
    std::string checkpoint_json() const override;

private:
    QuantumModelConfig config_;
    CircuitSpec encoder_, decoder_;
    ParameterVector enc_params_, dec_params_;

    friend std::unique_ptr<Model> load_checkpoint_json(const std::string& text);
};

std::unique_ptr<Model> load_checkpoint_json(const std::string& text);
std::unique_ptr<Model> load_checkpoint_file(const std::string& path);
void save_checkpoint_file(const Model& model, const std::string& path);

}  // namespace qae3d
