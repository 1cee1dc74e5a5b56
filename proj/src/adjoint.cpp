#include "adjoint.hpp"

#include <cmath>
#include <stdexcept>

#include "qae3d/baselines.hpp"

namespace qae3d::detail {

std::vector<StateVector> run_circuit_taped(const StateVector& input,
                                           const CircuitSpec& circuit,
                                           const ParameterVector& params) {
    if (static_cast<int>(params.size()) != circuit.param_count)
        throw std::invalid_argument("parameter count mismatch");
    std::vector<StateVector> tape;
    tape.reserve(circuit.gates.size() + 1);
    tape.push_back(input);
    for (const Gate& g : circuit.gates)
        tape.push_back(apply_gate(tape.back(), g, params[g.param_index]));
    return tape;
}

StateVector backprop_circuit(const CircuitSpec& circuit, const ParameterVector& params,
                             const std::vector<StateVector>& tape, StateVector cotangent,
                             double* grad) {
    if (tape.size() != circuit.gates.size() + 1)
        throw std::invalid_argument("tape length mismatch");
    for (std::size_t k = circuit.gates.size(); k-- > 0;) {
        const Gate& g = circuit.gates[k];
        const double angle = params[g.param_index];
        grad[g.param_index] +=
            inner_real(cotangent, apply_gate_deriv(tape[k], g, angle));
        // All six gate kinds satisfy U(theta)^dagger = U(-theta).
        apply_gate_inplace(cotangent, g, -angle);
    }
    return cotangent;
}

MarginaliseResult marginalise_forward(const StateVector& phi, int n_discard) {
    MarginaliseResult out;
    out.probs = marginal_probabilities(phi, n_discard);
    out.restate = StateVector(phi.n_qubits);
    const std::size_t dim_b = std::size_t{1} << n_discard;
    for (std::size_t a = 0; a < out.probs.size(); ++a)
        out.restate.amplitudes[a * dim_b] = std::sqrt(out.probs[a]);
    return out;
}

StateVector marginalise_backward(const StateVector& restate_cotangent,
                                 const std::vector<double>& probs,
                                 const StateVector& phi, int n_discard) {
    StateVector g_phi(phi.n_qubits);
    const std::size_t dim_b = std::size_t{1} << n_discard;
    for (std::size_t a = 0; a < probs.size(); ++a) {
        const double g_sqrt = std::real(restate_cotangent.amplitudes[a * dim_b]);
        const double dp = g_sqrt * 0.5 / std::sqrt(std::max(probs[a], kGradClamp));
        for (std::size_t b = 0; b < dim_b; ++b) {
            const std::size_t idx = a * dim_b + b;
            g_phi.amplitudes[idx] = 2.0 * dp * phi.amplitudes[idx];
        }
    }
    return g_phi;
}

EluBottleneckResult elu_bottleneck_forward(const StateVector& phi, int n_discard) {
    EluBottleneckResult out;
    const std::size_t dim_b = std::size_t{1} << n_discard;
    const std::size_t dim_a = phi.dim() >> n_discard;
    out.moduli.resize(dim_a);
    out.activated.resize(dim_a);
    double norm_sq = 0.0;
    for (std::size_t a = 0; a < dim_a; ++a) {
        out.moduli[a] = std::abs(phi.amplitudes[a * dim_b]);
        out.activated[a] = elu(out.moduli[a]);
        norm_sq += out.activated[a] * out.activated[a];
    }
    const double norm = std::sqrt(norm_sq);
    if (norm < 1e-300) throw std::runtime_error("degenerate latent: all-zero sub-vector");
    out.normalized.resize(dim_a);
    out.restate = StateVector(phi.n_qubits);
    for (std::size_t a = 0; a < dim_a; ++a) {
        out.normalized[a] = out.activated[a] / norm;
        out.restate.amplitudes[a * dim_b] = out.normalized[a];
    }
    return out;
}

StateVector elu_bottleneck_backward(const StateVector& restate_cotangent,
                                    const EluBottleneckResult& fwd,
                                    const StateVector& phi, int n_discard) {
    const std::size_t dim_b = std::size_t{1} << n_discard;
    const std::size_t dim_a = fwd.moduli.size();
    double norm = 0.0;
    for (double e : fwd.activated) norm += e * e;
    norm = std::sqrt(norm);

    std::vector<double> g_out(dim_a);
    double dot = 0.0;
    for (std::size_t a = 0; a < dim_a; ++a) {
        g_out[a] = std::real(restate_cotangent.amplitudes[a * dim_b]);
        dot += g_out[a] * fwd.normalized[a];
    }
    StateVector g_phi(phi.n_qubits);
    for (std::size_t a = 0; a < dim_a; ++a) {
        const double g_act = (g_out[a] - dot * fwd.normalized[a]) / norm;
        const double g_mod = g_act * elu_deriv(fwd.moduli[a]);
        const std::size_t idx = a * dim_b;
        const double mod = std::max(fwd.moduli[a], kGradClamp);
        g_phi.amplitudes[idx] = g_mod * phi.amplitudes[idx] / mod;
    }
    return g_phi;
}

StateVector readout_cotangent(const StateVector& xi, const std::vector<double>& d_alpha) {
    StateVector g(xi.n_qubits);
    for (std::size_t i = 0; i < xi.dim(); ++i) {
        const double mod = std::max(std::abs(xi.amplitudes[i]), kGradClamp);
        g.amplitudes[i] = d_alpha[i] * xi.amplitudes[i] / mod;
    }
    return g;
}

}  // namespace qae3d::detail
