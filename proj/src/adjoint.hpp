#pragma once

// Internal adjoint-pass helpers shared by the quantum model and the
// hybrid baselines. Cotangents follow the convention
// dL = Re(sum_i conj(g_i) d(psi_i)), so a unitary gate pulls back as its
// inverse and rotation angles read off as Re <g | dU | psi_before>.

#include <vector>

#include "qae3d/circuit.hpp"
#include "qae3d/state_vector.hpp"

namespace qae3d::detail {

constexpr double kGradClamp = 1e-12;

/// States before each gate plus the final state (size gates + 1).
std::vector<StateVector> run_circuit_taped(const StateVector& input,
                                           const CircuitSpec& circuit,
                                           const ParameterVector& params);

/// Walks the tape backwards; adds d(loss)/d(angle) into grad (indexed by
/// param_index) and returns the cotangent of the circuit input.
StateVector backprop_circuit(const CircuitSpec& circuit, const ParameterVector& params,
                             const std::vector<StateVector>& tape, StateVector cotangent,
                             double* grad);

struct MarginaliseResult {
    std::vector<double> probs;
    StateVector restate;
};

MarginaliseResult marginalise_forward(const StateVector& phi, int n_discard);

/// Pulls the restate cotangent back onto phi through sqrt and the
/// squared-amplitude sum (sqrt clamped near zero).
StateVector marginalise_backward(const StateVector& restate_cotangent,
                                 const std::vector<double>& probs,
                                 const StateVector& phi, int n_discard);

struct EluBottleneckResult {
    std::vector<double> moduli;      // |phi| on the |0>_B slice
    std::vector<double> activated;   // elu(moduli)
    std::vector<double> normalized;  // activated / ||activated||
    StateVector restate;
};

EluBottleneckResult elu_bottleneck_forward(const StateVector& phi, int n_discard);

StateVector elu_bottleneck_backward(const StateVector& restate_cotangent,
                                    const EluBottleneckResult& fwd,
                                    const StateVector& phi, int n_discard);

/// Cotangent of the modulus readout alpha = |xi|.
StateVector readout_cotangent(const StateVector& xi, const std::vector<double>& d_alpha);

}  // namespace qae3d::detail
