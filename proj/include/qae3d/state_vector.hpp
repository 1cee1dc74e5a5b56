#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace qae3d {

using cplx = std::complex<double>;

enum class GateKind { RX, RY, RZ, CRX, CRY, CRZ };

bool is_controlled(GateKind kind);
const char* gate_kind_name(GateKind kind);
GateKind gate_kind_from_name(const std::string& name);

/// One parameterised gate. `control` is -1 for uncontrolled kinds.
/// `param_index` points into the owning circuit's parameter vector.
struct Gate {
    GateKind kind;
    int target;
    int control;
    int param_index;
};

/// Dense N-qubit state. Basis index i holds qubit k at bit position
/// (N-1-k), i.e. qubit 0 is the most significant bit.
struct StateVector {
    int n_qubits = 0;
    std::vector<cplx> amplitudes;

    StateVector() = default;
    explicit StateVector(int n);

    static StateVector zero_state(int n);  // |0...0>

    std::size_t dim() const { return amplitudes.size(); }
    double norm() const;
};

/// Row-major 2x2 complex matrix.
struct Mat2 {
    cplx m00, m01, m10, m11;
};

/// The single-qubit rotation underlying `kind` (controlled kinds give
/// their target rotation).
Mat2 rotation_matrix(GateKind kind, double angle);

/// d/dtheta of rotation_matrix.
Mat2 rotation_matrix_deriv(GateKind kind, double angle);

/// Full gate matrix, row-major: 2x2 for RX/RY/RZ, 4x4 (control qubit
/// first) for controlled kinds.
std::vector<cplx> gate_matrix(GateKind kind, double angle);

void apply_gate_inplace(StateVector& state, const Gate& gate, double angle);
StateVector apply_gate(const StateVector& state, const Gate& gate, double angle);

/// Applies dU/dtheta * state. Not unitary; used by the adjoint pass.
StateVector apply_gate_deriv(const StateVector& state, const Gate& gate, double angle);

/// probs[a] = sum_b |state[a * 2^n_discard + b]|^2 -- the diagonal of the
/// reduced density matrix after tracing out the last n_discard qubits.
std::vector<double> marginal_probabilities(const StateVector& state, int n_discard);

/// Rebuilds |phi>_A (x) |0>_B from marginal probabilities: amplitude
/// sqrt(probs[a]) at index a * 2^n_discard, zero elsewhere.
StateVector reembed(const std::vector<double>& probs, int n_discard);

/// Per-basis-state probability amplitudes (|xi_i|). Exact, no sampling.
std::vector<double> readout(const StateVector& state);

double inner_real(const StateVector& a, const StateVector& b);

}  // namespace qae3d
