#include "qae3d/state_vector.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qae3d {

bool is_controlled(GateKind kind) {
    return kind == GateKind::CRX || kind == GateKind::CRY || kind == GateKind::CRZ;
}

const char* gate_kind_name(GateKind kind) {
    switch (kind) {
        case GateKind::RX: return "RX";
        case GateKind::RY: return "RY";
        case GateKind::RZ: return "RZ";
        case GateKind::CRX: return "CRX";
        case GateKind::CRY: return "CRY";
        case GateKind::CRZ: return "CRZ";
    }
    throw std::logic_error("unknown gate kind");
}

GateKind gate_kind_from_name(const std::string& name) {
    if (name == "RX") return GateKind::RX;
    if (name == "RY") return GateKind::RY;
    if (name == "RZ") return GateKind::RZ;
    if (name == "CRX") return GateKind::CRX;
    if (name == "CRY") return GateKind::CRY;
    if (name == "CRZ") return GateKind::CRZ;
    throw std::invalid_argument("unknown gate kind: " + name);
}

StateVector::StateVector(int n) : n_qubits(n), amplitudes(std::size_t{1} << n) {
    if (n < 1) throw std::invalid_argument("state needs at least one qubit");
}

StateVector StateVector::zero_state(int n) {
    StateVector s(n);
    s.amplitudes[0] = 1.0;
    return s;
}

double StateVector::norm() const {
    double acc = 0.0;
    for (const cplx& a : amplitudes) acc += std::norm(a);
    return std::sqrt(acc);
}

namespace {

GateKind base_rotation(GateKind kind) {
    switch (kind) {
        case GateKind::CRX: return GateKind::RX;
        case GateKind::CRY: return GateKind::RY;
        case GateKind::CRZ: return GateKind::RZ;
        default: return kind;
    }
}

}  // namespace

Mat2 rotation_matrix(GateKind kind, double angle) {
    const double c = std::cos(angle / 2.0);
    const double s = std::sin(angle / 2.0);
    switch (base_rotation(kind)) {
        case GateKind::RX:
            return {cplx(c, 0), cplx(0, -s), cplx(0, -s), cplx(c, 0)};
        case GateKind::RY:
            return {cplx(c, 0), cplx(-s, 0), cplx(s, 0), cplx(c, 0)};
        case GateKind::RZ:
            return {cplx(c, -s), cplx(0, 0), cplx(0, 0), cplx(c, s)};
        default:
            throw std::logic_error("unreachable");
    }
}

Mat2 rotation_matrix_deriv(GateKind kind, double angle) {
    const double c = 0.5 * std::cos(angle / 2.0);
    const double s = 0.5 * std::sin(angle / 2.0);
    switch (base_rotation(kind)) {
        case GateKind::RX:
            return {cplx(-s, 0), cplx(0, -c), cplx(0, -c), cplx(-s, 0)};
        case GateKind::RY:
            return {cplx(-s, 0), cplx(-c, 0), cplx(c, 0), cplx(-s, 0)};
        case GateKind::RZ:
            return {cplx(-s, -c), cplx(0, 0), cplx(0, 0), cplx(-s, c)};
        default:
            throw std::logic_error("unreachable");
    }
}

std::vector<cplx> gate_matrix(GateKind kind, double angle) {
    if (!std::isfinite(angle)) throw std::invalid_argument("non-finite gate angle");
    const Mat2 r = rotation_matrix(kind, angle);
    if (!is_controlled(kind)) {
        return {r.m00, r.m01, r.m10, r.m11};
    }
    // |0><0| (x) I + |1><1| (x) R, control qubit first.
    std::vector<cplx> m(16, cplx(0, 0));
    m[0] = 1.0;
    m[5] = 1.0;
    m[10] = r.m00;
    m[11] = r.m01;
    m[14] = r.m10;
    m[15] = r.m11;
    return m;
}

namespace {

void check_indices(const StateVector& state, const Gate& gate) {
    const int n = state.n_qubits;
    if (gate.target < 0 || gate.target >= n)
        throw std::out_of_range("gate target out of range");
    if (is_controlled(gate.kind)) {
        if (gate.control < 0 || gate.control >= n)
            throw std::out_of_range("gate control out of range");
        if (gate.control == gate.target)
            throw std::invalid_argument("control equals target");
    }
}

// Applies the 2x2 matrix on the target qubit; when derivative is set,
// the untouched control-0 half is zeroed instead of left alone.
void apply_two_by_two(StateVector& state, const Gate& gate, const Mat2& m, bool derivative) {
    const int n = state.n_qubits;
    const std::size_t target_mask = std::size_t{1} << (n - 1 - gate.target);
    const bool controlled = is_controlled(gate.kind);
    const std::size_t control_mask =
        controlled ? (std::size_t{1} << (n - 1 - gate.control)) : 0;
    auto& a = state.amplitudes;
    const std::size_t dim = a.size();
    for (std::size_t i = 0; i < dim; ++i) {
        if (i & target_mask) continue;
        const std::size_t j = i | target_mask;
        if (controlled && !(i & control_mask)) {
            if (derivative) {
                a[i] = 0.0;
                a[j] = 0.0;
            }
            continue;
        }
        const cplx lo = a[i];
        const cplx hi = a[j];
        a[i] = m.m00 * lo + m.m01 * hi;
        a[j] = m.m10 * lo + m.m11 * hi;
    }
}

}  // namespace

void apply_gate_inplace(StateVector& state, const Gate& gate, double angle) {
    check_indices(state, gate);
    apply_two_by_two(state, gate, rotation_matrix(gate.kind, angle), false);
}

StateVector apply_gate(const StateVector& state, const Gate& gate, double angle) {
    StateVector out = state;
    apply_gate_inplace(out, gate, angle);
    return out;
}

StateVector apply_gate_deriv(const StateVector& state, const Gate& gate, double angle) {
    check_indices(state, gate);
    StateVector out = state;
    apply_two_by_two(out, gate, rotation_matrix_deriv(gate.kind, angle), true);
    return out;
}

std::vector<double> marginal_probabilities(const StateVector& state, int n_discard) {
    if (n_discard <= 0 || n_discard >= state.n_qubits)
        throw std::out_of_range("n_discard must satisfy 0 < n_discard < N");
    const std::size_t dim_b = std::size_t{1} << n_discard;
    const std::size_t dim_a = state.dim() >> n_discard;
    std::vector<double> probs(dim_a, 0.0);
    for (std::size_t a = 0; a < dim_a; ++a) {
        double acc = 0.0;
        for (std::size_t b = 0; b < dim_b; ++b)
            acc += std::norm(state.amplitudes[a * dim_b + b]);
        probs[a] = acc;
    }
    return probs;
}

StateVector reembed(const std::vector<double>& probs, int n_discard) {
    double total = 0.0;
    for (double p : probs) {
        if (p < 0.0) throw std::invalid_argument("negative probability entry");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-8)
        throw std::invalid_argument("probabilities do not sum to 1");
    int n_keep = 0;
    while ((std::size_t{1} << n_keep) < probs.size()) ++n_keep;
    if ((std::size_t{1} << n_keep) != probs.size())
        throw std::invalid_argument("probability vector length is not a power of two");
    StateVector out(n_keep + n_discard);
    const std::size_t dim_b = std::size_t{1} << n_discard;
    for (std::size_t a = 0; a < probs.size(); ++a)
        out.amplitudes[a * dim_b] = std::sqrt(probs[a]);
    return out;
}

std::vector<double> readout(const StateVector& state) {
    std::vector<double> alpha(state.dim());
    for (std::size_t i = 0; i < alpha.size(); ++i)
        alpha[i] = std::abs(state.amplitudes[i]);
    return alpha;
}

double inner_real(const StateVector& a, const StateVector& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("dimension mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i)
        acc += std::real(std::conj(a.amplitudes[i]) * b.amplitudes[i]);
    return acc;
}

}  // namespace qae3d
