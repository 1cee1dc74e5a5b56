#include "qae3d/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "qae3d/rng.hpp"
#include "json.hpp"

namespace qae3d {

const char* block_kind_name(BlockKind kind) {
    switch (kind) {
        case BlockKind::A: return "A";
        case BlockKind::B: return "B";
        case BlockKind::C: return "C";
        case BlockKind::D: return "D";
    }
    throw std::logic_error("unknown block kind");
}

BlockKind block_kind_from_name(const std::string& name) {
    if (name == "A") return BlockKind::A;
    if (name == "B") return BlockKind::B;
    if (name == "C") return BlockKind::C;
    if (name == "D") return BlockKind::D;
    throw std::invalid_argument("unknown block kind: " + name);
}

const char* architecture_name(ArchitectureType arch) {
    return arch == ArchitectureType::Repeat ? "repeat" : "inverse";
}

ArchitectureType architecture_from_name(const std::string& name) {
    if (name == "repeat") return ArchitectureType::Repeat;
    if (name == "inverse") return ArchitectureType::Inverse;
    throw std::invalid_argument("unknown architecture: " + name);
}

const char* init_scheme_name(InitScheme scheme) {
    return scheme == InitScheme::Random ? "random" : "identity";
}

InitScheme init_scheme_from_name(const std::string& name) {
    if (name == "random") return InitScheme::Random;
    if (name == "identity") return InitScheme::Identity;
    throw std::invalid_argument("unknown init scheme: " + name);
}

std::string CircuitSpec::to_json() const {
    nlohmann::json j;
    j["n_qubits"] = n_qubits;
    j["param_count"] = param_count;
    j["block_boundaries"] = block_boundaries;
    nlohmann::json gate_list = nlohmann::json::array();
    for (const Gate& g : gates) {
        nlohmann::json jg;
        jg["kind"] = gate_kind_name(g.kind);
        jg["target"] = g.target;
        if (is_controlled(g.kind))
            jg["control"] = g.control;
        else
            jg["control"] = nullptr;
        jg["param_index"] = g.param_index;
        gate_list.push_back(jg);
    }
    j["gates"] = gate_list;
    return j.dump(2);
}

StateVector apply_circuit(const StateVector& state, const CircuitSpec& circuit,
                          const ParameterVector& params) {
    if (static_cast<int>(params.size()) != circuit.param_count)
        throw std::invalid_argument("parameter count mismatch");
    StateVector out = state;
    for (const Gate& g : circuit.gates)
        apply_gate_inplace(out, g, params[g.param_index]);
    return out;
}

std::vector<cplx> circuit_unitary(const CircuitSpec& circuit,
                                  const ParameterVector& params, int n_qubits) {
    if (n_qubits > 10) throw std::invalid_argument("circuit_unitary guarded to N <= 10");
    const std::size_t dim = std::size_t{1} << n_qubits;
    std::vector<cplx> u(dim * dim, cplx(0, 0));
    for (std::size_t col = 0; col < dim; ++col) {
        StateVector basis(n_qubits);
        basis.amplitudes[col] = 1.0;
        StateVector mapped = apply_circuit(basis, circuit, params);
        for (std::size_t row = 0; row < dim; ++row)
            u[row * dim + col] = mapped.amplitudes[row];
    }
    return u;
}

namespace {

void check_partition(int n_qubits, const std::vector<int>& kept,
                     const std::vector<int>& discarded) {
    std::vector<bool> seen(n_qubits, false);
    auto mark = [&](const std::vector<int>& set) {
        for (int q : set) {
            if (q < 0 || q >= n_qubits) throw std::out_of_range("qubit index out of range");
            if (seen[q]) throw std::invalid_argument("kept/discarded sets overlap");
            seen[q] = true;
        }
    };
    mark(kept);
    mark(discarded);
    for (bool s : seen)
        if (!s) throw std::invalid_argument("kept/discarded sets must cover all qubits");
}

void append_rotation_layer(std::vector<Gate>& gates, GateKind kind, int n, int& p) {
    for (int q = 0; q < n; ++q) gates.push_back({kind, q, -1, p++});
}

void append_ring(std::vector<Gate>& gates, int n, int& p) {
    for (int q = 0; q < n; ++q)
        gates.push_back({GateKind::CRX, (q + 1) % n, q, p++});
}

}  // namespace

std::vector<Gate> build_basic_block(BlockKind kind, int n_qubits,
                                    const std::vector<int>& kept,
                                    const std::vector<int>& discarded,
                                    int first_param_index) {
    if (n_qubits < 2) throw std::invalid_argument("blocks need at least two qubits");
    std::vector<Gate> gates;
    int p = first_param_index;
    switch (kind) {
        case BlockKind::A:
            append_rotation_layer(gates, GateKind::RY, n_qubits, p);
            append_ring(gates, n_qubits, p);
            break;
        case BlockKind::B: {
            check_partition(n_qubits, kept, discarded);
            if (kept.empty() || discarded.empty())
                throw std::invalid_argument("kind B needs nonempty kept and discarded sets");
            append_rotation_layer(gates, GateKind::RY, n_qubits, p);
            append_ring(gates, n_qubits, p);
            std::vector<int> b_sorted = discarded;
            std::vector<int> a_sorted = kept;
            std::sort(b_sorted.begin(), b_sorted.end());
            std::sort(a_sorted.begin(), a_sorted.end());
            for (int b : b_sorted)
                for (int a : a_sorted)
                    gates.push_back({GateKind::CRX, a, b, p++});
            break;
        }
        case BlockKind::C:
            append_rotation_layer(gates, GateKind::RY, n_qubits, p);
            append_rotation_layer(gates, GateKind::RZ, n_qubits, p);
            append_ring(gates, n_qubits, p);
            break;
        case BlockKind::D:
            append_rotation_layer(gates, GateKind::RY, n_qubits, p);
            append_ring(gates, n_qubits, p);
            append_rotation_layer(gates, GateKind::RY, n_qubits, p);
            break;
    }
    return gates;
}

CircuitSpec build_block(ArchitectureType arch, BlockKind kind, int n_qubits,
                        const std::vector<int>& kept, const std::vector<int>& discarded) {
    CircuitSpec spec;
    spec.n_qubits = n_qubits;
    std::vector<Gate> f = build_basic_block(kind, n_qubits, kept, discarded, 0);
    const int f_count = static_cast<int>(f.size());
    std::vector<Gate> s;
    if (arch == ArchitectureType::Repeat) {
        s = build_basic_block(kind, n_qubits, kept, discarded, f_count);
    } else {
        // S is F's gate list reversed, with fresh parameter slots.
        s = f;
        std::reverse(s.begin(), s.end());
        for (int i = 0; i < f_count; ++i) s[i].param_index = f_count + i;
    }
    spec.gates = std::move(f);
    spec.gates.insert(spec.gates.end(), s.begin(), s.end());
    spec.param_count = static_cast<int>(spec.gates.size());
    spec.block_boundaries = {0, f_count, spec.param_count};
    return spec;
}

ParameterVector init_params(const CircuitSpec& circuit, InitScheme scheme,
                            ArchitectureType arch, std::uint64_t rng_seed) {
    if (circuit.block_boundaries.size() < 3 || circuit.block_boundaries.size() % 2 == 0)
        throw std::invalid_argument("circuit lacks F/S boundaries");
    std::mt19937_64 rng = substream_rng(rng_seed, "circuit-init");
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
    ParameterVector params(circuit.param_count, 0.0);
    const auto& bounds = circuit.block_boundaries;
    // Boundaries come in (F start, S start, next F start, ...) pairs.
    for (std::size_t blk = 0; blk + 2 < bounds.size(); blk += 2) {
        const int f_begin = bounds[blk];
        const int s_begin = bounds[blk + 1];
        const int s_end = bounds[blk + 2];
        const int half = s_begin - f_begin;
        if (s_end - s_begin != half)
            throw std::invalid_argument("unequal F/S halves");
        for (int i = f_begin; i < s_begin; ++i) params[i] = angle(rng);
        if (scheme == InitScheme::Random) {
            for (int i = s_begin; i < s_end; ++i) params[i] = angle(rng);
        } else if (arch == ArchitectureType::Repeat) {
            for (int i = 0; i < half; ++i) params[s_begin + i] = params[f_begin + i];
        } else {
            for (int i = 0; i < half; ++i)
                params[s_begin + i] = -params[s_begin - 1 - i];
        }
    }
    return params;
}

std::pair<CircuitSpec, ParameterVector> build_circuit(
    int n_blocks, BlockKind kind, ArchitectureType arch, InitScheme scheme,
    int n_qubits, const std::vector<int>& kept, const std::vector<int>& discarded,
    std::uint64_t rng_seed) {
    if (n_blocks < 1) throw std::invalid_argument("need at least one block");
    CircuitSpec spec;
    spec.n_qubits = n_qubits;
    spec.block_boundaries.push_back(0);
    for (int j = 0; j < n_blocks; ++j) {
        CircuitSpec block = build_block(arch, kind, n_qubits, kept, discarded);
        const int offset = static_cast<int>(spec.gates.size());
        for (Gate g : block.gates) {
            g.param_index += offset;
            spec.gates.push_back(g);
        }
        spec.block_boundaries.push_back(offset + block.block_boundaries[1]);
        spec.block_boundaries.push_back(offset + block.block_boundaries[2]);
    }
    spec.param_count = static_cast<int>(spec.gates.size());
    ParameterVector params = init_params(spec, scheme, arch, rng_seed);
    return {std::move(spec), std::move(params)};
}

int block_param_count(BlockKind kind, int n_qubits, int n_kept, int n_discarded) {
    switch (kind) {
        case BlockKind::A: return 2 * (2 * n_qubits);
        case BlockKind::B: return 2 * (2 * n_qubits + n_kept * n_discarded);
        case BlockKind::C:
        case BlockKind::D: return 2 * (3 * n_qubits);
    }
    throw std::logic_error("unknown block kind");
}

int match_blocks(int target_param_count, BlockKind kind, int n_qubits,
                 int n_kept, int n_discarded) {
    if (target_param_count <= 0) throw std::invalid_argument("target must be positive");
    const int per_block = block_param_count(kind, n_qubits, n_kept, n_discarded);
    const int lo = std::max(1, target_param_count / per_block);
    int best_j = lo;
    int best_err = std::abs(lo * per_block - target_param_count);
    for (int j = lo + 1; j <= lo + 1; ++j) {
        const int err = std::abs(j * per_block - target_param_count);
        if (err < best_err) {
            best_j = j;
            best_err = err;
        }
    }
    return best_j;
}

std::vector<int> default_kept_set(int n_qubits, int n_discarded) {
    std::vector<int> kept;
    for (int q = 0; q < n_qubits - n_discarded; ++q) kept.push_back(q);
    return kept;
}

std::vector<int> default_discarded_set(int n_qubits, int n_discarded) {
    std::vector<int> discarded;
    for (int q = n_qubits - n_discarded; q < n_qubits; ++q) discarded.push_back(q);
    return discarded;
}

}  // namespace qae3d
