#pragma once

#include <string>
#include <vector>

#include "qae3d/state_vector.hpp"

namespace qae3d {

enum class BlockKind { A, B, C, D };
enum class ArchitectureType { Repeat, Inverse };
enum class InitScheme { Random, Identity };

const char* block_kind_name(BlockKind kind);
BlockKind block_kind_from_name(const std::string& name);
const char* architecture_name(ArchitectureType arch);
ArchitectureType architecture_from_name(const std::string& name);
const char* init_scheme_name(InitScheme scheme);
InitScheme init_scheme_from_name(const std::string& name);

using ParameterVector = std::vector<double>;

/// A circuit as an ordered gate list. block_boundaries holds the gate
/// index where each basic block (F or S) starts, plus a trailing
/// end-of-list entry, so consecutive entries delimit one basic block.
struct CircuitSpec {
    int n_qubits = 0;
    std::vector<Gate> gates;
    int param_count = 0;
    std::vector<int> block_boundaries;

    std::string to_json() const;
};

StateVector apply_circuit(const StateVector& state, const CircuitSpec& circuit,
                          const ParameterVector& params);

/// Dense unitary of the circuit (test utility). Guarded to N <= 10.
std::vector<cplx> circuit_unitary(const CircuitSpec& circuit,
                                  const ParameterVector& params, int n_qubits);

/// One basic block F. Kept/discarded sets only matter for kind B.
std::vector<Gate> build_basic_block(BlockKind kind, int n_qubits,
                                    const std::vector<int>& kept,
                                    const std::vector<int>& discarded,
                                    int first_param_index);

/// One block X = S F as a circuit with the F/S boundary recorded.
CircuitSpec build_block(ArchitectureType arch, BlockKind kind, int n_qubits,
                        const std::vector<int>& kept, const std::vector<int>& discarded);

ParameterVector init_params(const CircuitSpec& circuit, InitScheme scheme,
                            ArchitectureType arch, std::uint64_t rng_seed);

/// J blocks chained, with independent parameter draws per block.
std::pair<CircuitSpec, ParameterVector> build_circuit(
    int n_blocks, BlockKind kind, ArchitectureType arch, InitScheme scheme,
    int n_qubits, const std::vector<int>& kept, const std::vector<int>& discarded,
    std::uint64_t rng_seed);

int block_param_count(BlockKind kind, int n_qubits, int n_kept, int n_discarded);

/// Block count whose parameter total is closest to target (ties toward
/// smaller J).
int match_blocks(int target_param_count, BlockKind kind, int n_qubits,
                 int n_kept, int n_discarded);

/// First n_kept qubit indices; the last n_discarded are the bottleneck set.
std::vector<int> default_kept_set(int n_qubits, int n_discarded);
std::vector<int> default_discarded_set(int n_qubits, int n_discarded);

}  // namespace qae3d
