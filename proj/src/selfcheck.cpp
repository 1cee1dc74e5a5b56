#include "qae3d/selfcheck.hpp"

#include <cmath>
#include <complex>
#include <random>

#include "qae3d/circuit.hpp"
#include "qae3d/geometry.hpp"
#include "qae3d/loss.hpp"
#include "qae3d/model.hpp"
#include "qae3d/rng.hpp"

namespace qae3d {

namespace {

StateVector random_state(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    StateVector s(n);
    for (cplx& a : s.amplitudes) a = cplx(gauss(rng), gauss(rng));
    const double norm = s.norm();
    for (cplx& a : s.amplitudes) a /= norm;
    return s;
}

PointCloud random_cloud(int v_count, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    PointCloud pc(v_count);
    for (Vec3& v : pc) v = {uni(rng), uni(rng), uni(rng)};
    return pc;
}

// Diagonal of the dense partial trace over the last n_discard qubits.
std::vector<double> dense_trace_diagonal(const StateVector& state, int n_discard) {
    const std::size_t dim_b = std::size_t{1} << n_discard;
    const std::size_t dim_a = state.dim() >> n_discard;
    std::vector<double> diag(dim_a, 0.0);
    for (std::size_t a = 0; a < dim_a; ++a)
        for (std::size_t b = 0; b < dim_b; ++b) {
            const cplx amp = state.amplitudes[a * dim_b + b];
            diag[a] += std::real(std::conj(amp) * amp);
        }
    return diag;
}

struct Battery {
    std::uint64_t seed;
    bool inject_fault;
    std::vector<CheckResult> results;

    void record(const std::string& name, double worst, double tolerance) {
        results.push_back({name, worst <= tolerance, worst, tolerance});
    }
};

void check_unitarity(Battery& battery) {
    std::mt19937_64 rng = substream_rng(battery.seed, "selfcheck-unitarity");
    double worst = 0.0;
    const int n = 6, nb = 2;
    const auto kept = default_kept_set(n, nb);
    const auto discarded = default_discarded_set(n, nb);
    for (BlockKind kind : {BlockKind::A, BlockKind::B, BlockKind::C, BlockKind::D})
        for (ArchitectureType arch : {ArchitectureType::Repeat, ArchitectureType::Inverse})
            for (InitScheme scheme : {InitScheme::Random, InitScheme::Identity}) {
                auto [circuit, params] =
                    build_circuit(2, kind, arch, scheme, n, kept, discarded, rng());
                const auto u = circuit_unitary(circuit, params, n);
                const std::size_t dim = std::size_t{1} << n;
                for (std::size_t r = 0; r < dim; ++r)
                    for (std::size_t c = 0; c < dim; ++c) {
                        cplx acc(0, 0);
                        for (std::size_t k = 0; k < dim; ++k)
                            acc += std::conj(u[k * dim + r]) * u[k * dim + c];
                        const double expected = r == c ? 1.0 : 0.0;
                        worst = std::max(worst, std::abs(acc - expected));
                    }
            }
    battery.record("unitarity", worst, 1e-10);
}

void check_identity_init(Battery& battery) {
    std::mt19937_64 rng = substream_rng(battery.seed, "selfcheck-identity");
    double worst = 0.0;
    const int n = 6, nb = 2;
    const auto kept = default_kept_set(n, nb);
    const auto discarded = default_discarded_set(n, nb);
    for (BlockKind kind : {BlockKind::A, BlockKind::B, BlockKind::C, BlockKind::D}) {
        auto [circuit, params] = build_circuit(2, kind, ArchitectureType::Inverse,
                                               InitScheme::Identity, n, kept, discarded,
                                               rng());
        for (int trial = 0; trial < 10; ++trial) {
            const StateVector psi = random_state(n, rng);
            const StateVector mapped = apply_circuit(psi, circuit, params);
            double err = 0.0;
            for (std::size_t i = 0; i < psi.dim(); ++i)
                err += std::norm(mapped.amplitudes[i] - psi.amplitudes[i]);
            worst = std::max(worst, std::sqrt(err));
        }
    }
    battery.record("identity_initialisation", worst, 1e-10);
}

void check_inverse_law(Battery& battery) {
    std::mt19937_64 rng = substream_rng(battery.seed, "selfcheck-inverse");
    double worst = 0.0;
    const int n = 5, nb = 1;
    const auto kept = default_kept_set(n, nb);
    const auto discarded = default_discarded_set(n, nb);
    for (BlockKind kind : {BlockKind::A, BlockKind::B, BlockKind::C, BlockKind::D}) {
        auto [circuit, params] = build_circuit(2, kind, ArchitectureType::Repeat,
                                               InitScheme::Random, n, kept, discarded,
                                               rng());
        CircuitSpec inverse = circuit;
        std::reverse(inverse.gates.begin(), inverse.gates.end());
        ParameterVector inv_params(params.size());
        for (std::size_t i = 0; i < inverse.gates.size(); ++i) {
            inverse.gates[i].param_index = static_cast<int>(i);
            const int orig = circuit.gates[circuit.gates.size() - 1 - i].param_index;
            inv_params[i] = -params[orig];
        }
        if (battery.inject_fault && kind == BlockKind::A) inv_params[3] = -inv_params[3];
        const StateVector psi = random_state(n, rng);
        const StateVector round =
            apply_circuit(apply_circuit(psi, circuit, params), inverse, inv_params);
        double err = 0.0;
        for (std::size_t i = 0; i < psi.dim(); ++i)
            err += std::norm(round.amplitudes[i] - psi.amplitudes[i]);
        worst = std::max(worst, std::sqrt(err));
    }
    battery.record("inverse_law", worst, 1e-10);
}

void check_marginalisation(Battery& battery) {
    std::mt19937_64 rng = substream_rng(battery.seed, "selfcheck-marginal");
    double worst = 0.0;
    for (int n = 3; n <= 6; ++n)
        for (int nb = 1; nb <= 2 && nb < n; ++nb)
            for (int trial = 0; trial < 10; ++trial) {
                const StateVector psi = random_state(n, rng);
                const auto fast = marginal_probabilities(psi, nb);
                const auto oracle = dense_trace_diagonal(psi, nb);
                for (std::size_t a = 0; a < fast.size(); ++a)
                    worst = std::max(worst, std::abs(fast[a] - oracle[a]));
            }
    battery.record("marginalisation_oracle", worst, 1e-12);
}

void check_gradient(Battery& battery) {
    std::mt19937_64 rng = substream_rng(battery.seed, "selfcheck-gradient");
    double worst = 0.0;
    QuantumModelConfig config;
    config.blocks = 1;
    config.n_qubits = 4;
    config.n_discard = 1;
    config.n_vertices = 3;
    config.init = InitScheme::Random;
    config.seed = rng();
    QuantumModel model(config);
    const PointCloud pc = random_cloud(3, rng);
    std::vector<double> grad;
    model.loss_and_gradient(pc, grad);
    std::vector<double> params = model.parameters();
    const double h = 1e-5;
    for (std::size_t k = 0; k < params.size(); ++k) {
        std::vector<double> shifted = params;
        shifted[k] = params[k] + h;
        model.set_parameters(shifted);
        const double up = model.loss(pc);
        shifted[k] = params[k] - h;
        model.set_parameters(shifted);
        const double down = model.loss(pc);
        model.set_parameters(params);
        const double fd = (up - down) / (2.0 * h);
        const double err = std::abs(grad[k] - fd) / std::max(std::abs(fd), 1e-8 / 1e-4);
        worst = std::max(worst, err);
    }
    battery.record("gradient_vs_finite_differences", worst, 1e-4);
}

void check_loss_zero(Battery& battery) {
    std::mt19937_64 rng = substream_rng(battery.seed, "selfcheck-loss");
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const PointCloud pc = random_cloud(4, rng);
        const auto target = encode_target_amplitudes(pc, 4);
        worst = std::max(worst, reconstruction_loss(target, pc, 4));
    }
    battery.record("loss_zero_characterisation", worst, 1e-12);
}

void check_roundtrip(Battery& battery) {
    std::mt19937_64 rng = substream_rng(battery.seed, "selfcheck-roundtrip");
    double worst = 0.0;
    const NormalizationParams identity_norm;
    for (int trial = 0; trial < 50; ++trial) {
        const PointCloud pc = random_cloud(16, rng);
        const auto alpha = encode_target_amplitudes(pc, 6);
        const PointCloud back = decode_to_points(alpha, 16, identity_norm);
        for (std::size_t i = 0; i < pc.size(); ++i)
            for (int a = 0; a < 3; ++a)
                worst = std::max(worst, std::abs(back[i][a] - pc[i][a]));
    }
    battery.record("encode_decode_roundtrip", worst, 1e-12);
}

}  // namespace

std::vector<CheckResult> run_selfchecks(std::uint64_t seed, bool inject_fault) {
    Battery battery{seed, inject_fault, {}};
    check_unitarity(battery);
    check_identity_init(battery);
    check_inverse_law(battery);
    check_marginalisation(battery);
    check_gradient(battery);
    check_loss_zero(battery);
    check_roundtrip(battery);
    return battery.results;
}

}  // namespace qae3d
