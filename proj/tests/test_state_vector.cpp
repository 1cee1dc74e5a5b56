#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <complex>
#include <random>
#include <vector>

#include "doctest.h"
#include "qae3d/circuit.hpp"
#include "qae3d/state_vector.hpp"

using namespace qae3d;

namespace {

const double kPi = std::acos(-1.0);

StateVector random_state(int n, std::mt19937_64& rng) {
    StateVector s(n);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (cplx& a : s.amplitudes) a = cplx(gauss(rng), gauss(rng));
    double nrm = s.norm();
    for (cplx& a : s.amplitudes) a /= nrm;
    return s;
}

// Independent oracle: embed a gate into the full 2^N x 2^N matrix directly
// from its 2x2 / 4x4 matrix, using the MSB-first index convention.
std::vector<cplx> dense_gate(int n, const Gate& gate, double angle) {
    const std::size_t dim = std::size_t{1} << n;
    std::vector<cplx> full(dim * dim, cplx(0.0, 0.0));
    const std::vector<cplx> m = gate_matrix(gate.kind, angle);
    const std::size_t t_mask = std::size_t{1} << (n - 1 - gate.target);
    if (!is_controlled(gate.kind)) {
        for (std::size_t col = 0; col < dim; ++col) {
            const std::size_t tc = (col & t_mask) ? 1 : 0;
            for (std::size_t tr = 0; tr < 2; ++tr) {
                const std::size_t row = (col & ~t_mask) | (tr ? t_mask : 0);
                full[row * dim + col] += m[tr * 2 + tc];
            }
        }
    } else {
        const std::size_t c_mask = std::size_t{1} << (n - 1 - gate.control);
        for (std::size_t col = 0; col < dim; ++col) {
            const std::size_t cc = (col & c_mask) ? 1 : 0;
            const std::size_t tc = (col & t_mask) ? 1 : 0;
            for (std::size_t cr = 0; cr < 2; ++cr)
                for (std::size_t tr = 0; tr < 2; ++tr) {
                    const std::size_t row = (col & ~c_mask & ~t_mask) |
                                            (cr ? c_mask : 0) | (tr ? t_mask : 0);
                    full[row * dim + col] += m[(cr * 2 + tr) * 4 + (cc * 2 + tc)];
                }
        }
    }
    return full;
}

std::vector<cplx> mat_mul(const std::vector<cplx>& a, const std::vector<cplx>& b,
                          std::size_t dim) {
    std::vector<cplx> out(dim * dim, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t k = 0; k < dim; ++k) {
            const cplx aik = a[i * dim + k];
            if (aik == cplx(0.0, 0.0)) continue;
            for (std::size_t j = 0; j < dim; ++j) out[i * dim + j] += aik * b[k * dim + j];
        }
    return out;
}

std::vector<cplx> mat_vec(const std::vector<cplx>& a, const std::vector<cplx>& x,
                          std::size_t dim) {
    std::vector<cplx> out(dim, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) out[i] += a[i * dim + j] * x[j];
    return out;
}

}  // namespace

TEST_CASE("gate_matrix worked examples") {
    const auto id = gate_matrix(GateKind::RY, 0.0);
    REQUIRE(id.size() == 4);
    CHECK(std::abs(id[0] - 1.0) < 1e-15);
    CHECK(std::abs(id[1]) < 1e-15);
    CHECK(std::abs(id[2]) < 1e-15);
    CHECK(std::abs(id[3] - 1.0) < 1e-15);

    const auto ry = gate_matrix(GateKind::RY, kPi);
    CHECK(std::abs(ry[0]) < 1e-15);
    CHECK(std::abs(ry[1] + 1.0) < 1e-15);
    CHECK(std::abs(ry[2] - 1.0) < 1e-15);
    CHECK(std::abs(ry[3]) < 1e-15);

    // CRX(pi) = blockdiag(I, [[0,-i],[-i,0]]), control qubit first.
    const auto crx = gate_matrix(GateKind::CRX, kPi);
    REQUIRE(crx.size() == 16);
    CHECK(std::abs(crx[0] - 1.0) < 1e-15);
    CHECK(std::abs(crx[5] - 1.0) < 1e-15);
    CHECK(std::abs(crx[10]) < 1e-15);
    CHECK(std::abs(crx[11] - cplx(0.0, -1.0)) < 1e-15);
    CHECK(std::abs(crx[14] - cplx(0.0, -1.0)) < 1e-15);
    CHECK(std::abs(crx[15]) < 1e-15);
}

TEST_CASE("apply_gate worked examples") {
    StateVector zero = StateVector::zero_state(1);
    const StateVector one = apply_gate(zero, Gate{GateKind::RY, 0, -1, 0}, kPi);
    CHECK(std::abs(one.amplitudes[0]) < 1e-15);
    CHECK(std::abs(one.amplitudes[1] - 1.0) < 1e-15);
    // value semantics: input untouched
    CHECK(std::abs(zero.amplitudes[0] - 1.0) < 1e-15);

    StateVector s10(2);
    s10.amplitudes[2] = 1.0;  // |10>
    const StateVector r = apply_gate(s10, Gate{GateKind::CRX, 1, 0, 0}, kPi);
    CHECK(std::abs(r.amplitudes[3] - cplx(0.0, -1.0)) < 1e-14);
    CHECK(std::abs(r.amplitudes[0]) + std::abs(r.amplitudes[1]) + std::abs(r.amplitudes[2]) <
          1e-14);

    StateVector s01(2);
    s01.amplitudes[1] = 1.0;  // |01>, control qubit 0 is |0>
    for (double theta : {0.3, 1.1, -2.0}) {
        const StateVector u = apply_gate(s01, Gate{GateKind::CRX, 1, 0, 0}, theta);
        CHECK(std::abs(u.amplitudes[1] - 1.0) < 1e-15);
    }
}

TEST_CASE("apply_gate throws on bad indices") {
    StateVector s = StateVector::zero_state(2);
    CHECK_THROWS(apply_gate(s, Gate{GateKind::RY, 2, -1, 0}, 0.1));
    CHECK_THROWS(apply_gate(s, Gate{GateKind::CRX, 0, 3, 0}, 0.1));
}

TEST_CASE("apply_gate matches the dense embedding oracle for all kinds") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    const int n = 3;
    for (GateKind kind : {GateKind::RX, GateKind::RY, GateKind::RZ, GateKind::CRX,
                          GateKind::CRY, GateKind::CRZ}) {
        for (int rep = 0; rep < 8; ++rep) {
            Gate g{kind, 0, -1, 0};
            g.target = int(rng() % n);
            if (is_controlled(kind)) {
                do g.control = int(rng() % n);
                while (g.control == g.target);
            }
            const double theta = angle(rng);
            const StateVector in = random_state(n, rng);
            const StateVector out = apply_gate(in, g, theta);
            const auto dense = dense_gate(n, g, theta);
            const auto expect = mat_vec(dense, in.amplitudes, in.dim());
            for (std::size_t i = 0; i < in.dim(); ++i)
                CHECK(std::abs(out.amplitudes[i] - expect[i]) < 1e-13);
        }
    }
}

TEST_CASE("apply_circuit: empty circuit and dense matrix-product oracle") {
    std::mt19937_64 rng(5);
    CircuitSpec empty;
    empty.n_qubits = 3;
    const StateVector in = random_state(3, rng);
    const StateVector same = apply_circuit(in, empty, {});
    for (std::size_t i = 0; i < in.dim(); ++i)
        CHECK(same.amplitudes[i] == in.amplitudes[i]);

    // random 4-qubit circuit vs an explicit 16x16 matrix product
    const int n = 4;
    CircuitSpec circuit;
    circuit.n_qubits = n;
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    ParameterVector params;
    const GateKind kinds[] = {GateKind::RX, GateKind::RY, GateKind::RZ,
                              GateKind::CRX, GateKind::CRY, GateKind::CRZ};
    for (int i = 0; i < 24; ++i) {
        Gate g{kinds[rng() % 6], int(rng() % n), -1, int(params.size())};
        if (is_controlled(g.kind)) {
            do g.control = int(rng() % n);
            while (g.control == g.target);
        }
        circuit.gates.push_back(g);
        params.push_back(angle(rng));
    }
    circuit.param_count = int(params.size());

    const std::size_t dim = 16;
    std::vector<cplx> total(dim * dim, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < dim; ++i) total[i * dim + i] = 1.0;
    for (std::size_t k = 0; k < circuit.gates.size(); ++k)
        total = mat_mul(dense_gate(n, circuit.gates[k], params[k]), total, dim);

    StateVector basis = StateVector::zero_state(n);
    const StateVector out = apply_circuit(basis, circuit, params);
    for (std::size_t i = 0; i < dim; ++i)
        CHECK(std::abs(out.amplitudes[i] - total[i * dim + 0]) < 1e-12);

    SUBCASE("parameter-count mismatch is an error") {
        ParameterVector wrong(params.begin(), params.end() - 1);
        CHECK_THROWS(apply_circuit(basis, circuit, wrong));
    }
}

TEST_CASE("circuit_unitary examples and unitarity") {
    CircuitSpec empty;
    empty.n_qubits = 2;
    const auto id4 = circuit_unitary(empty, {}, 2);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            CHECK(std::abs(id4[i * 4 + j] - (i == j ? 1.0 : 0.0)) < 1e-15);

    CircuitSpec one_gate;
    one_gate.n_qubits = 1;
    one_gate.gates = {Gate{GateKind::RY, 0, -1, 0}};
    one_gate.param_count = 1;
    const auto u = circuit_unitary(one_gate, {kPi}, 1);
    CHECK(std::abs(u[0]) < 1e-15);
    CHECK(std::abs(u[1] + 1.0) < 1e-15);
    CHECK(std::abs(u[2] - 1.0) < 1e-15);
    CHECK(std::abs(u[3]) < 1e-15);

    auto [circuit, params] = build_circuit(1, BlockKind::B, ArchitectureType::Repeat,
                                           InitScheme::Random, 4, default_kept_set(4, 1),
                                           default_discarded_set(4, 1), 99);
    const auto full = circuit_unitary(circuit, params, 4);
    const std::size_t dim = 16;
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) {
            cplx dot(0.0, 0.0);
            for (std::size_t k = 0; k < dim; ++k)
                dot += std::conj(full[k * dim + i]) * full[k * dim + j];
            CHECK(std::abs(dot - (i == j ? 1.0 : 0.0)) <= 1e-10);
        }

    CHECK_THROWS(circuit_unitary(empty, {}, 11));
}

TEST_CASE("marginal_probabilities: product, Bell, and dense partial-trace oracle") {
    std::mt19937_64 rng(21);

    SUBCASE("product state gives the A-marginal entrywise") {
        const StateVector a = random_state(2, rng);
        const StateVector b = random_state(1, rng);
        StateVector prod(3);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 2; ++j)
                prod.amplitudes[i * 2 + j] = a.amplitudes[i] * b.amplitudes[j];
        const auto probs = marginal_probabilities(prod, 1);
        for (std::size_t i = 0; i < 4; ++i)
            CHECK(std::abs(probs[i] - std::norm(a.amplitudes[i])) < 1e-14);
    }

    SUBCASE("Bell pair marginal is uniform") {
        StateVector bell(2);
        bell.amplitudes[0] = 1.0 / std::sqrt(2.0);
        bell.amplitudes[3] = 1.0 / std::sqrt(2.0);
        const auto probs = marginal_probabilities(bell, 1);
        CHECK(std::abs(probs[0] - 0.5) < 1e-15);
        CHECK(std::abs(probs[1] - 0.5) < 1e-15);
    }

    SUBCASE("matches the dense density-matrix partial trace") {
        for (int n = 3; n <= 6; ++n)
            for (int nb : {1, 2})
                for (int rep = 0; rep < 10; ++rep) {
                    const StateVector s = random_state(n, rng);
                    const std::size_t da = std::size_t{1} << (n - nb);
                    const std::size_t db = std::size_t{1} << nb;
                    const auto probs = marginal_probabilities(s, nb);
                    double total = 0.0;
                    for (std::size_t a = 0; a < da; ++a) {
                        // rho_AA diagonal entry via the explicit Eq. 2 sum
                        cplx diag(0.0, 0.0);
                        for (std::size_t b = 0; b < db; ++b)
                            diag += s.amplitudes[a * db + b] *
                                    std::conj(s.amplitudes[a * db + b]);
                        CHECK(std::abs(probs[a] - diag.real()) <= 1e-12);
                        CHECK(probs[a] >= 0.0);
                        total += probs[a];
                    }
                    CHECK(std::abs(total - 1.0) < 1e-10);
                }
    }

    StateVector s = random_state(3, rng);
    CHECK_THROWS(marginal_probabilities(s, 0));
    CHECK_THROWS(marginal_probabilities(s, 3));
}

TEST_CASE("reembed examples and product-state recovery") {
    const StateVector z = reembed({1.0, 0.0, 0.0, 0.0}, 1);
    REQUIRE(z.n_qubits == 3);
    CHECK(std::abs(z.amplitudes[0] - 1.0) < 1e-15);
    for (std::size_t i = 1; i < 8; ++i) CHECK(std::abs(z.amplitudes[i]) < 1e-15);

    const StateVector half = reembed({0.5, 0.5}, 1);
    CHECK(std::abs(half.amplitudes[0] - 1.0 / std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(half.amplitudes[2] - 1.0 / std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(half.amplitudes[1]) + std::abs(half.amplitudes[3]) < 1e-15);
    CHECK(std::abs(half.norm() - 1.0) <= 1e-10);

    // nonnegative-real A-part product state with B = |0> survives the round trip
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> mag(0.0, 1.0);
    StateVector prod(4);
    double nrm = 0.0;
    std::vector<double> a_part(8);
    for (std::size_t i = 0; i < 8; ++i) {
        a_part[i] = mag(rng);
        nrm += a_part[i] * a_part[i];
    }
    nrm = std::sqrt(nrm);
    for (std::size_t i = 0; i < 8; ++i) prod.amplitudes[i * 2] = a_part[i] / nrm;
    const StateVector rec = reembed(marginal_probabilities(prod, 1), 1);
    for (std::size_t i = 0; i < 16; ++i)
        CHECK(std::abs(rec.amplitudes[i] - prod.amplitudes[i]) < 1e-12);

    CHECK_THROWS(reembed({1.2, -0.2}, 1));
}

TEST_CASE("readout examples and phase insensitivity") {
    StateVector one(1);
    one.amplitudes[1] = 1.0;
    const auto r1 = readout(one);
    CHECK(r1[0] == 0.0);
    CHECK(r1[1] == 1.0);

    StateVector minus(1);
    minus.amplitudes[0] = 1.0 / std::sqrt(2.0);
    minus.amplitudes[1] = -1.0 / std::sqrt(2.0);
    const auto r2 = readout(minus);
    CHECK(std::abs(r2[0] - 1.0 / std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(r2[1] - 1.0 / std::sqrt(2.0)) < 1e-15);

    StateVector mi(2);
    mi.amplitudes[3] = cplx(0.0, -1.0);
    const auto r3 = readout(mi);
    CHECK(r3[0] == 0.0);
    CHECK(r3[3] == 1.0);

    std::mt19937_64 rng(41);
    const StateVector s = random_state(3, rng);
    const auto base = readout(s);
    // axis phases are exact under |.|; generic phases to near machine precision
    for (cplx phase : {cplx(0.0, 1.0), cplx(-1.0, 0.0), cplx(0.0, -1.0)}) {
        StateVector rotated = s;
        for (cplx& a : rotated.amplitudes) a *= phase;
        const auto r = readout(rotated);
        for (std::size_t i = 0; i < base.size(); ++i) CHECK(r[i] == base[i]);
    }
    StateVector rotated = s;
    const cplx phase = std::polar(1.0, 0.8321);
    for (cplx& a : rotated.amplitudes) a *= phase;
    const auto r = readout(rotated);
    for (std::size_t i = 0; i < base.size(); ++i) CHECK(std::abs(r[i] - base[i]) < 1e-14);
}

TEST_CASE("parameter-shift spot check for uncontrolled rotations") {
    std::mt19937_64 rng(51);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    auto [circuit, params] = build_circuit(1, BlockKind::A, ArchitectureType::Repeat,
                                           InitScheme::Random, 3, default_kept_set(3, 1),
                                           default_discarded_set(3, 1), 7);
    const StateVector in = random_state(3, rng);
    auto prob = [&](int k, double theta, std::size_t basis) {
        ParameterVector p = params;
        p[k] = theta;
        return std::norm(apply_circuit(in, circuit, p).amplitudes[basis]);
    };
    for (int k = 0; k < circuit.param_count; ++k) {
        if (is_controlled(circuit.gates[k].kind)) continue;
        const double theta = angle(rng);
        const std::size_t basis = rng() % 8;
        const double shift = (prob(k, theta + kPi / 2, basis) -
                              prob(k, theta - kPi / 2, basis)) / 2.0;
        const double h = 1e-6;
        const double fd = (prob(k, theta + h, basis) - prob(k, theta - h, basis)) / (2 * h);
        CHECK(std::abs(shift - fd) <= 1e-8);
    }
}

TEST_CASE("norm preservation and inverse law on random circuits") {
    std::mt19937_64 rng(61);
    for (BlockKind kind : {BlockKind::A, BlockKind::B, BlockKind::C, BlockKind::D}) {
        auto [circuit, params] = build_circuit(2, kind, ArchitectureType::Repeat,
                                               InitScheme::Random, 5,
                                               default_kept_set(5, 2),
                                               default_discarded_set(5, 2), rng());
        const StateVector in = random_state(5, rng);
        const StateVector mid = apply_circuit(in, circuit, params);
        CHECK(std::abs(mid.norm() - 1.0) <= 1e-10);

        // reversed gate order with negated angles undoes the circuit
        StateVector back = mid;
        for (auto it = circuit.gates.rbegin(); it != circuit.gates.rend(); ++it)
            apply_gate_inplace(back, *it, -params[it->param_index]);
        for (std::size_t i = 0; i < in.dim(); ++i)
            CHECK(std::abs(back.amplitudes[i] - in.amplitudes[i]) <= 1e-10);
    }
}

TEST_CASE("inner_real and apply_gate_deriv are consistent with finite differences") {
    std::mt19937_64 rng(71);
    const StateVector psi = random_state(3, rng);
    const StateVector probe = random_state(3, rng);
    for (GateKind kind : {GateKind::RY, GateKind::CRZ}) {
        Gate g{kind, 2, is_controlled(kind) ? 0 : -1, 0};
        const double theta = 0.7;
        const double h = 1e-6;
        const StateVector up = apply_gate(psi, g, theta + h);
        const StateVector dn = apply_gate(psi, g, theta - h);
        StateVector fd(3);
        for (std::size_t i = 0; i < 8; ++i)
            fd.amplitudes[i] = (up.amplitudes[i] - dn.amplitudes[i]) / (2 * h);
        const StateVector deriv = apply_gate_deriv(psi, g, theta);
        CHECK(std::abs(inner_real(probe, deriv) - inner_real(probe, fd)) < 1e-8);
    }
}
