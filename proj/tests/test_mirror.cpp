#include "doctest.h"

#include <cmath>

#include "mrb/mirror.hpp"
#include "mrb/rng.hpp"
#include "mrb/sampling.hpp"
#include "mrb/unitary.hpp"

using namespace mrb;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<PauliString> all_two_qubit_paulis() {
    std::vector<PauliString> out;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            out.push_back(PauliString({static_cast<PauliLetter>(a), static_cast<PauliLetter>(b)}));
    return out;
}

// Success amplitude of the mirror on its target bitstring, computed densely.
double dense_success(const MirrorCircuit& mc) {
    Mat u = circuit_unitary(mc.circuit);
    uint64_t t = 0;
    for (size_t q = 0; q < mc.target.size(); ++q)
        if (mc.target[q]) t |= 1ull << q;
    return std::norm(u(static_cast<int>(t), 0));
}

}  // namespace

TEST_CASE("noiseless mirrors concentrate all amplitude on the target") {
    std::vector<GateSetSpec> sets = {GateSetSpec::su2_cs(), GateSetSpec::su2_cz(),
                                     GateSetSpec::clifford_cz(), GateSetSpec::su2_cnot()};
    Rng rng(401);
    for (size_t s = 0; s < sets.size(); ++s) {
        for (int n = 1; n <= 3; ++n) {
            SamplerSpec spec = SamplerSpec::make(sets[s], ConnectivityGraph::line(n), 0.5, 20 + s);
            for (int half = 0; half <= 3; ++half) {
                Rng sub = rng.sub({s, static_cast<uint64_t>(n), static_cast<uint64_t>(half)});
                OmegaCircuit oc = sample_omega_circuit(spec, half, sub);
                MirrorCircuit mc = build_mirror(oc, sub);
                CHECK(mc.benchmark_depth == 2 * half);
                CHECK(mc.circuit.layers.size() == static_cast<size_t>(4 * half + 2));
                REQUIRE(dense_success(mc) > 1.0 - 1e-10);
            }
        }
    }
}

TEST_CASE("frame transformation identities hold exhaustively at n=2") {
    Layer cs{2, LayerArity::TwoQubit, {Gate::cprot(0, 1, PauliLetter::Z, kPi / 2)}};
    Layer cnot{2, LayerArity::TwoQubit, {Gate::cprot(1, 0, PauliLetter::X, kPi)}};
    for (const Layer& l : {cs, cnot})
        for (const auto& p1 : all_two_qubit_paulis())
            for (const auto& p2 : all_two_qubit_paulis())
                REQUIRE(transform_properties_check(l, p1, p2));
}

TEST_CASE("frame transformation identities hold on sampled 4-qubit layers") {
    SamplerSpec spec = SamplerSpec::make(GateSetSpec::su2_cs(), ConnectivityGraph::line(4), 0.75, 5);
    Rng rng(402);
    for (int trial = 0; trial < 20; ++trial) {
        Layer l = sample_two_qubit_layer(spec, rng);
        PauliString p1(4), p2(4);
        for (int q = 0; q < 4; ++q) {
            p1.letters[q] = static_cast<PauliLetter>(rng.uniform_int(0, 3));
            p2.letters[q] = static_cast<PauliLetter>(rng.uniform_int(0, 3));
        }
        REQUIRE(transform_properties_check(l, p1, p2));
    }
}

TEST_CASE("Pauli conjugation of a two-qubit layer equals transform plus corrections") {
    // U(P) U(L) U(P) == U(C) U(T(L, P)) up to phase, where C is the folded
    // correction layer with the frame Pauli itself divided out.
    Rng rng(403);
    SamplerSpec spec = SamplerSpec::make(GateSetSpec::su2_cs(), ConnectivityGraph::line(2), 1.0, 6);
    for (const auto& p : all_two_qubit_paulis()) {
        Layer l = sample_two_qubit_layer(spec, rng);
        Layer t = two_qubit_transform(l, p);
        std::vector<Gate> corr = correction_gates(p, l);
        Mat c = Mat::Identity(4, 4);
        for (const auto& g : corr) c = embed_unitary(gate_unitary(g), g.qubits, 2) * c;
        // correction_gates returns C with U(C) U(T) = U(P) U(L) U(P) up to phase.
        Mat lhs = pauli_matrix(p) * layer_unitary(l) * pauli_matrix(p);
        Mat rhs = c * layer_unitary(t);
        REQUIRE(equal_up_to_phase(lhs, rhs, 1e-9));
    }
}

TEST_CASE("the target bitstring is the X/Y support of the final frame Pauli") {
    SamplerSpec spec = SamplerSpec::make(GateSetSpec::su2_cnot(), ConnectivityGraph::line(3), 0.5,
                                         17);
    Rng rng(404);
    for (int trial = 0; trial < 10; ++trial) {
        Rng sub = rng.sub({static_cast<uint64_t>(trial)});
        OmegaCircuit oc = sample_omega_circuit(spec, 2, sub);
        MirrorCircuit mc = build_mirror(oc, sub);
        REQUIRE(mc.inserted_paulis.size() == static_cast<size_t>(mc.benchmark_depth + 2));
        const PauliString& last = mc.inserted_paulis.back();
        for (int q = 0; q < 3; ++q) {
            bool xy = last.letters[q] == PauliLetter::X || last.letters[q] == PauliLetter::Y;
            CHECK(static_cast<bool>(mc.target[q]) == xy);
        }
    }
}

TEST_CASE("fixed identity frame gives the all-zero target") {
    SamplerSpec spec = SamplerSpec::make(GateSetSpec::su2_cs(), ConnectivityGraph::line(2), 0.5, 8);
    Rng rng(405);
    OmegaCircuit oc = sample_omega_circuit(spec, 2, rng);
    std::vector<PauliString> ids(oc.benchmark_depth_half * 2 + 2, PauliString::identity(2));
    MirrorCircuit mc = build_mirror(oc, rng, &ids);
    for (auto b : mc.target) CHECK(b == 0);
    CHECK(dense_success(mc) > 1.0 - 1e-10);
}

TEST_CASE("mirror construction is deterministic and JSON round-trips") {
    SamplerSpec spec = SamplerSpec::make(GateSetSpec::su2_cz(), ConnectivityGraph::line(3), 0.5, 2);
    Rng a(99), b(99);
    OmegaCircuit oa = sample_omega_circuit(spec, 3, a);
    OmegaCircuit ob = sample_omega_circuit(spec, 3, b);
    MirrorCircuit ma = build_mirror(oa, a);
    MirrorCircuit mb = build_mirror(ob, b);
    std::string ja = mirror_to_json(ma);
    CHECK(ja == mirror_to_json(mb));
    MirrorCircuit rt = mirror_from_json(ja);
    CHECK(mirror_to_json(rt) == ja);
    CHECK(dense_success(rt) > 1.0 - 1e-10);
}
