#include "doctest.h"

#include <cmath>

#include "mrb/circuit.hpp"
#include "mrb/rng.hpp"
#include "mrb/unitary.hpp"

using namespace mrb;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("five-gate decomposition: angle extraction reproduces the unitary") {
    Rng rng(201);
    for (int trial = 0; trial < 100; ++trial) {
        double th = rng.uniform(-2 * kPi, 2 * kPi);
        double ph = rng.uniform(-2 * kPi, 2 * kPi);
        double la = rng.uniform(-2 * kPi, 2 * kPi);
        Mat2 u = u3_matrix(th, ph, la);
        U3Angles a = u3_angles_from_unitary(u);
        REQUIRE(equal_up_to_phase(u3_matrix(a.theta, a.phi, a.lambda), u, 1e-10));
    }
}

TEST_CASE("five-gate decomposition handles axis-aligned specials") {
    for (const Mat2& u : {rot_z(0.7), rot_x(1.3), rot_z(kPi), rot_x(kPi),
                          Mat2(Mat2::Identity())}) {
        U3Angles a = u3_angles_from_unitary(u);
        CHECK(equal_up_to_phase(u3_matrix(a.theta, a.phi, a.lambda), u, 1e-10));
    }
}

TEST_CASE("gate inverses cancel up to phase") {
    Rng rng(202);
    for (int trial = 0; trial < 50; ++trial) {
        Gate u = Gate::u3(0, rng.uniform(0, kPi), rng.uniform(-kPi, kPi), rng.uniform(-kPi, kPi));
        Mat prod = gate_unitary(u.inverse()) * gate_unitary(u);
        CHECK(equal_up_to_phase(prod, Mat::Identity(2, 2), 1e-10));
    }
    Gate cs = Gate::cprot(0, 1, PauliLetter::Z, kPi / 2);
    Mat prod = gate_unitary(cs.inverse()) * gate_unitary(cs);
    CHECK((prod - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("controlled rotation matches its defining block form") {
    // U = |0><0| (x) I + |1><1| (x) exp(-i theta P/2), qubits = (control, target),
    // basis index = control_bit + 2 * target_bit.
    Rng rng(205);
    for (PauliLetter p : {PauliLetter::X, PauliLetter::Y, PauliLetter::Z}) {
        double th = rng.uniform(-kPi, kPi);
        Mat u = gate_unitary(Gate::cprot(0, 1, p, th));
        Mat2 r = rot_axis(p, th);
        Mat expect = Mat::Zero(4, 4);
        for (int t = 0; t < 2; ++t)
            for (int t2 = 0; t2 < 2; ++t2) {
                expect(0 + 2 * t, 0 + 2 * t2) = t == t2 ? 1.0 : 0.0;  // control = 0
                expect(1 + 2 * t, 1 + 2 * t2) = r(t, t2);             // control = 1
            }
        REQUIRE((u - expect).cwiseAbs().maxCoeff() < 1e-12);
    }
    // Swapping (control, target) swaps which global qubit conditions the rotation.
    Gate g01 = Gate::cprot(0, 1, PauliLetter::X, 0.7);
    Gate g10 = Gate::cprot(1, 0, PauliLetter::X, 0.7);
    Mat e01 = embed_unitary(gate_unitary(g01), g01.qubits, 2);
    Mat e10 = embed_unitary(gate_unitary(g10), g10.qubits, 2);
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(4);
    v(2) = 1;  // q0 = 0, q1 = 1
    CHECK(std::abs((e01 * v)(2) - 1.0) < 1e-12);       // control q0 inactive
    CHECK(std::abs((e10 * v)(2)) < 1.0 - 1e-6);        // control q1 active: rotates q0
}

TEST_CASE("circuit unitary equals the reversed layer product") {
    Rng rng(203);
    Circuit c;
    c.n = 3;
    for (int l = 0; l < 4; ++l) {
        Layer lay;
        lay.n = 3;
        if (l % 2 == 0) {
            lay.arity = LayerArity::OneQubit;
            for (int q = 0; q < 3; ++q)
                lay.gates.push_back(Gate::u3(q, rng.uniform(0, kPi), rng.uniform(-kPi, kPi),
                                             rng.uniform(-kPi, kPi)));
        } else {
            lay.arity = LayerArity::TwoQubit;
            lay.gates.push_back(Gate::cprot(0, 1, PauliLetter::Z, kPi / 2));
            lay.gates.push_back(Gate::idle(2));
        }
        c.layers.push_back(lay);
    }
    c.validate();
    Mat manual = Mat::Identity(8, 8);
    for (const auto& lay : c.layers) manual = layer_unitary(lay) * manual;
    CHECK((circuit_unitary(c) - manual).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(c.has_composite_structure());
}

TEST_CASE("embedding respects qubit order and little-endian indexing") {
    // X on qubit 0 of 2 flips the least significant bit.
    Mat x = pauli_letter_matrix(PauliLetter::X);
    Mat e = embed_unitary(x, {0}, 2);
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(4);
    v(0) = 1;
    CHECK(std::abs((e * v)(1) - 1.0) < 1e-12);
    Mat e1 = embed_unitary(x, {1}, 2);
    CHECK(std::abs((e1 * v)(2) - 1.0) < 1e-12);
}

TEST_CASE("circuit JSON round-trips byte-identically") {
    Rng rng(204);
    Circuit c;
    c.n = 2;
    Layer l1{2, LayerArity::OneQubit, {Gate::u3(0, 0.3, -0.4, 1.9), Gate::u3(1, 1.1, 0.0, -2.2)}};
    Layer l2{2, LayerArity::TwoQubit, {Gate::cprot(1, 0, PauliLetter::Z, -kPi / 2)}};
    c.layers = {l1, l2};
    std::string j = circuit_to_json(c);
    Circuit c2 = circuit_from_json(j);
    CHECK(circuit_to_json(c2) == j);
    CHECK((circuit_unitary(c) - circuit_unitary(c2)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("connectivity graphs and matchings") {
    ConnectivityGraph line = ConnectivityGraph::line(4);
    CHECK(line.edges.size() == 3);
    CHECK(line.connected());
    CHECK(line.max_matching_size() == 2);
    ConnectivityGraph k3 = ConnectivityGraph::complete(3);
    CHECK(k3.edges.size() == 3);
    CHECK(k3.max_matching_size() == 1);
    std::string j = graph_to_json(line);
    CHECK(graph_to_json(graph_from_json_text(j)) == j);
}

TEST_CASE("layer structure helpers") {
    Layer l{3, LayerArity::TwoQubit, {Gate::cprot(2, 1, PauliLetter::Z, kPi)}};
    auto idles = l.idle_qubits();
    REQUIRE(idles.size() == 1);
    CHECK(idles[0] == 0);
    CHECK(l.gate_on(1) == 0);
    CHECK(l.gate_on(0) == -1);
    CHECK_THROWS(([&] {
        Layer bad{2, LayerArity::OneQubit, {Gate::u3(0, 1, 1, 1), Gate::u3(0, 1, 1, 1)}};
        bad.validate();
    }()));
}

TEST_CASE("gate kind keys are stable identifiers") {
    CHECK(Gate::x_half_pi(0).kind_key() == "x_pi_2");
    CHECK(Gate::idle(3).kind_key() == "idle");
    CHECK(Gate::cprot(0, 1, PauliLetter::Z, kPi / 2).kind_key() ==
          Gate::cprot(1, 0, PauliLetter::Z, kPi / 2).kind_key());
}
