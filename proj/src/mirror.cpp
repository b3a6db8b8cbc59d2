#include "mrb/mirror.hpp"

#include <cmath>

#include "json.hpp"
#include "mrb/errors.hpp"
#include "mrb/unitary.hpp"

namespace mrb {

using nlohmann::json;

std::string MirrorCircuit::target_str() const {
    std::string s;
    for (uint8_t b : target) s += b ? '1' : '0';
    return s;
}

namespace {

// Sign carried by conjugating the rotation sign with the target-qubit letter:
// +1 iff the letter commutes with the rotation axis.
int axis_sign(PauliLetter letter, PauliLetter axis) {
    return letters_anticommute(letter, axis) ? -1 : +1;
}

bool flips_angle(PauliLetter control_letter, PauliLetter target_letter, PauliLetter axis) {
    bool c_anti = letters_anticommute(control_letter, PauliLetter::Z);
    bool t_anti = letters_anticommute(target_letter, axis);
    return c_anti != t_anti;
}

PauliString random_pauli(int n, Rng& rng) {
    PauliString p(n);
    for (int q = 0; q < n; ++q) p.letters[q] = static_cast<PauliLetter>(rng.uniform_int(0, 3));
    return p;
}

Layer all_idle_two_qubit(int n) {
    Layer l{n, LayerArity::TwoQubit, {}};
    return l;
}

// Fold a per-qubit chain of 2x2 factors (rightmost acts first) into one U3.
Gate fold_to_u3(int q, const std::vector<Mat2>& factors) {
    Mat2 m = Mat2::Identity();
    for (const auto& f : factors) m = m * f;
    U3Angles a = u3_angles_from_unitary(m);
    return Gate::u3(q, a.theta, a.phi, a.lambda);
}

Mat2 one_qubit_gate_matrix(const Layer& l, int q) {
    int gi = l.gate_on(q);
    if (gi < 0) return Mat2::Identity();
    return gate_unitary(l.gates[gi]);
}

}  // namespace

Layer two_qubit_transform(const Layer& layer, const PauliString& pauli) {
    if (layer.arity != LayerArity::TwoQubit)
        throw UserError("two_qubit_transform: expected a two-qubit layer");
    if (pauli.n() != layer.n) throw UserError("two_qubit_transform: size mismatch");
    Layer out = layer;
    for (auto& g : out.gates) {
        if (g.kind == GateKind::Idle) continue;
        if (g.kind != GateKind::CPRot)
            throw UserError("two_qubit_transform: non-CPRot gate in two-qubit layer");
        PauliLetter a = pauli.letters[g.qubits[0]];
        PauliLetter b = pauli.letters[g.qubits[1]];
        if (flips_angle(a, b, g.axis)) g.params[0] = -g.params[0];
    }
    return out;
}

std::vector<Gate> correction_gates(const PauliString& prev_pauli, const Layer& two_qubit_layer) {
    if (two_qubit_layer.arity != LayerArity::TwoQubit)
        throw UserError("correction_gates: expected a two-qubit layer");
    std::vector<Gate> out;
    for (const auto& g : two_qubit_layer.gates) {
        if (g.kind == GateKind::Idle) continue;
        PauliLetter a = prev_pauli.letters[g.qubits[0]];
        PauliLetter b = prev_pauli.letters[g.qubits[1]];
        if (letters_anticommute(a, PauliLetter::Z)) {
            double s = axis_sign(b, g.axis);
            out.push_back(Gate::axis_rot(g.qubits[1], g.axis, s * g.params[0]));
        }
    }
    return out;
}

MirrorCircuit build_mirror(const OmegaCircuit& omega, Rng& rng,
                           const std::vector<PauliString>* fixed_paulis) {
    const int n = omega.circuit.n;
    const int m = omega.benchmark_depth_half;
    const int d = 2 * m;

    // Unfolded mirror: one-qubit layers G_0..G_{d+1}, two-qubit layers
    // Gt_1..Gt_{d+1} with Gt_{m+1} an all-idle placeholder at the reflection.
    std::vector<Layer> one_q(d + 2), two_q(d + 2);
    one_q[0] = omega.circuit.layers[0];
    for (int i = 1; i <= m; ++i) {
        two_q[i] = omega.circuit.layers[2 * i - 1];
        one_q[i] = omega.circuit.layers[2 * i];
    }
    two_q[m + 1] = all_idle_two_qubit(n);
    for (int i = m + 1; i <= d; ++i) one_q[i] = omega.circuit.layers[2 * (d + 1 - i)].inverse();
    for (int i = m + 2; i <= d + 1; ++i)
        two_q[i] = omega.circuit.layers[2 * (d + 2 - i) - 1].inverse();
    one_q[d + 1] = omega.circuit.layers[0].inverse();

    // Pauli frame
    std::vector<PauliString> paulis;
    if (fixed_paulis) {
        if (static_cast<int>(fixed_paulis->size()) != d + 2)
            throw UserError("build_mirror: expected d+2 fixed Pauli layers");
        paulis = *fixed_paulis;
    } else {
        for (int i = 0; i <= d + 1; ++i) paulis.push_back(random_pauli(n, rng));
    }

    MirrorCircuit mc;
    mc.circuit.n = n;
    mc.benchmark_depth = d;
    mc.seed = rng.seed();
    mc.inserted_paulis = paulis;

    // First layer: fold Q_0 after L_0.
    {
        Layer e{n, LayerArity::OneQubit, {}};
        for (int q = 0; q < n; ++q)
            e.gates.push_back(fold_to_u3(
                q, {pauli_letter_matrix(paulis[0].letters[q]), one_qubit_gate_matrix(one_q[0], q)}));
        mc.circuit.layers.push_back(std::move(e));
    }

    for (int i = 1; i <= d + 1; ++i) {
        if (i != m + 1) mc.circuit.layers.push_back(two_qubit_transform(two_q[i], paulis[i - 1]));
        // Residual rotations from pushing Q_{i-1} through the two-qubit layer.
        std::vector<Mat2> rot(n, Mat2::Identity());
        for (const auto& g : correction_gates(paulis[i - 1], two_q[i]))
            rot[g.qubits[0]] = gate_unitary(g) * rot[g.qubits[0]];
        Layer e{n, LayerArity::OneQubit, {}};
        for (int q = 0; q < n; ++q)
            e.gates.push_back(fold_to_u3(q, {pauli_letter_matrix(paulis[i].letters[q]),
                                             one_qubit_gate_matrix(one_q[i], q),
                                             pauli_letter_matrix(paulis[i - 1].letters[q]),
                                             rot[q]}));
        mc.circuit.layers.push_back(std::move(e));
    }

    // Overall action is the final frame Pauli: X/Y letters flip the bit.
    mc.target.assign(n, 0);
    for (int q = 0; q < n; ++q) {
        PauliLetter l = paulis[d + 1].letters[q];
        mc.target[q] = (l == PauliLetter::X || l == PauliLetter::Y) ? 1 : 0;
    }
    return mc;
}

bool transform_properties_check(const Layer& layer, const PauliString& p1, const PauliString& p2) {
    auto same = [](const Layer& a, const Layer& b) {
        if (a.gates.size() != b.gates.size()) return false;
        for (size_t i = 0; i < a.gates.size(); ++i) {
            const Gate &x = a.gates[i], &y = b.gates[i];
            if (x.kind != y.kind || x.axis != y.axis || x.qubits != y.qubits) return false;
            for (size_t j = 0; j < x.params.size(); ++j)
                if (std::abs(x.params[j] - y.params[j]) > 1e-12) return false;
        }
        return true;
    };
    Layer t1 = two_qubit_transform(layer, p1);
    if (!same(two_qubit_transform(t1, p1), layer)) return false;                       // involution
    if (!same(two_qubit_transform(layer.inverse(), p1), t1.inverse())) return false;   // inverses
    if (!same(two_qubit_transform(t1, p2), two_qubit_transform(layer, pauli_mul(p2, p1))))
        return false;                                                                  // composition
    if (!same(two_qubit_transform(t1.inverse(), p1), layer.inverse())) return false;
    return true;
}

std::string mirror_to_json(const MirrorCircuit& m) {
    json j = json::parse(circuit_to_json(m.circuit));
    j["target"] = m.target_str();
    j["benchmark_depth"] = m.benchmark_depth;
    j["seed_path"] = json::array({m.seed});
    j["paulis"] = json::array();
    for (const auto& p : m.inserted_paulis) j["paulis"].push_back(p.str());
    return j.dump(2);
}

MirrorCircuit mirror_from_json(const std::string& text) {
    json j = json::parse(text);
    MirrorCircuit m;
    m.circuit = circuit_from_json(text);
    std::string t = j.at("target").get<std::string>();
    for (char c : t) m.target.push_back(c == '1' ? 1 : 0);
    m.benchmark_depth = j.at("benchmark_depth").get<int>();
    if (j.contains("seed_path") && !j["seed_path"].empty())
        m.seed = j["seed_path"][0].get<uint64_t>();
    if (j.contains("paulis"))
        for (const auto& p : j["paulis"])
            m.inserted_paulis.push_back(PauliString::from_str(p.get<std::string>()));
    return m;
}

}  // namespace mrb
