#pragma once
// Gates, layers, circuits and connectivity; JSON (de)serialization.
//
// Conventions fixed here once and for all:
//  - qubit 0 is the least-significant bit of a computational-basis index;
//  - dense matrices are column-major complex with row index varying fastest;
//  - circuits list layers in time order (layers[0] acts first);
//  - a CPRot's qubits are (control, target); its unitary is
//    |0><0| (x) I  +  |1><1| (x) exp(-i theta P / 2).

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mrb/pauli.hpp"

namespace mrb {

enum class GateKind : uint8_t {
    Idle,
    XHalfPi,       // x_{pi/2}
    ZRot,          // z_theta (virtual, error-free under every noise model)
    U3,            // five-gate composite, params (theta, phi, lambda)
    PauliAxisRot,  // exp(-i theta P / 2) for P in {X,Y,Z}
    CPRot,         // controlled Pauli-axis rotation
};

struct Gate {
    GateKind kind = GateKind::Idle;
    PauliLetter axis = PauliLetter::Z;  // PauliAxisRot / CPRot only
    std::vector<double> params;         // angles in radians
    std::vector<int> qubits;            // 1 or 2 entries

    static Gate idle(int q) { return {GateKind::Idle, PauliLetter::Z, {}, {q}}; }
    static Gate x_half_pi(int q) { return {GateKind::XHalfPi, PauliLetter::Z, {}, {q}}; }
    static Gate z_rot(int q, double theta) { return {GateKind::ZRot, PauliLetter::Z, {theta}, {q}}; }
    static Gate u3(int q, double theta, double phi, double lambda) {
        return {GateKind::U3, PauliLetter::Z, {theta, phi, lambda}, {q}};
    }
    static Gate axis_rot(int q, PauliLetter p, double theta) {
        return {GateKind::PauliAxisRot, p, {theta}, {q}};
    }
    static Gate cprot(int control, int target, PauliLetter p, double theta) {
        return {GateKind::CPRot, p, {theta}, {control, target}};
    }

    int arity() const { return static_cast<int>(qubits.size()); }
    bool is_two_qubit() const { return arity() == 2; }
    Gate inverse() const;  // negates angles; U3 inverted analytically

    // Stable identifier used as noise-model key, e.g. "cprot_z[1.570796]".
    std::string kind_key() const;
};

bool operator==(const Gate& a, const Gate& b);

enum class LayerArity : uint8_t { OneQubit, TwoQubit };

struct Layer {
    int n = 0;
    LayerArity arity = LayerArity::OneQubit;
    std::vector<Gate> gates;  // uncovered qubits are implicit idles

    // Qubits not covered by any gate.
    std::vector<int> idle_qubits() const;
    // gate index acting on qubit q, or -1.
    int gate_on(int q) const;
    void validate() const;  // throws std::invalid_argument on structural issues
    Layer inverse() const;
};

struct Circuit {
    int n = 0;
    std::vector<Layer> layers;

    void validate() const;
    // true iff layers alternate one-/two-qubit starting from a one-qubit layer.
    bool has_composite_structure() const;
};

struct ConnectivityGraph {
    int n = 0;
    std::vector<std::pair<int, int>> edges;  // stored with first < second

    static ConnectivityGraph line(int n);
    static ConnectivityGraph complete(int n);
    void validate() const;
    bool connected() const;
    int max_matching_size() const;  // exact for the small graphs used here
};

// --- JSON round-trip (schemas shared with the CLI) ---
std::string circuit_to_json(const Circuit& c);
Circuit circuit_from_json(const std::string& text);
std::string graph_to_json(const ConnectivityGraph& g);
ConnectivityGraph graph_from_json_text(const std::string& text);

}  // namespace mrb
