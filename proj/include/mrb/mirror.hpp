#pragma once
// Mirror-circuit construction: reflect an Omega circuit through its layerwise
// inverse and randomize the Pauli frame, extending frame propagation through
// non-Clifford controlled Pauli-axis rotations by flipping rotation signs and
// emitting single-qubit axis-rotation corrections.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mrb/circuit.hpp"
#include "mrb/pauli.hpp"
#include "mrb/rng.hpp"
#include "mrb/sampling.hpp"

namespace mrb {

struct MirrorCircuit {
    Circuit circuit;               // 2*benchmark_depth + 2 layers
    std::vector<uint8_t> target;   // target bitstring, target[q] for qubit q
    int benchmark_depth = 0;       // composite layers in the full mirror
    uint64_t seed = 0;
    std::vector<PauliString> inserted_paulis;  // Q_0 ... Q_{d+1}

    std::string target_str() const;  // "q0 q1 ..." order, e.g. "0110"
};

// Sign-flip rule for frame propagation through a two-qubit layer: a
// CPRot(P, theta) on (control, target) becomes CPRot(P, -theta) iff exactly
// one of {control letter anticommutes with Z, target letter anticommutes
// with P} holds. Idles pass through.
Layer two_qubit_transform(const Layer& layer, const PauliString& pauli);

// Single-qubit residual layer C with U(C) = U(prev_pauli) * U(R) where R holds
// the axis-rotation corrections of the conjugation identity; satisfies
// U(C) = U(prev) * U(Ltheta) * U(prev) * U(T(Ltheta, prev))^-1 up to phase.
// Returned as explicit gates (Pauli rotations + frame Paulis), not yet folded.
std::vector<Gate> correction_gates(const PauliString& prev_pauli, const Layer& two_qubit_layer);

// Full construction. When `fixed_paulis` is given it must hold d+2 strings and
// replaces the random draw (used by exhaustive twirling tests).
MirrorCircuit build_mirror(const OmegaCircuit& omega, Rng& rng,
                           const std::vector<PauliString>* fixed_paulis = nullptr);

// Frame-transformation identities: T(T(L,p1),p1)=L, T(L^-1,p1)=T(L,p1)^-1,
// T(T(L,p1),p2)=T(L,p2*p1), T(T(L,p1)^-1,p1)=L^-1.
bool transform_properties_check(const Layer& layer, const PauliString& p1, const PauliString& p2);

std::string mirror_to_json(const MirrorCircuit& m);
MirrorCircuit mirror_from_json(const std::string& text);

}  // namespace mrb
