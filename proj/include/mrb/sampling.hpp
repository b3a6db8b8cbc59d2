#pragma once
// Omega-distributed circuit sampling: random matchings of two-qubit gates with
// target density xi ("edge grab"), and per-qubit one-qubit gates drawn from
// Haar-SU(2) or the 24-element single-qubit Clifford group.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mrb/circuit.hpp"
#include "mrb/rng.hpp"

namespace mrb {

enum class OneQubitSet : uint8_t { HaarSU2, Clifford24 };

struct TwoQubitPrototype {
    PauliLetter axis;
    double theta;
};

struct GateSetSpec {
    OneQubitSet one_qubit = OneQubitSet::HaarSU2;
    std::vector<TwoQubitPrototype> two_qubit;

    // Every (axis, theta) must have (axis, -theta) present, angles mod 2*pi.
    bool closed_under_inverses() const;

    static GateSetSpec su2_cs();      // SU(2) + {cs, cs*}
    static GateSetSpec su2_cz();      // SU(2) + {cz}
    static GateSetSpec clifford_cz(); // Clifford24 + {cz}
    static GateSetSpec su2_cnot();    // SU(2) + {cnot}
};

struct SamplerSpec {
    GateSetSpec gate_set;
    ConnectivityGraph graph;
    double xi = 0.5;
    uint64_t seed = 0;
    bool density_reachable = true;  // set false when xi*n/2 exceeds max matching

    static SamplerSpec make(GateSetSpec gs, ConnectivityGraph g, double xi, uint64_t seed);
};

std::string sampler_spec_to_json(const SamplerSpec& s);
SamplerSpec sampler_spec_from_json(const std::string& text);

struct OmegaCircuit {
    Circuit circuit;             // [L0][Ltheta L][Ltheta L]...
    int benchmark_depth_half = 0;  // number of composite layers
};

// The 24 single-qubit Cliffords as five-gate-decomposition angle triples.
const std::vector<std::array<double, 3>>& clifford24_u3_table();

// Haar-distributed SU(2) element expressed as a U3 gate on qubit q.
Gate sample_haar_u3(int q, Rng& rng);

Layer sample_one_qubit_layer(const SamplerSpec& spec, Rng& rng);
Layer sample_two_qubit_layer(const SamplerSpec& spec, Rng& rng);
OmegaCircuit sample_omega_circuit(const SamplerSpec& spec, int half_depth, Rng& rng);

// Re-dress an existing skeleton: same two-qubit-gate locations, gates redrawn
// from each variant's prototype set; one-qubit gates resampled per variant.
std::vector<OmegaCircuit> sample_correlated_designs(const OmegaCircuit& base,
                                                    const std::vector<GateSetSpec>& variants,
                                                    const SamplerSpec& spec, Rng& rng);

}  // namespace mrb
