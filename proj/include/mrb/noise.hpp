#pragma once
// Error-generator noise models. A gate's error map is exp(sum of rate-weighted
// Hamiltonian and stochastic Pauli generators), composed after the ideal gate
// in the Pauli-transfer-matrix picture. SPAM is a global depolarizing channel
// before measurement plus independent per-qubit readout flips.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mrb/circuit.hpp"
#include "mrb/rng.hpp"
#include "mrb/sampling.hpp"

namespace mrb {

using RMat = Eigen::MatrixXd;

struct ErrorGeneratorSet {
    // Pauli labels are letter strings over the gate's qubits, e.g. "X" or "XZ"
    // (first letter = first qubit of the gate). Identity labels are invalid.
    std::map<std::string, double> hamiltonian;
    std::map<std::string, double> stochastic;

    bool empty() const { return hamiltonian.empty() && stochastic.empty(); }
    void validate(int arity) const;
};

struct CrosstalkTerm {
    std::pair<int, int> trigger_edge;   // fires when a two-qubit gate sits here
    std::vector<int> spectators;        // qubits receiving the extra error
    ErrorGeneratorSet extra;            // labels over `spectators` in order
};

struct SpamSpec {
    double gamma = 1.0;                  // global depolarizing polarization
    std::vector<double> readout_flips;   // per-qubit bit-flip probability
    std::vector<double> prep_flips;      // per-qubit |0> -> |1| preparation flips
};

struct ErrorModel {
    // key: Gate::kind_key() + "@" + comma-joined qubits, e.g. "x_pi_2@0",
    // "cprot_z[1.570796]@0,1". A bare kind key acts as a default for all
    // placements of that kind.
    std::map<std::string, ErrorGeneratorSet> gates;
    SpamSpec spam;
    std::vector<CrosstalkTerm> crosstalk;

    const ErrorGeneratorSet* find(const Gate& g) const;
    bool purely_stochastic() const;
    // Restriction to a qubit subset (for isolated sub-experiments): keeps gate
    // entries whose placements lie inside `keep`, relabels qubits by position.
    ErrorModel restricted_to(const std::vector<int>& keep) const;
};

std::string gate_error_key(const Gate& g);

// PTM-basis generator matrices (dimension 4^arity).
RMat hamiltonian_generator(const std::string& pauli_label);
RMat stochastic_generator(const std::string& pauli_label);

// exp(sum of generators) for one generator set; dimension 4^arity.
RMat error_channel_ptm(const ErrorGeneratorSet& set, int arity);

// Ideal gate PTM on the gate's own qubits (dimension 4^arity).
RMat gate_ptm(const Gate& g);

// Choi-eigenvalue test of complete positivity plus exact trace preservation.
bool is_cptp(const RMat& ptm, double tol = 1e-10);

enum class ModelFamily : uint8_t { Stochastic, Hamiltonian, Both };

// Random per-gate model: two-qubit gates get total stochastic weight ~s and
// Hamiltonian scale ~h with h^2 + s = p, split across the 15 (resp. 3)
// non-identity Paulis by a flat Dirichlet draw; one-qubit x and idle gates use
// a tenth of the scale. Rates are drawn per qubit/edge (gate-dependent noise).
ErrorModel sample_random_model(ModelFamily family, double p, const GateSetSpec& gate_set,
                               const ConnectivityGraph& graph, Rng& rng);

std::string error_model_to_json(const ErrorModel& m);
ErrorModel error_model_from_json(const std::string& text);

}  // namespace mrb
