#pragma once
// Noisy circuit simulation. Dense mode evolves the Hilbert-Schmidt vector
// (normalized Pauli basis, dimension 4^n) through per-gate transfer matrices;
// trajectory mode propagates a statevector with sampled Pauli faults and is
// restricted to purely stochastic models.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mrb/circuit.hpp"
#include "mrb/noise.hpp"
#include "mrb/rng.hpp"

namespace mrb {

inline constexpr int kPtmCap = 6;
inline constexpr int kTrajCap = 14;

struct OutcomeHistogram {
    int n = 0;
    uint64_t shots = 0;
    std::map<uint64_t, uint64_t> counts;  // bit q of the key = qubit q's outcome

    static std::string bits_str(uint64_t b, int n);
};

// Affine maps between entanglement fidelity and polarization.
double polarization_from_fidelity(double F, int n);
double fidelity_from_polarization(double gamma, int n);

class Simulator {
  public:
    explicit Simulator(ErrorModel model) : model_(std::move(model)) {}

    const ErrorModel& model() const { return model_; }

    // Exact outcome distribution (including SPAM) over 2^n bitstrings.
    Eigen::VectorXd simulate_distribution(const Circuit& c) const;

    // Statevector + sampled-Pauli-fault sampling; stochastic models only.
    OutcomeHistogram simulate_trajectories(const Circuit& c, uint64_t shots, Rng& rng) const;

    // Transfer matrix of the whole circuit (no SPAM), dimension 4^n.
    RMat circuit_ptm(const Circuit& c, bool noisy) const;

    // Tr(R_ideal^T R_noisy) / 4^n; equals the Choi-overlap definition.
    double entanglement_fidelity(const Circuit& c) const;

  private:
    void apply_layer_ptm(Eigen::MatrixXd& state, const Layer& l, int n, bool noisy) const;
    void apply_gate_ptm(Eigen::MatrixXd& state, const RMat& m, const std::vector<int>& qubits,
                        int n) const;
    const RMat& ideal_ptm(const Gate& g) const;
    const RMat& error_ptm(const ErrorGeneratorSet& set, int arity) const;
    const std::vector<double>& pauli_fault_probs(const ErrorGeneratorSet& set, int arity) const;

    ErrorModel model_;
    mutable std::map<std::string, RMat> ideal_cache_;
    mutable std::map<const ErrorGeneratorSet*, RMat> error_cache_;
    mutable std::map<const ErrorGeneratorSet*, std::vector<double>> fault_cache_;
};

OutcomeHistogram sample_histogram(const Eigen::VectorXd& probs, int n, uint64_t shots, Rng& rng);

// CSV with columns circuit_id, depth, bitstring, count.
std::string histograms_csv(const std::vector<std::tuple<std::string, int, OutcomeHistogram>>& rows);
std::vector<std::tuple<std::string, int, OutcomeHistogram>> histograms_from_csv(
    const std::string& text);

}  // namespace mrb
