#pragma once
// Secondary analyses: crosstalk-free rate prediction from dressed one- and
// two-qubit rates, the two-densities linear solve, depolarizing-model fitting,
// and a small-n stochastic-Pauli maximum-likelihood fit.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mrb/analysis.hpp"
#include "mrb/engine.hpp"
#include "mrb/mirror.hpp"
#include "mrb/noise.hpp"

namespace mrb {

struct DressedRates {
    std::map<int, double> idle_rates;                    // qubit -> dressed idle infidelity
    std::map<std::pair<int, int>, double> pair_rates;    // edge -> dressed 2q gate infidelity
};

std::string dressed_rates_to_json(const DressedRates& r);
DressedRates dressed_rates_from_json(const std::string& text);

// Monte-Carlo average over sampled two-qubit layers of
// eps_L = 1 - prod_gates (1 - eps_pair) * prod_idle (1 - eps_idle).
double predict_crosstalk_free(const DressedRates& rates, const SamplerSpec& spec,
                              int layer_samples, Rng& rng);

// Isolated sub-experiments against a noise model: a single-qubit benchmark per
// qubit gives the dressed idle rate; a two-qubit benchmark per edge, combined
// with the idle rates through r = xi*eps_g + (1-xi)*(1-(1-eps_i)(1-eps_j)),
// gives the dressed pair rate. Exact distributions, no shot noise.
DressedRates measure_dressed_rates(const ErrorModel& model, const SamplerSpec& spec,
                                   const std::vector<int>& depths, int K, Rng& rng);

struct CrosstalkGap {
    double gap = 0;    // r_obs - r_pred
    double ratio = 0;  // per-qubit observed / predicted
};
CrosstalkGap crosstalk_gap(const DecayFit& observed, double predicted_r_omega);

// r_{1/2} = eps1/2 + eps2/2 ; r_{1/8} = 7 eps1/8 + eps2/8.
struct TwoDensities {
    double eps1 = 0, eps2 = 0;
    bool flagged = false;  // negative solution
};
TwoDensities two_densities_heuristic(double r_half, double r_eighth);
std::pair<double, double> two_densities_forward(double eps1, double eps2);

// --- depolarizing model ---

// One circuit reduced to its dressed-layer inventory: per dressed layer, the
// canonical component keys (two-qubit gate placements and dressed idles).
struct CircuitInventory {
    std::string circuit_id;
    int n = 0;
    double S = 0;
    std::vector<std::vector<std::string>> layers;
};

CircuitInventory inventory_of_mirror(const MirrorCircuit& mc, double S);
std::string dressed_pair_key(const Gate& two_qubit_gate);
std::string dressed_idle_key(int qubit);

struct DepolarizingFit {
    std::map<std::string, double> rates;     // component key -> infidelity
    std::vector<double> readout;             // per-qubit readout infidelity
    double mean_squared_residual = 0;
    std::vector<std::string> unidentifiable; // near-null directions, if any
    std::map<std::string, double> rate_std;  // filled by bootstrap
    std::vector<double> readout_std;
};

double depolarizing_predicted_S(const CircuitInventory& inv,
                                const std::map<std::string, double>& rates,
                                const std::vector<double>& readout);

DepolarizingFit fit_depolarizing(const std::vector<CircuitInventory>& circuits, int n);

// Circuit-resampling bootstrap; fills rate_std / readout_std on `fit`.
void bootstrap_depolarizing(DepolarizingFit& fit, const std::vector<CircuitInventory>& circuits,
                            int n, int resamples, Rng& rng);

std::string depolarizing_fit_to_json(const DepolarizingFit& f);

// --- stochastic-Pauli maximum likelihood (n <= 3) ---

struct PauliMleData {
    MirrorCircuit circuit;
    OutcomeHistogram histogram;
};

struct PauliMleFit {
    ErrorModel model;        // stochastic generator rates + SPAM flips
    double log_likelihood = 0;
    double projected_grad_norm = 0;
    bool converged = false;
};

PauliMleFit fit_pauli_stochastic(const std::vector<PauliMleData>& data, int n, Rng& rng,
                                 int starts = 3);

}  // namespace mrb
