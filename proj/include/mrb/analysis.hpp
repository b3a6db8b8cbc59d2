#pragma once
// Benchmark analysis: observed polarization, exponential decay fits, bootstrap
// uncertainties, and the exact-fidelity oracle for the layer error rate.

#include <cstdint>
#include <string>
#include <vector>

#include "mrb/engine.hpp"
#include "mrb/noise.hpp"
#include "mrb/rng.hpp"
#include "mrb/sampling.hpp"

namespace mrb {

struct PolarizationSample {
    std::string circuit_id;
    int depth = 0;
    int n = 0;
    double S = 0;                   // Hamming-weighted success statistic
    std::vector<double> hamming;    // h_0 .. h_n
};

// S = 4^n/(4^n-1) * sum_k (-1/2)^k h_k - 1/(4^n-1)
PolarizationSample observed_polarization(const OutcomeHistogram& hist,
                                         const std::vector<uint8_t>& target,
                                         const std::string& circuit_id = "", int depth = 0);
// Same statistic on an exact distribution (infinite-shot limit).
PolarizationSample exact_polarization(const Eigen::VectorXd& probs, int n,
                                      const std::vector<uint8_t>& target,
                                      const std::string& circuit_id = "", int depth = 0);

struct DecayFit {
    int n = 0;
    double A = 1, p = 1;
    double r_omega = 0, r_per_qubit = 0;
    double A_std = 0, p_std = 0, r_omega_std = 0, r_per_qubit_std = 0;
    std::vector<int> depths;
    int K = 0;  // circuits per depth (max across depths)
};

double r_omega_from_p(double p, int n);
double per_qubit_rate(double r_omega, int n);

// Least-squares fit of per-depth mean S to A * p^depth, A and p in [0,1].
DecayFit fit_decay(const std::vector<PolarizationSample>& samples, int n);
// Same but with A fixed to 1 (oracle-style fit).
DecayFit fit_decay_fixed_amplitude(const std::vector<PolarizationSample>& samples, int n);

// Nonparametric bootstrap: resample circuits within each depth, refit, fill
// the *_std fields of `fit`.
void bootstrap_decay(DecayFit& fit, const std::vector<PolarizationSample>& samples, int resamples,
                     Rng& rng, bool fixed_amplitude = false);

struct EpsilonEstimate {
    int n = 0;
    double p_rc = 1;
    double epsilon_omega = 0;
    double epsilon_per_qubit = 0;
    std::vector<int> depths;
    std::vector<double> mean_polarizations;
};

// Ground-truth decay rate: exact entanglement fidelities of K sampled
// Omega circuits per depth, converted to polarization and fit to p_rc^depth.
EpsilonEstimate epsilon_omega_oracle(const SamplerSpec& spec, const ErrorModel& model,
                                     const std::vector<int>& depths, int K, Rng& rng);

struct RelativeError {
    double delta_rel = 0;
    double sigma = 0;
};

RelativeError relative_error(const DecayFit& fit, const EpsilonEstimate& eps);

std::string decay_fit_to_json(const DecayFit& f);
std::string depth_means_csv(const std::vector<PolarizationSample>& samples);

}  // namespace mrb
