#include "mrb/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "mrb/errors.hpp"
#include "mrb/optim.hpp"

namespace mrb {

using nlohmann::json;

namespace {

PolarizationSample from_hamming(std::vector<double> h, int n, const std::string& id, int depth) {
    PolarizationSample s;
    s.circuit_id = id;
    s.depth = depth;
    s.n = n;
    s.hamming = std::move(h);
    double d = std::pow(4.0, n);
    double acc = 0, w = 1.0;
    for (int k = 0; k <= n; ++k) {
        acc += w * s.hamming[k];
        w *= -0.5;
    }
    s.S = d / (d - 1) * acc - 1.0 / (d - 1);
    return s;
}

std::map<int, std::vector<double>> group_by_depth(const std::vector<PolarizationSample>& samples) {
    std::map<int, std::vector<double>> g;
    for (const auto& s : samples) g[s.depth].push_back(s.S);
    return g;
}

// Core decay fit on per-depth means. With free amplitude the optimum A for a
// given p is closed-form; either way the problem reduces to one dimension.
void fit_means(const std::map<int, double>& means, bool fixed_amplitude, double& A_out,
               double& p_out) {
    if (means.size() < 2) throw UserError("fit_decay: need at least two distinct depths");
    std::vector<double> ds, ys;
    for (const auto& [d, y] : means) {
        ds.push_back(d);
        ys.push_back(y);
    }
    auto amplitude = [&](double p) {
        if (fixed_amplitude) return 1.0;
        double num = 0, den = 0;
        for (size_t i = 0; i < ds.size(); ++i) {
            double pd = std::pow(p, ds[i]);
            num += ys[i] * pd;
            den += pd * pd;
        }
        if (den <= 0) return 1.0;
        return std::clamp(num / den, 0.0, 1.0);
    };
    auto sse = [&](double p) {
        double A = amplitude(p);
        double acc = 0;
        for (size_t i = 0; i < ds.size(); ++i) {
            double e = ys[i] - A * std::pow(p, ds[i]);
            acc += e * e;
        }
        return acc;
    };
    double p = minimize_scalar(sse, 0.0, 1.0);
    A_out = amplitude(p);
    p_out = p;
}

std::map<int, double> depth_means(const std::vector<PolarizationSample>& samples) {
    std::map<int, double> means;
    for (const auto& [d, v] : group_by_depth(samples))
        means[d] = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    return means;
}

}  // namespace

PolarizationSample observed_polarization(const OutcomeHistogram& hist,
                                         const std::vector<uint8_t>& target,
                                         const std::string& circuit_id, int depth) {
    if (hist.shots == 0) throw UserError("observed_polarization: empty histogram");
    int n = static_cast<int>(target.size());
    uint64_t t = 0;
    for (int q = 0; q < n; ++q)
        if (target[q]) t |= 1ull << q;
    std::vector<double> h(n + 1, 0.0);
    for (const auto& [bits, count] : hist.counts)
        h[__builtin_popcountll(bits ^ t)] += static_cast<double>(count);
    for (auto& x : h) x /= static_cast<double>(hist.shots);
    return from_hamming(std::move(h), n, circuit_id, depth);
}

PolarizationSample exact_polarization(const Eigen::VectorXd& probs, int n,
                                      const std::vector<uint8_t>& target,
                                      const std::string& circuit_id, int depth) {
    uint64_t t = 0;
    for (int q = 0; q < n; ++q)
        if (target[q]) t |= 1ull << q;
    std::vector<double> h(n + 1, 0.0);
    for (int b = 0; b < probs.size(); ++b) h[__builtin_popcountll(b ^ t)] += probs(b);
    return from_hamming(std::move(h), n, circuit_id, depth);
}

double r_omega_from_p(double p, int n) {
    double d = std::pow(4.0, n);
    return (d - 1) * (1 - p) / d;
}

double per_qubit_rate(double r_omega, int n) {
    return 1.0 - std::pow(1.0 - r_omega, 1.0 / n);
}

static DecayFit fit_impl(const std::vector<PolarizationSample>& samples, int n,
                         bool fixed_amplitude) {
    auto means = depth_means(samples);
    DecayFit f;
    f.n = n;
    for (const auto& [d, v] : group_by_depth(samples)) {
        f.depths.push_back(d);
        f.K = std::max(f.K, static_cast<int>(v.size()));
    }
    fit_means(means, fixed_amplitude, f.A, f.p);
    f.r_omega = r_omega_from_p(f.p, n);
    f.r_per_qubit = per_qubit_rate(f.r_omega, n);
    return f;
}

DecayFit fit_decay(const std::vector<PolarizationSample>& samples, int n) {
    return fit_impl(samples, n, false);
}

DecayFit fit_decay_fixed_amplitude(const std::vector<PolarizationSample>& samples, int n) {
    return fit_impl(samples, n, true);
}

void bootstrap_decay(DecayFit& fit, const std::vector<PolarizationSample>& samples, int resamples,
                     Rng& rng, bool fixed_amplitude) {
    if (resamples < 2) throw UserError("bootstrap: need at least 2 resamples");
    std::map<int, std::vector<const PolarizationSample*>> by_depth;
    for (const auto& s : samples) by_depth[s.depth].push_back(&s);
    std::vector<double> As, ps, rs, rqs;
    int failures = 0;
    for (int r = 0; r < resamples; ++r) {
        Rng sub = rng.sub({static_cast<uint64_t>(r)});
        std::vector<PolarizationSample> resampled;
        for (const auto& [d, v] : by_depth)
            for (size_t i = 0; i < v.size(); ++i)
                resampled.push_back(*v[sub.uniform_int(0, static_cast<int>(v.size()) - 1)]);
        try {
            DecayFit f = fit_impl(resampled, fit.n, fixed_amplitude);
            As.push_back(f.A);
            ps.push_back(f.p);
            rs.push_back(f.r_omega);
            rqs.push_back(f.r_per_qubit);
        } catch (const std::exception&) {
            ++failures;
        }
    }
    if (failures * 5 > resamples)
        throw NumericError("bootstrap: unstable fit (more than 20% of resamples failed)");
    auto stddev = [](const std::vector<double>& v) {
        double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
        double acc = 0;
        for (double x : v) acc += (x - mean) * (x - mean);
        return std::sqrt(acc / (v.size() - 1));
    };
    fit.A_std = stddev(As);
    fit.p_std = stddev(ps);
    fit.r_omega_std = stddev(rs);
    fit.r_per_qubit_std = stddev(rqs);
}

EpsilonEstimate epsilon_omega_oracle(const SamplerSpec& spec, const ErrorModel& model,
                                     const std::vector<int>& depths, int K, Rng& rng) {
    int n = spec.graph.n;
    if (n > kPtmCap) throw CapacityError("epsilon_omega_oracle: n exceeds the dense cap");
    Simulator sim(model);
    std::vector<PolarizationSample> samples;
    for (size_t di = 0; di < depths.size(); ++di) {
        for (int k = 0; k < K; ++k) {
            Rng sub = rng.sub({static_cast<uint64_t>(di), static_cast<uint64_t>(k)});
            OmegaCircuit oc = sample_omega_circuit(spec, depths[di], sub);
            double F = sim.entanglement_fidelity(oc.circuit);
            PolarizationSample s;
            s.depth = depths[di];
            s.n = n;
            s.S = polarization_from_fidelity(F, n);
            samples.push_back(std::move(s));
        }
    }
    DecayFit f = fit_decay_fixed_amplitude(samples, n);
    EpsilonEstimate e;
    e.n = n;
    e.p_rc = f.p;
    e.epsilon_omega = r_omega_from_p(f.p, n);
    e.epsilon_per_qubit = per_qubit_rate(e.epsilon_omega, n);
    std::map<int, std::pair<double, int>> acc;
    for (const auto& s : samples) {
        acc[s.depth].first += s.S;
        acc[s.depth].second += 1;
    }
    for (const auto& [d, pr] : acc) {
        e.depths.push_back(d);
        e.mean_polarizations.push_back(pr.first / pr.second);
    }
    return e;
}

RelativeError relative_error(const DecayFit& fit, const EpsilonEstimate& eps) {
    if (fit.n != eps.n) throw UserError("relative_error: mismatched qubit counts");
    if (std::abs(eps.epsilon_per_qubit) < 1e-12)
        throw NumericError("relative_error: epsilon too small for a meaningful ratio");
    RelativeError out;
    out.delta_rel = (fit.r_per_qubit - eps.epsilon_per_qubit) / eps.epsilon_per_qubit;
    out.sigma = fit.r_per_qubit_std / eps.epsilon_per_qubit;
    return out;
}

std::string decay_fit_to_json(const DecayFit& f) {
    json j{{"n", f.n},
           {"A", f.A},
           {"p", f.p},
           {"r_omega", f.r_omega},
           {"r_per_qubit", f.r_per_qubit},
           {"std",
            {{"A", f.A_std},
             {"p", f.p_std},
             {"r_omega", f.r_omega_std},
             {"r_per_qubit", f.r_per_qubit_std}}},
           {"depths", f.depths},
           {"K", f.K}};
    return j.dump(2);
}

std::string depth_means_csv(const std::vector<PolarizationSample>& samples) {
    std::map<int, std::vector<double>> g;
    for (const auto& s : samples) g[s.depth].push_back(s.S);
    std::ostringstream out;
    out << "depth,mean_S,std_S,K\n";
    for (const auto& [d, v] : g) {
        double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
        double var = 0;
        for (double x : v) var += (x - mean) * (x - mean);
        double sd = v.size() > 1 ? std::sqrt(var / (v.size() - 1)) : 0.0;
        out << d << "," << mean << "," << sd << "," << v.size() << "\n";
    }
    return out.str();
}

}  // namespace mrb
