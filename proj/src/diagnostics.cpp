#include "mrb/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include <Eigen/SVD>

#include "json.hpp"
#include "mrb/errors.hpp"
#include "mrb/optim.hpp"

namespace mrb {

using nlohmann::json;

// --- dressed rates ---

std::string dressed_rates_to_json(const DressedRates& r) {
    json idle = json::object();
    for (const auto& [q, e] : r.idle_rates) idle[std::to_string(q)] = e;
    json pairs = json::array();
    for (const auto& [edge, e] : r.pair_rates)
        pairs.push_back({{"edge", {edge.first, edge.second}}, {"eps", e}});
    return json{{"idle", idle}, {"pairs", pairs}}.dump(2);
}

DressedRates dressed_rates_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw UserError(std::string("dressed rates JSON: ") + e.what());
    }
    DressedRates r;
    for (const auto& [k, v] : j.at("idle").items()) r.idle_rates[std::stoi(k)] = v.get<double>();
    for (const auto& p : j.at("pairs")) {
        int a = p.at("edge")[0].get<int>(), b = p.at("edge")[1].get<int>();
        r.pair_rates[{std::min(a, b), std::max(a, b)}] = p.at("eps").get<double>();
    }
    return r;
}

double predict_crosstalk_free(const DressedRates& rates, const SamplerSpec& spec,
                              int layer_samples, Rng& rng) {
    if (layer_samples < 1) throw UserError("predict_crosstalk_free: need at least one sample");
    for (int q = 0; q < spec.graph.n; ++q)
        if (!rates.idle_rates.count(q))
            throw UserError("predict_crosstalk_free: missing idle rate for qubit " +
                            std::to_string(q));
    for (const auto& e : spec.graph.edges)
        if (!rates.pair_rates.count(e))
            throw UserError("predict_crosstalk_free: missing pair rate for edge " +
                            std::to_string(e.first) + "-" + std::to_string(e.second));
    double acc = 0;
    for (int s = 0; s < layer_samples; ++s) {
        Layer l = sample_two_qubit_layer(spec, rng);
        double keep = 1.0;
        for (const auto& g : l.gates) {
            if (g.kind != GateKind::CPRot) continue;
            int a = std::min(g.qubits[0], g.qubits[1]);
            int b = std::max(g.qubits[0], g.qubits[1]);
            keep *= 1.0 - rates.pair_rates.at({a, b});
        }
        std::set<int> busy;
        for (const auto& g : l.gates)
            if (g.kind == GateKind::CPRot) busy.insert(g.qubits.begin(), g.qubits.end());
        for (int q = 0; q < spec.graph.n; ++q)
            if (!busy.count(q)) keep *= 1.0 - rates.idle_rates.at(q);
        acc += 1.0 - keep;
    }
    return acc / layer_samples;
}

namespace {

// Exact-distribution mirror benchmark of a (restricted) model; free amplitude.
double isolated_r_omega(const ErrorModel& model, const SamplerSpec& spec,
                        const std::vector<int>& depths, int K, Rng& rng) {
    Simulator sim(model);
    std::vector<PolarizationSample> samples;
    for (size_t di = 0; di < depths.size(); ++di) {
        if (depths[di] % 2 != 0) throw UserError("benchmark depths must be even");
        for (int k = 0; k < K; ++k) {
            Rng sub = rng.sub({static_cast<uint64_t>(di), static_cast<uint64_t>(k)});
            OmegaCircuit oc = sample_omega_circuit(spec, depths[di] / 2, sub);
            MirrorCircuit mc = build_mirror(oc, sub);
            Eigen::VectorXd probs = sim.simulate_distribution(mc.circuit);
            samples.push_back(
                exact_polarization(probs, spec.graph.n, mc.target, "", mc.benchmark_depth));
        }
    }
    return fit_decay(samples, spec.graph.n).r_omega;
}

}  // namespace

DressedRates measure_dressed_rates(const ErrorModel& model, const SamplerSpec& spec,
                                   const std::vector<int>& depths, int K, Rng& rng) {
    DressedRates out;
    for (int q = 0; q < spec.graph.n; ++q) {
        SamplerSpec s1 = SamplerSpec::make(spec.gate_set, ConnectivityGraph::line(1), spec.xi,
                                           spec.seed);
        Rng sub = rng.sub({1, static_cast<uint64_t>(q)});
        out.idle_rates[q] = isolated_r_omega(model.restricted_to({q}), s1, depths, K, sub);
    }
    double xi_eff = std::min(1.0, spec.xi);
    for (const auto& [i, j] : spec.graph.edges) {
        SamplerSpec s2 = SamplerSpec::make(spec.gate_set, ConnectivityGraph::line(2), spec.xi,
                                           spec.seed);
        Rng sub = rng.sub({2, static_cast<uint64_t>(i), static_cast<uint64_t>(j)});
        double r2 = isolated_r_omega(model.restricted_to({i, j}), s2, depths, K, sub);
        double idle_pair = 1.0 - (1.0 - out.idle_rates[i]) * (1.0 - out.idle_rates[j]);
        out.pair_rates[{i, j}] = std::max(0.0, (r2 - (1.0 - xi_eff) * idle_pair) / xi_eff);
    }
    return out;
}

CrosstalkGap crosstalk_gap(const DecayFit& observed, double predicted_r_omega) {
    CrosstalkGap g;
    g.gap = observed.r_omega - predicted_r_omega;
    double pred_per_q = per_qubit_rate(predicted_r_omega, observed.n);
    if (pred_per_q <= 0) throw NumericError("crosstalk_gap: zero predicted rate");
    g.ratio = observed.r_per_qubit / pred_per_q;
    return g;
}

// --- two densities ---

TwoDensities two_densities_heuristic(double r_half, double r_eighth) {
    // r_half = eps1/2 + eps2/2, r_eighth = 7 eps1/8 + eps2/8.
    TwoDensities t;
    t.eps1 = (4.0 * r_eighth - r_half) / 3.0;
    t.eps2 = (7.0 * r_half - 4.0 * r_eighth) / 3.0;
    t.flagged = t.eps1 < 0 || t.eps2 < 0;
    return t;
}

std::pair<double, double> two_densities_forward(double eps1, double eps2) {
    return {0.5 * eps1 + 0.5 * eps2, 7.0 / 8.0 * eps1 + 1.0 / 8.0 * eps2};
}

// --- depolarizing model ---

std::string dressed_pair_key(const Gate& g) {
    int a = std::min(g.qubits[0], g.qubits[1]);
    int b = std::max(g.qubits[0], g.qubits[1]);
    return g.kind_key() + "@" + std::to_string(a) + "," + std::to_string(b);
}

std::string dressed_idle_key(int qubit) { return "idle@" + std::to_string(qubit); }

CircuitInventory inventory_of_mirror(const MirrorCircuit& mc, double S) {
    CircuitInventory inv;
    inv.n = mc.circuit.n;
    inv.S = S;
    for (const auto& layer : mc.circuit.layers) {
        if (layer.arity != LayerArity::TwoQubit) continue;
        std::vector<std::string> keys;
        std::set<int> busy;
        for (const auto& g : layer.gates) {
            if (g.kind != GateKind::CPRot) continue;
            keys.push_back(dressed_pair_key(g));
            busy.insert(g.qubits.begin(), g.qubits.end());
        }
        for (int q = 0; q < inv.n; ++q)
            if (!busy.count(q)) keys.push_back(dressed_idle_key(q));
        inv.layers.push_back(std::move(keys));
    }
    return inv;
}

namespace {

double depol_gamma(double eps, int n) {
    double d = std::pow(4.0, n);
    return 1.0 - eps * d / (d - 1);
}

}  // namespace

double depolarizing_predicted_S(const CircuitInventory& inv,
                                const std::map<std::string, double>& rates,
                                const std::vector<double>& readout) {
    double s = 1.0;
    for (const auto& layer : inv.layers) {
        double keep = 1.0;
        for (const auto& k : layer) {
            auto it = rates.find(k);
            if (it == rates.end())
                throw UserError("depolarizing model: missing rate for component " + k);
            keep *= 1.0 - it->second;
        }
        s *= depol_gamma(1.0 - keep, inv.n);
    }
    double keep_r = 1.0;
    for (int q = 0; q < inv.n; ++q)
        keep_r *= 1.0 - (q < static_cast<int>(readout.size()) ? readout[q] : 0.0);
    return s * depol_gamma(1.0 - keep_r, inv.n);
}

namespace {

struct DepolParams {
    std::vector<std::string> keys;  // component rate order
    int n = 0;

    int size() const { return static_cast<int>(keys.size()) + n; }
    std::map<std::string, double> rates(const Eigen::VectorXd& x) const {
        std::map<std::string, double> m;
        for (size_t i = 0; i < keys.size(); ++i) m[keys[i]] = x(static_cast<int>(i));
        return m;
    }
    std::vector<double> readout(const Eigen::VectorXd& x) const {
        std::vector<double> r(n);
        for (int q = 0; q < n; ++q) r[q] = x(static_cast<int>(keys.size()) + q);
        return r;
    }
    std::string name(int i) const {
        if (i < static_cast<int>(keys.size())) return keys[i];
        return "readout@" + std::to_string(i - static_cast<int>(keys.size()));
    }
};

DepolarizingFit depol_fit_impl(const std::vector<CircuitInventory>& circuits,
                               const DepolParams& par, bool identify) {
    bool log_mode = std::all_of(circuits.begin(), circuits.end(),
                                [](const CircuitInventory& c) { return c.S > 0; });
    auto predict = [&](const Eigen::VectorXd& x, const CircuitInventory& c) {
        return depolarizing_predicted_S(c, par.rates(x), par.readout(x));
    };
    auto residuals = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXd r(static_cast<int>(circuits.size()));
        for (size_t c = 0; c < circuits.size(); ++c) {
            double s = predict(x, circuits[c]);
            r(static_cast<int>(c)) = log_mode
                                         ? std::log(std::max(s, 1e-12)) - std::log(circuits[c].S)
                                         : s - circuits[c].S;
        }
        return r;
    };
    Eigen::VectorXd x0 = Eigen::VectorXd::Constant(par.size(), 0.005);
    Eigen::VectorXd lo = Eigen::VectorXd::Zero(par.size());
    Eigen::VectorXd hi = Eigen::VectorXd::Constant(par.size(), 0.4);
    auto res = levenberg_marquardt(residuals, x0, lo, hi);

    DepolarizingFit fit;
    fit.rates = par.rates(res.x);
    fit.readout = par.readout(res.x);
    double acc = 0;
    for (const auto& c : circuits) {
        double e = predict(res.x, c) - c.S;
        acc += e * e;
    }
    fit.mean_squared_residual = acc / circuits.size();

    if (identify) {
        // Forward-difference Jacobian of the direct residuals at the optimum;
        // near-null right singular vectors mark unidentifiable combinations.
        int m = static_cast<int>(circuits.size()), p = par.size();
        Eigen::MatrixXd jac(m, p);
        double h = 1e-6;
        Eigen::VectorXd base(m);
        for (int c = 0; c < m; ++c) base(c) = predict(res.x, circuits[c]);
        for (int i = 0; i < p; ++i) {
            Eigen::VectorXd xp = res.x;
            xp(i) += h;
            for (int c = 0; c < m; ++c) jac(c, i) = (predict(xp, circuits[c]) - base(c)) / h;
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac, Eigen::ComputeThinV);
        double smax = svd.singularValues()(0);
        std::set<std::string> flagged;
        for (int i = 0; i < svd.singularValues().size(); ++i) {
            if (svd.singularValues()(i) > std::max(1e-12, smax * 1e-7)) continue;
            for (int j = 0; j < p; ++j)
                if (std::abs(svd.matrixV()(j, i)) > 0.3) flagged.insert(par.name(j));
        }
        fit.unidentifiable.assign(flagged.begin(), flagged.end());
    }
    return fit;
}

DepolParams depol_params_for(const std::vector<CircuitInventory>& circuits, int n) {
    std::set<std::string> keys;
    for (const auto& c : circuits)
        for (const auto& l : c.layers) keys.insert(l.begin(), l.end());
    DepolParams par;
    par.keys.assign(keys.begin(), keys.end());
    par.n = n;
    return par;
}

}  // namespace

DepolarizingFit fit_depolarizing(const std::vector<CircuitInventory>& circuits, int n) {
    if (circuits.empty()) throw UserError("fit_depolarizing: no circuits");
    return depol_fit_impl(circuits, depol_params_for(circuits, n), true);
}

void bootstrap_depolarizing(DepolarizingFit& fit, const std::vector<CircuitInventory>& circuits,
                            int n, int resamples, Rng& rng) {
    if (resamples < 2) throw UserError("bootstrap: need at least 2 resamples");
    DepolParams par = depol_params_for(circuits, n);
    std::vector<std::map<std::string, double>> rate_draws;
    std::vector<std::vector<double>> readout_draws;
    for (int r = 0; r < resamples; ++r) {
        Rng sub = rng.sub({static_cast<uint64_t>(r)});
        std::vector<CircuitInventory> res;
        res.reserve(circuits.size());
        for (size_t i = 0; i < circuits.size(); ++i)
            res.push_back(circuits[sub.uniform_int(0, static_cast<int>(circuits.size()) - 1)]);
        DepolarizingFit f = depol_fit_impl(res, par, false);
        rate_draws.push_back(std::move(f.rates));
        readout_draws.push_back(std::move(f.readout));
    }
    auto stddev = [](const std::vector<double>& v) {
        double mean = 0;
        for (double x : v) mean += x;
        mean /= v.size();
        double acc = 0;
        for (double x : v) acc += (x - mean) * (x - mean);
        return std::sqrt(acc / (v.size() - 1));
    };
    fit.rate_std.clear();
    for (const auto& k : par.keys) {
        std::vector<double> v;
        for (const auto& d : rate_draws) v.push_back(d.at(k));
        fit.rate_std[k] = stddev(v);
    }
    fit.readout_std.assign(n, 0.0);
    for (int q = 0; q < n; ++q) {
        std::vector<double> v;
        for (const auto& d : readout_draws) v.push_back(d[q]);
        fit.readout_std[q] = stddev(v);
    }
}

std::string depolarizing_fit_to_json(const DepolarizingFit& f) {
    json j{{"rates", f.rates},
           {"readout", f.readout},
           {"mean_squared_residual", f.mean_squared_residual},
           {"unidentifiable", f.unidentifiable}};
    if (!f.rate_std.empty() || !f.readout_std.empty())
        j["std"] = {{"rates", f.rate_std}, {"readout", f.readout_std}};
    return j.dump(2);
}

// --- stochastic-Pauli maximum likelihood ---

namespace {

std::vector<std::string> pauli_labels(int arity) {
    std::vector<std::string> out;
    const char* letters = "IXYZ";
    if (arity == 1) {
        out = {"X", "Y", "Z"};
    } else {
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                if (a || b) out.push_back({letters[a], letters[b]});
    }
    return out;
}

struct MleParams {
    // (gate key, Pauli label) pairs, then prep flips, then readout flips.
    std::vector<std::pair<std::string, std::string>> rate_ix;
    int n = 0;

    int size() const { return static_cast<int>(rate_ix.size()) + 2 * n; }
    ErrorModel model(const Eigen::VectorXd& x) const {
        ErrorModel m;
        // Finite-difference probes may step a hair below the box; clamp.
        for (size_t i = 0; i < rate_ix.size(); ++i)
            m.gates[rate_ix[i].first].stochastic[rate_ix[i].second] =
                std::max(0.0, x(static_cast<int>(i)));
        int base = static_cast<int>(rate_ix.size());
        m.spam.prep_flips.resize(n);
        m.spam.readout_flips.resize(n);
        for (int q = 0; q < n; ++q) {
            m.spam.prep_flips[q] = x(base + q);
            m.spam.readout_flips[q] = x(base + n + q);
        }
        return m;
    }
};

MleParams mle_params_for(const std::vector<PauliMleData>& data, int n) {
    std::set<std::string> keys1, keys2;
    for (const auto& d : data) {
        for (const auto& layer : d.circuit.circuit.layers) {
            std::set<int> busy;
            for (const auto& g : layer.gates) {
                switch (g.kind) {
                    case GateKind::U3:
                    case GateKind::XHalfPi:
                        keys1.insert(gate_error_key(Gate::x_half_pi(g.qubits[0])));
                        break;
                    case GateKind::Idle:
                        keys1.insert(gate_error_key(Gate::idle(g.qubits[0])));
                        break;
                    case GateKind::CPRot:
                        keys2.insert(gate_error_key(g));
                        break;
                    default:
                        break;  // z rotations are error-free by convention
                }
                busy.insert(g.qubits.begin(), g.qubits.end());
            }
            if (layer.arity == LayerArity::TwoQubit)
                for (int q = 0; q < n; ++q)
                    if (!busy.count(q)) keys1.insert(gate_error_key(Gate::idle(q)));
        }
    }
    MleParams par;
    par.n = n;
    for (const auto& k : keys1)
        for (const auto& l : pauli_labels(1)) par.rate_ix.emplace_back(k, l);
    for (const auto& k : keys2)
        for (const auto& l : pauli_labels(2)) par.rate_ix.emplace_back(k, l);
    return par;
}

}  // namespace

PauliMleFit fit_pauli_stochastic(const std::vector<PauliMleData>& data, int n, Rng& rng,
                                 int starts) {
    if (n > 3) throw CapacityError("fit_pauli_stochastic: limited to n <= 3");
    if (data.empty()) throw UserError("fit_pauli_stochastic: no data");
    MleParams par = mle_params_for(data, n);

    auto neg_ll = [&](const Eigen::VectorXd& x) {
        Simulator sim(par.model(x));
        double acc = 0;
        for (const auto& d : data) {
            Eigen::VectorXd probs = sim.simulate_distribution(d.circuit.circuit);
            for (const auto& [bits, count] : d.histogram.counts)
                acc -= static_cast<double>(count) *
                       std::log(std::max(probs(static_cast<int>(bits)), 1e-12));
        }
        return acc;
    };

    Eigen::VectorXd lo = Eigen::VectorXd::Zero(par.size());
    Eigen::VectorXd hi = Eigen::VectorXd::Constant(par.size(), 0.25);
    PauliMleFit best;
    double best_val = std::numeric_limits<double>::infinity();
    for (int s = 0; s < starts; ++s) {
        Eigen::VectorXd x0(par.size());
        for (int i = 0; i < par.size(); ++i)
            x0(i) = s == 0 ? 1e-3 : rng.uniform() * 0.02;
        auto res = projected_gradient(neg_ll, x0, lo, hi);
        if (res.value < best_val) {
            best_val = res.value;
            best.model = par.model(res.x);
            best.log_likelihood = -res.value;
            best.projected_grad_norm = res.projected_grad_norm;
            best.converged = res.converged;
        }
    }
    return best;
}

}  // namespace mrb
