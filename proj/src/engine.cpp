#include "mrb/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "mrb/errors.hpp"
#include "mrb/unitary.hpp"

namespace mrb {

std::string OutcomeHistogram::bits_str(uint64_t b, int n) {
    std::string s(n, '0');
    for (int q = 0; q < n; ++q)
        if ((b >> q) & 1) s[q] = '1';
    return s;
}

double polarization_from_fidelity(double F, int n) {
    double d = std::pow(4.0, n);
    return d / (d - 1) * F - 1.0 / (d - 1);
}

double fidelity_from_polarization(double gamma, int n) {
    double d = std::pow(4.0, n);
    return gamma + (1 - gamma) / d;
}

namespace {

std::string ptm_cache_key(const Gate& g) {
    std::string key = g.kind_key();
    char buf[32];
    for (double p : g.params) {
        std::snprintf(buf, sizeof buf, "|%.12g", p);
        key += buf;
    }
    return key;
}

// Five native gates realizing U3 (first element acts first in time).
std::vector<Gate> u3_native_sequence(const Gate& g) {
    int q = g.qubits[0];
    double th = g.params[0], ph = g.params[1], la = g.params[2];
    return {Gate::z_rot(q, -la + M_PI / 2), Gate::x_half_pi(q), Gate::z_rot(q, M_PI - 2 * th),
            Gate::x_half_pi(q), Gate::z_rot(q, -ph - M_PI / 2)};
}

}  // namespace

const RMat& Simulator::ideal_ptm(const Gate& g) const {
    std::string key = ptm_cache_key(g);
    auto it = ideal_cache_.find(key);
    if (it != ideal_cache_.end()) return it->second;
    return ideal_cache_.emplace(std::move(key), gate_ptm(g)).first->second;
}

const RMat& Simulator::error_ptm(const ErrorGeneratorSet& set, int arity) const {
    auto it = error_cache_.find(&set);
    if (it != error_cache_.end()) return it->second;
    return error_cache_.emplace(&set, error_channel_ptm(set, arity)).first->second;
}

const std::vector<double>& Simulator::pauli_fault_probs(const ErrorGeneratorSet& set,
                                                        int arity) const {
    auto it = fault_cache_.find(&set);
    if (it != fault_cache_.end()) return it->second;
    const RMat& e = error_ptm(set, arity);
    int dim = static_cast<int>(e.rows());
    // Pauli channel: diagonal PTM d_Q = sum_R p_R chi(R,Q); invert via the
    // self-inverse character transform (1/dim) chi.
    std::vector<double> probs(dim, 0.0);
    for (int r = 0; r < dim; ++r) {
        double acc = 0;
        for (int q = 0; q < dim; ++q) {
            // chi = +1 if Paulis r and q commute letterwise-parity-wise
            int anti = 0;
            for (int i = 0; i < arity; ++i) {
                auto lr = static_cast<PauliLetter>((r >> (2 * i)) & 3);
                auto lq = static_cast<PauliLetter>((q >> (2 * i)) & 3);
                if (letters_anticommute(lr, lq)) ++anti;
            }
            double chi = (anti % 2) ? -1.0 : 1.0;
            acc += chi * e(q, q);
        }
        probs[r] = acc / dim;
    }
    double sum = 0;
    for (double& p : probs) {
        if (p < 0 && p > -1e-12) p = 0;
        if (p < 0) throw NumericError("non-stochastic channel in trajectory mode");
        sum += p;
    }
    for (double& p : probs) p /= sum;
    return fault_cache_.emplace(&set, std::move(probs)).first->second;
}

void Simulator::apply_gate_ptm(Eigen::MatrixXd& state, const RMat& m,
                               const std::vector<int>& qubits, int n) const {
    int k = static_cast<int>(qubits.size());
    int lsize = 1 << (2 * k);
    int dim = 1 << (2 * n);
    int mask = 0;
    std::vector<int> stride(k);
    for (int i = 0; i < k; ++i) {
        stride[i] = 1 << (2 * qubits[i]);
        mask |= 3 << (2 * qubits[i]);
    }
    std::vector<int> offs(lsize);
    for (int l = 0; l < lsize; ++l) {
        int o = 0;
        for (int i = 0; i < k; ++i) o += ((l >> (2 * i)) & 3) * stride[i];
        offs[l] = o;
    }
    Eigen::MatrixXd local(lsize, state.cols());
    for (int base = 0; base < dim; ++base) {
        if (base & mask) continue;
        for (int l = 0; l < lsize; ++l) local.row(l) = state.row(base + offs[l]);
        local = m * local;
        for (int l = 0; l < lsize; ++l) state.row(base + offs[l]) = local.row(l);
    }
}

void Simulator::apply_layer_ptm(Eigen::MatrixXd& state, const Layer& l, int n, bool noisy) const {
    auto apply_error = [&](const Gate& g) {
        if (!noisy) return;
        const ErrorGeneratorSet* set = model_.find(g);
        if (set && !set->empty()) apply_gate_ptm(state, error_ptm(*set, g.arity()), g.qubits, n);
    };
    for (const auto& g : l.gates) {
        if (g.kind == GateKind::Idle) {
            apply_error(g);
            continue;
        }
        if (g.kind == GateKind::U3 && noisy) {
            for (const auto& native : u3_native_sequence(g)) {
                apply_gate_ptm(state, ideal_ptm(native), native.qubits, n);
                if (native.kind == GateKind::XHalfPi) apply_error(native);
            }
            continue;
        }
        apply_gate_ptm(state, ideal_ptm(g), g.qubits, n);
        apply_error(g);
    }
    for (int q : l.idle_qubits()) apply_error(Gate::idle(q));
    if (noisy && l.arity == LayerArity::TwoQubit) {
        for (const auto& term : model_.crosstalk) {
            bool fired = false;
            for (const auto& g : l.gates)
                if (g.kind == GateKind::CPRot) {
                    auto e = std::minmax(g.qubits[0], g.qubits[1]);
                    auto t = std::minmax(term.trigger_edge.first, term.trigger_edge.second);
                    if (e == t) fired = true;
                }
            if (!fired || term.extra.empty()) continue;
            int arity = static_cast<int>(term.spectators.size());
            if (arity < 1 || arity > 2)
                throw UserError("crosstalk terms support 1 or 2 spectator qubits");
            apply_gate_ptm(state, error_ptm(term.extra, arity), term.spectators, n);
        }
    }
}

RMat Simulator::circuit_ptm(const Circuit& c, bool noisy) const {
    if (c.n > kPtmCap) throw CapacityError("circuit_ptm: n exceeds the dense cap");
    int dim = 1 << (2 * c.n);
    Eigen::MatrixXd state = Eigen::MatrixXd::Identity(dim, dim);
    for (const auto& l : c.layers) apply_layer_ptm(state, l, c.n, noisy);
    return state;
}

double Simulator::entanglement_fidelity(const Circuit& c) const {
    RMat ideal = circuit_ptm(c, false);
    RMat noisy = circuit_ptm(c, true);
    double dim = std::pow(4.0, c.n);
    return (ideal.transpose() * noisy).trace() / dim;
}

Eigen::VectorXd Simulator::simulate_distribution(const Circuit& c) const {
    if (c.n > kPtmCap)
        throw CapacityError("simulate_distribution: n exceeds the dense cap; use trajectories");
    if (model_.spam.gamma < 0 || model_.spam.gamma > 1)
        throw UserError("spam gamma must lie in [0, 1]");
    int n = c.n;
    int dim = 1 << (2 * n);
    Eigen::MatrixXd state = Eigen::MatrixXd::Zero(dim, 1);
    double amp = 1.0 / std::sqrt(std::pow(2.0, n));
    for (int zmask = 0; zmask < (1 << n); ++zmask) {
        int idx = 0;
        double coeff = amp;
        for (int q = 0; q < n; ++q)
            if ((zmask >> q) & 1) {
                idx += 3 << (2 * q);
                if (q < static_cast<int>(model_.spam.prep_flips.size()))
                    coeff *= 1.0 - 2.0 * model_.spam.prep_flips[q];
            }
        state(idx, 0) = coeff;
    }
    for (const auto& l : c.layers) apply_layer_ptm(state, l, n, true);
    // SPAM depolarizing: shrink every non-identity component
    for (int idx = 1; idx < dim; ++idx) state(idx, 0) *= model_.spam.gamma;
    // read off probabilities from the I/Z sub-vector
    int nb = 1 << n;
    Eigen::VectorXd probs = Eigen::VectorXd::Zero(nb);
    for (int b = 0; b < nb; ++b) {
        double acc = 0;
        for (int zmask = 0; zmask < nb; ++zmask) {
            int idx = 0;
            for (int q = 0; q < n; ++q)
                if ((zmask >> q) & 1) idx += 3 << (2 * q);
            double sign = (__builtin_popcount(zmask & b) % 2) ? -1.0 : 1.0;
            acc += sign * state(idx, 0);
        }
        probs(b) = acc * amp;
    }
    // readout bit flips
    for (int q = 0; q < n && q < static_cast<int>(model_.spam.readout_flips.size()); ++q) {
        double f = model_.spam.readout_flips[q];
        if (f == 0) continue;
        Eigen::VectorXd next(nb);
        for (int b = 0; b < nb; ++b) next(b) = (1 - f) * probs(b) + f * probs(b ^ (1 << q));
        probs = next;
    }
    for (int b = 0; b < nb; ++b)
        if (probs(b) < 0 && probs(b) > -1e-12) probs(b) = 0;
    double total = probs.sum();
    if (std::abs(total - 1.0) > 1e-9) throw NumericError("distribution does not sum to 1");
    return probs / total;
}

namespace {

void apply_unitary_sv(Eigen::VectorXcd& psi, const Mat& u, const std::vector<int>& qubits, int n) {
    int k = static_cast<int>(qubits.size());
    int lsize = 1 << k;
    int dim = 1 << n;
    int mask = 0;
    for (int q : qubits) mask |= 1 << q;
    std::vector<int> offs(lsize);
    for (int l = 0; l < lsize; ++l) {
        int o = 0;
        for (int i = 0; i < k; ++i)
            if ((l >> i) & 1) o |= 1 << qubits[i];
        offs[l] = o;
    }
    Eigen::VectorXcd local(lsize);
    for (int base = 0; base < dim; ++base) {
        if (base & mask) continue;
        for (int l = 0; l < lsize; ++l) local(l) = psi(base + offs[l]);
        local = u * local;
        for (int l = 0; l < lsize; ++l) psi(base + offs[l]) = local(l);
    }
}

void apply_pauli_fault(Eigen::VectorXcd& psi, int pauli_idx, const std::vector<int>& qubits,
                       int n) {
    if (pauli_idx == 0) return;
    PauliString p(n);
    for (size_t i = 0; i < qubits.size(); ++i)
        p.letters[qubits[i]] = static_cast<PauliLetter>((pauli_idx >> (2 * i)) & 3);
    // apply letterwise (phases irrelevant for measurement statistics)
    for (size_t i = 0; i < qubits.size(); ++i) {
        auto l = p.letters[qubits[i]];
        if (l == PauliLetter::I) continue;
        apply_unitary_sv(psi, pauli_letter_matrix(l), {qubits[i]}, n);
    }
}

int sample_index(const std::vector<double>& probs, Rng& rng) {
    double u = rng.uniform();
    double acc = 0;
    for (size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
}

}  // namespace

OutcomeHistogram Simulator::simulate_trajectories(const Circuit& c, uint64_t shots,
                                                  Rng& rng) const {
    if (c.n > kTrajCap) throw CapacityError("simulate_trajectories: n exceeds the trajectory cap");
    if (!model_.purely_stochastic())
        throw UserError("trajectory mode supports purely stochastic models only");
    if (model_.spam.gamma < 0 || model_.spam.gamma > 1)
        throw UserError("spam gamma must lie in [0, 1]");
    int n = c.n;
    int dim = 1 << n;
    OutcomeHistogram hist;
    hist.n = n;
    hist.shots = shots;

    auto maybe_fault = [&](Eigen::VectorXcd& psi, const Gate& g, Rng& r) {
        const ErrorGeneratorSet* set = model_.find(g);
        if (!set || set->stochastic.empty()) return;
        int idx = sample_index(pauli_fault_probs(*set, g.arity()), r);
        apply_pauli_fault(psi, idx, g.qubits, n);
    };

    for (uint64_t shot = 0; shot < shots; ++shot) {
        Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
        int prep = 0;
        for (int q = 0; q < n && q < static_cast<int>(model_.spam.prep_flips.size()); ++q)
            if (rng.uniform() < model_.spam.prep_flips[q]) prep |= 1 << q;
        psi(prep) = 1.0;
        for (const auto& l : c.layers) {
            for (const auto& g : l.gates) {
                if (g.kind == GateKind::Idle) {
                    maybe_fault(psi, g, rng);
                    continue;
                }
                if (g.kind == GateKind::U3) {
                    for (const auto& native : u3_native_sequence(g)) {
                        apply_unitary_sv(psi, gate_unitary(native), native.qubits, n);
                        if (native.kind == GateKind::XHalfPi) maybe_fault(psi, native, rng);
                    }
                    continue;
                }
                apply_unitary_sv(psi, gate_unitary(g), g.qubits, n);
                maybe_fault(psi, g, rng);
            }
            for (int q : l.idle_qubits()) maybe_fault(psi, Gate::idle(q), rng);
            if (l.arity == LayerArity::TwoQubit) {
                for (const auto& term : model_.crosstalk) {
                    bool fired = false;
                    for (const auto& g : l.gates)
                        if (g.kind == GateKind::CPRot) {
                            auto e = std::minmax(g.qubits[0], g.qubits[1]);
                            auto t = std::minmax(term.trigger_edge.first, term.trigger_edge.second);
                            if (e == t) fired = true;
                        }
                    if (!fired || term.extra.stochastic.empty()) continue;
                    int idx = sample_index(
                        pauli_fault_probs(term.extra, static_cast<int>(term.spectators.size())),
                        rng);
                    apply_pauli_fault(psi, idx, term.spectators, n);
                }
            }
        }
        uint64_t outcome;
        if (rng.uniform() >= model_.spam.gamma) {
            outcome = rng.engine()() & (dim - 1);  // fully depolarized draw
        } else {
            double u = rng.uniform();
            double acc = 0;
            outcome = dim - 1;
            for (int b = 0; b < dim; ++b) {
                acc += std::norm(psi(b));
                if (u < acc) {
                    outcome = b;
                    break;
                }
            }
        }
        for (int q = 0; q < n && q < static_cast<int>(model_.spam.readout_flips.size()); ++q)
            if (rng.uniform() < model_.spam.readout_flips[q]) outcome ^= 1ull << q;
        ++hist.counts[outcome];
    }
    return hist;
}

OutcomeHistogram sample_histogram(const Eigen::VectorXd& probs, int n, uint64_t shots, Rng& rng) {
    OutcomeHistogram hist;
    hist.n = n;
    hist.shots = shots;
    std::vector<double> cdf(probs.size());
    double acc = 0;
    for (int i = 0; i < probs.size(); ++i) {
        acc += probs(i);
        cdf[i] = acc;
    }
    for (uint64_t s = 0; s < shots; ++s) {
        double u = rng.uniform() * acc;
        auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        uint64_t b = static_cast<uint64_t>(it - cdf.begin());
        if (b >= static_cast<uint64_t>(probs.size())) b = probs.size() - 1;
        ++hist.counts[b];
    }
    return hist;
}

std::string histograms_csv(const std::vector<std::tuple<std::string, int, OutcomeHistogram>>& rows) {
    std::ostringstream out;
    out << "circuit_id,depth,bitstring,count\n";
    for (const auto& [id, depth, hist] : rows)
        for (const auto& [bits, count] : hist.counts)
            out << id << "," << depth << "," << OutcomeHistogram::bits_str(bits, hist.n) << ","
                << count << "\n";
    return out.str();
}

std::vector<std::tuple<std::string, int, OutcomeHistogram>> histograms_from_csv(
    const std::string& text) {
    std::vector<std::tuple<std::string, int, OutcomeHistogram>> rows;
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);  // header
    std::map<std::string, size_t> index;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string id, depth_s, bits, count_s;
        std::getline(ls, id, ',');
        std::getline(ls, depth_s, ',');
        std::getline(ls, bits, ',');
        std::getline(ls, count_s, ',');
        if (!index.count(id)) {
            index[id] = rows.size();
            rows.emplace_back(id, std::stoi(depth_s), OutcomeHistogram{});
        }
        auto& hist = std::get<2>(rows[index[id]]);
        hist.n = static_cast<int>(bits.size());
        uint64_t b = 0;
        for (size_t q = 0; q < bits.size(); ++q)
            if (bits[q] == '1') b |= 1ull << q;
        uint64_t cnt = std::stoull(count_s);
        hist.counts[b] += cnt;
        hist.shots += cnt;
    }
    return rows;
}

}  // namespace mrb
