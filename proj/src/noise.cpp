#include "mrb/noise.hpp"

#include <cmath>
#include <functional>
#include <unsupported/Eigen/MatrixFunctions>

#include "json.hpp"
#include "mrb/errors.hpp"
#include "mrb/unitary.hpp"

namespace mrb {

using nlohmann::json;
using std::complex;

namespace {

// Normalized Pauli basis on k local qubits; index digit i (base 4) is the
// letter on local qubit i, local qubit 0 = least-significant bit.
const std::vector<Mat>& pauli_basis(int k) {
    static std::vector<Mat> basis1, basis2;
    auto build = [](int kk) {
        std::vector<Mat> out;
        int count = 1 << (2 * kk);
        double norm = std::sqrt(static_cast<double>(1 << kk));
        for (int idx = 0; idx < count; ++idx) {
            Mat m = Mat::Ones(1, 1);
            int rem = idx;
            for (int q = 0; q < kk; ++q) {
                Mat2 p = pauli_letter_matrix(static_cast<PauliLetter>(rem & 3));
                rem >>= 2;
                // qubit q is the LSB of the index: new = kron(p, m)
                Mat next = Mat::Zero(m.rows() * 2, m.cols() * 2);
                for (int r = 0; r < 2; ++r)
                    for (int c = 0; c < 2; ++c)
                        next.block(r * m.rows(), c * m.cols(), m.rows(), m.cols()) = p(r, c) * m;
                m = next;
            }
            out.push_back(m / norm);
        }
        return out;
    };
    if (basis1.empty()) {
        basis1 = build(1);
        basis2 = build(2);
    }
    return k == 1 ? basis1 : basis2;
}

int label_index(const std::string& label) {
    int idx = 0;
    for (size_t i = 0; i < label.size(); ++i)
        idx |= static_cast<int>(letter_from_char(label[i])) << (2 * i);
    return idx;
}

std::string index_label(int idx, int k) {
    std::string s;
    for (int i = 0; i < k; ++i) s += letter_char(static_cast<PauliLetter>((idx >> (2 * i)) & 3));
    return s;
}

Mat unnormalized_pauli(const std::string& label) {
    int k = static_cast<int>(label.size());
    return pauli_basis(k)[label_index(label)] * std::sqrt(static_cast<double>(1 << k));
}

RMat ptm_of_map(int k, const std::function<Mat(const Mat&)>& apply) {
    const auto& basis = pauli_basis(k);
    int dim = static_cast<int>(basis.size());
    RMat out(dim, dim);
    for (int b = 0; b < dim; ++b) {
        Mat img = apply(basis[b]);
        for (int a = 0; a < dim; ++a)
            out(a, b) = (basis[a].adjoint() * img).trace().real();
    }
    return out;
}

}  // namespace

void ErrorGeneratorSet::validate(int arity) const {
    auto check = [&](const std::map<std::string, double>& m, bool nonneg) {
        for (const auto& [label, rate] : m) {
            if (static_cast<int>(label.size()) != arity)
                throw UserError("error generator label has wrong arity: " + label);
            if (label_index(label) == 0)
                throw UserError("identity label is not a valid error generator");
            if (nonneg && rate < 0)
                throw UserError("stochastic rates must be non-negative");
        }
    };
    check(hamiltonian, false);
    check(stochastic, true);
}

std::string gate_error_key(const Gate& g) {
    std::string key = g.kind_key() + "@";
    for (size_t i = 0; i < g.qubits.size(); ++i) {
        if (i) key += ",";
        key += std::to_string(g.qubits[i]);
    }
    return key;
}

const ErrorGeneratorSet* ErrorModel::find(const Gate& g) const {
    auto it = gates.find(gate_error_key(g));
    if (it != gates.end()) return &it->second;
    it = gates.find(g.kind_key());
    if (it != gates.end()) return &it->second;
    return nullptr;
}

bool ErrorModel::purely_stochastic() const {
    for (const auto& [k, set] : gates)
        if (!set.hamiltonian.empty()) return false;
    return crosstalk.empty() || [this] {
        for (const auto& t : crosstalk)
            if (!t.extra.hamiltonian.empty()) return false;
        return true;
    }();
}

ErrorModel ErrorModel::restricted_to(const std::vector<int>& keep) const {
    std::map<int, int> remap;
    for (size_t i = 0; i < keep.size(); ++i) remap[keep[i]] = static_cast<int>(i);
    ErrorModel out;
    out.spam.gamma = spam.gamma;
    for (int q : keep) {
        out.spam.readout_flips.push_back(
            q < static_cast<int>(spam.readout_flips.size()) ? spam.readout_flips[q] : 0.0);
        out.spam.prep_flips.push_back(
            q < static_cast<int>(spam.prep_flips.size()) ? spam.prep_flips[q] : 0.0);
    }
    for (const auto& [key, set] : gates) {
        auto at = key.find('@');
        if (at == std::string::npos) {
            out.gates[key] = set;
            continue;
        }
        std::string kind = key.substr(0, at);
        std::vector<int> qs;
        std::string rest = key.substr(at + 1);
        size_t pos = 0;
        bool ok = true;
        while (pos < rest.size()) {
            size_t comma = rest.find(',', pos);
            int q = std::stoi(rest.substr(pos, comma == std::string::npos ? comma : comma - pos));
            if (!remap.count(q)) {
                ok = false;
                break;
            }
            qs.push_back(remap[q]);
            pos = comma == std::string::npos ? rest.size() : comma + 1;
        }
        if (!ok) continue;
        std::string nk = kind + "@";
        for (size_t i = 0; i < qs.size(); ++i) nk += (i ? "," : "") + std::to_string(qs[i]);
        out.gates[nk] = set;
    }
    for (const auto& t : crosstalk) {
        if (!remap.count(t.trigger_edge.first) || !remap.count(t.trigger_edge.second)) continue;
        bool ok = true;
        CrosstalkTerm nt;
        nt.trigger_edge = {remap[t.trigger_edge.first], remap[t.trigger_edge.second]};
        for (int s : t.spectators) {
            if (!remap.count(s)) {
                ok = false;
                break;
            }
            nt.spectators.push_back(remap[s]);
        }
        if (!ok) continue;
        nt.extra = t.extra;
        out.crosstalk.push_back(std::move(nt));
    }
    return out;
}

RMat hamiltonian_generator(const std::string& label) {
    int k = static_cast<int>(label.size());
    if (label_index(label) == 0) throw UserError("identity Hamiltonian generator");
    Mat p = unnormalized_pauli(label);
    return ptm_of_map(k, [&](const Mat& rho) -> Mat {
        return complex<double>(0, -1) * (p * rho - rho * p);
    });
}

RMat stochastic_generator(const std::string& label) {
    int k = static_cast<int>(label.size());
    if (label_index(label) == 0) throw UserError("identity stochastic generator");
    Mat p = unnormalized_pauli(label);
    return ptm_of_map(k, [&](const Mat& rho) -> Mat { return p * rho * p - rho; });
}

RMat error_channel_ptm(const ErrorGeneratorSet& set, int arity) {
    set.validate(arity);
    int dim = 1 << (2 * arity);
    RMat m = RMat::Zero(dim, dim);
    for (const auto& [label, rate] : set.hamiltonian) m += rate * hamiltonian_generator(label);
    for (const auto& [label, rate] : set.stochastic) m += rate * stochastic_generator(label);
    RMat e = m.exp();
    if (!is_cptp(e)) throw NumericError("error channel failed the CPTP check");
    return e;
}

RMat gate_ptm(const Gate& g) {
    Mat u = gate_unitary(g);
    int k = g.arity();
    return ptm_of_map(k, [&](const Mat& rho) -> Mat { return u * rho * u.adjoint(); });
}

bool is_cptp(const RMat& ptm, double tol) {
    int dim = static_cast<int>(ptm.rows());
    int D = static_cast<int>(std::lround(std::sqrt(static_cast<double>(dim))));
    // trace preservation: first row is (1, 0, ..., 0)
    if (std::abs(ptm(0, 0) - 1.0) > tol) return false;
    for (int b = 1; b < dim; ++b)
        if (std::abs(ptm(0, b)) > tol) return false;
    // complete positivity: Choi matrix (1/D) sum_ab R_ab B_a (x) B_b^T >= 0
    int k = D == 2 ? 1 : 2;
    const auto& basis = pauli_basis(k);
    Mat choi = Mat::Zero(D * D, D * D);
    for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b) {
            if (ptm(a, b) == 0.0) continue;
            // kron(B_a, B_b^T)
            for (int r1 = 0; r1 < D; ++r1)
                for (int c1 = 0; c1 < D; ++c1)
                    for (int r2 = 0; r2 < D; ++r2)
                        for (int c2 = 0; c2 < D; ++c2)
                            choi(r1 * D + r2, c1 * D + c2) +=
                                ptm(a, b) * basis[a](r1, c1) * basis[b](c2, r2);
        }
    choi /= D;
    Eigen::SelfAdjointEigenSolver<Mat> es(choi);
    return es.eigenvalues().minCoeff() >= -tol;
}

namespace {

std::vector<double> dirichlet_split(double total, int parts, Rng& rng) {
    std::vector<double> w(parts);
    double sum = 0;
    for (auto& x : w) {
        x = -std::log(std::max(rng.uniform(), 1e-300));
        sum += x;
    }
    for (auto& x : w) x = total * x / sum;
    return w;
}

// Hamiltonian rates with sum of squares = scale^2 (so the unitary error's
// infidelity is ~scale^2); stochastic rates with sum = scale.
void fill_generators(ErrorGeneratorSet& set, int arity, double h_scale, double s_scale, Rng& rng) {
    int parts = (1 << (2 * arity)) - 1;
    if (h_scale > 0) {
        auto w = dirichlet_split(1.0, parts, rng);
        for (int i = 0; i < parts; ++i) {
            double rate = h_scale * std::sqrt(w[i]);
            if (rate > 1e-15) set.hamiltonian[index_label(i + 1, arity)] = rate;
        }
    }
    if (s_scale > 0) {
        auto w = dirichlet_split(s_scale, parts, rng);
        for (int i = 0; i < parts; ++i)
            if (w[i] > 1e-15) set.stochastic[index_label(i + 1, arity)] = w[i];
    }
}

}  // namespace

ErrorModel sample_random_model(ModelFamily family, double p, const GateSetSpec& gate_set,
                               const ConnectivityGraph& graph, Rng& rng) {
    if (p < 0 || p > 0.25) throw UserError("sample_random_model: p out of range");
    double s = 0, h = 0;
    switch (family) {
        case ModelFamily::Stochastic: s = p; break;
        case ModelFamily::Hamiltonian: h = std::sqrt(p); break;
        case ModelFamily::Both:
            s = rng.uniform(0.0, p);
            h = std::sqrt(p - s);
            break;
    }
    ErrorModel model;
    model.spam.readout_flips.assign(graph.n, 0.0);
    for (int q = 0; q < graph.n; ++q) {
        for (const char* kind : {"x_pi_2", "idle"}) {
            ErrorGeneratorSet set;
            fill_generators(set, 1, h / 10.0, s / 10.0, rng);
            if (!set.empty()) model.gates[std::string(kind) + "@" + std::to_string(q)] = set;
        }
    }
    for (auto [a, b] : graph.edges) {
        for (const auto& proto : gate_set.two_qubit) {
            ErrorGeneratorSet set;
            fill_generators(set, 2, h, s, rng);
            if (set.empty()) continue;
            Gate fwd = Gate::cprot(a, b, proto.axis, proto.theta);
            model.gates[gate_error_key(fwd)] = set;
            // same physical error when the gate is placed with reversed
            // orientation: swap the two letters of every label
            ErrorGeneratorSet rev;
            auto swap_label = [](const std::string& l) {
                return std::string{l[1], l[0]};
            };
            for (const auto& [l, r] : set.hamiltonian) rev.hamiltonian[swap_label(l)] = r;
            for (const auto& [l, r] : set.stochastic) rev.stochastic[swap_label(l)] = r;
            Gate bwd = Gate::cprot(b, a, proto.axis, proto.theta);
            model.gates[gate_error_key(bwd)] = rev;
        }
    }
    return model;
}

std::string error_model_to_json(const ErrorModel& m) {
    json j;
    j["gates"] = json::object();
    for (const auto& [key, set] : m.gates) {
        json e{{"H", json::object()}, {"S", json::object()}};
        for (const auto& [l, r] : set.hamiltonian) e["H"][l] = r;
        for (const auto& [l, r] : set.stochastic) e["S"][l] = r;
        j["gates"][key] = e;
    }
    j["spam"] = json{{"gamma", m.spam.gamma},
                     {"flips", m.spam.readout_flips},
                     {"prep_flips", m.spam.prep_flips}};
    j["crosstalk"] = json::array();
    for (const auto& t : m.crosstalk) {
        json e{{"trigger", json::array({t.trigger_edge.first, t.trigger_edge.second})},
               {"spectators", t.spectators},
               {"H", json::object()},
               {"S", json::object()}};
        for (const auto& [l, r] : t.extra.hamiltonian) e["H"][l] = r;
        for (const auto& [l, r] : t.extra.stochastic) e["S"][l] = r;
        j["crosstalk"].push_back(e);
    }
    return j.dump(2);
}

ErrorModel error_model_from_json(const std::string& text) {
    json j = json::parse(text);
    ErrorModel m;
    auto read_set = [](const json& e) {
        ErrorGeneratorSet set;
        if (e.contains("H"))
            for (auto it = e["H"].begin(); it != e["H"].end(); ++it)
                set.hamiltonian[it.key()] = it.value().get<double>();
        if (e.contains("S"))
            for (auto it = e["S"].begin(); it != e["S"].end(); ++it)
                set.stochastic[it.key()] = it.value().get<double>();
        return set;
    };
    if (j.contains("gates"))
        for (auto it = j["gates"].begin(); it != j["gates"].end(); ++it)
            m.gates[it.key()] = read_set(it.value());
    if (j.contains("spam")) {
        m.spam.gamma = j["spam"].value("gamma", 1.0);
        m.spam.readout_flips = j["spam"].value("flips", std::vector<double>{});
        m.spam.prep_flips = j["spam"].value("prep_flips", std::vector<double>{});
    }
    if (j.contains("crosstalk"))
        for (const auto& e : j["crosstalk"]) {
            CrosstalkTerm t;
            t.trigger_edge = {e.at("trigger")[0].get<int>(), e.at("trigger")[1].get<int>()};
            t.spectators = e.at("spectators").get<std::vector<int>>();
            t.extra = read_set(e);
            m.crosstalk.push_back(std::move(t));
        }
    return m;
}

}  // namespace mrb
