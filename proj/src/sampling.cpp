#include "mrb/sampling.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <map>

#include "json.hpp"
#include "mrb/errors.hpp"
#include "mrb/unitary.hpp"

namespace mrb {

using nlohmann::json;

namespace {
double wrap_2pi(double t) {
    t = std::fmod(t, 2 * M_PI);
    if (t < 0) t += 2 * M_PI;
    return t;
}
}  // namespace

bool GateSetSpec::closed_under_inverses() const {
    for (const auto& p : two_qubit) {
        bool found = false;
        for (const auto& q : two_qubit) {
            if (q.axis != p.axis) continue;
            if (std::abs(wrap_2pi(q.theta) - wrap_2pi(-p.theta)) < 1e-9) found = true;
        }
        if (!found) return false;
    }
    return !two_qubit.empty();
}

GateSetSpec GateSetSpec::su2_cs() {
    return {OneQubitSet::HaarSU2, {{PauliLetter::Z, M_PI / 2}, {PauliLetter::Z, -M_PI / 2}}};
}
GateSetSpec GateSetSpec::su2_cz() {
    return {OneQubitSet::HaarSU2, {{PauliLetter::Z, M_PI}}};
}
GateSetSpec GateSetSpec::clifford_cz() {
    return {OneQubitSet::Clifford24, {{PauliLetter::Z, M_PI}}};
}
GateSetSpec GateSetSpec::su2_cnot() {
    return {OneQubitSet::HaarSU2, {{PauliLetter::X, M_PI}}};
}

SamplerSpec SamplerSpec::make(GateSetSpec gs, ConnectivityGraph g, double xi, uint64_t seed) {
    if (!gs.closed_under_inverses())
        throw UserError("gate set is not closed under inverses");
    if (xi < 0 || xi >= 1.0 + 1e-12) throw UserError("xi must lie in [0, 1]");
    g.validate();
    SamplerSpec s{std::move(gs), std::move(g), xi, seed, true};
    if (xi * s.graph.n / 2.0 > s.graph.max_matching_size() + 1e-12)
        s.density_reachable = false;  // flagged, not fatal: layers fall short of xi
    return s;
}

std::string sampler_spec_to_json(const SamplerSpec& s) {
    json j;
    j["one_qubit"] = s.gate_set.one_qubit == OneQubitSet::HaarSU2 ? "haar" : "clifford24";
    j["two_qubit"] = json::array();
    for (const auto& p : s.gate_set.two_qubit)
        j["two_qubit"].push_back(json{{"axis", std::string(1, std::tolower(letter_char(p.axis)))},
                                      {"theta", p.theta}});
    j["graph"] = json::parse(graph_to_json(s.graph));
    j["xi"] = s.xi;
    j["seed"] = s.seed;
    return j.dump(2);
}

SamplerSpec sampler_spec_from_json(const std::string& text) {
    json j = json::parse(text);
    GateSetSpec gs;
    gs.one_qubit = j.at("one_qubit") == "haar" ? OneQubitSet::HaarSU2 : OneQubitSet::Clifford24;
    for (const auto& p : j.at("two_qubit"))
        gs.two_qubit.push_back({letter_from_char(p.at("axis").get<std::string>()[0]),
                                p.at("theta").get<double>()});
    ConnectivityGraph g = graph_from_json_text(j.at("graph").dump());
    return SamplerSpec::make(std::move(gs), std::move(g), j.at("xi").get<double>(),
                             j.at("seed").get<uint64_t>());
}

const std::vector<std::array<double, 3>>& clifford24_u3_table() {
    static const std::vector<std::array<double, 3>> table = [] {
        // closure of {H, S} under multiplication, de-duplicated up to phase
        Mat2 h;
        h << 1, 1, 1, -1;
        h /= std::sqrt(2.0);
        Mat2 s;
        s << 1, 0, 0, std::complex<double>(0, 1);
        auto canon_key = [](Mat2 m) {
            // normalize phase: first entry with |.| > .1 made positive real
            std::complex<double> ref(0, 0);
            for (int c = 0; c < 2 && ref == std::complex<double>(0, 0); ++c)
                for (int r = 0; r < 2; ++r)
                    if (std::abs(m(r, c)) > 0.1 && ref == std::complex<double>(0, 0)) ref = m(r, c);
            m *= std::abs(ref) / ref;
            std::string key;
            auto clean = [](double v) {
                double r = std::round(v * 1e6) / 1e6;
                return r == 0.0 ? 0.0 : r;  // fold -0 into +0
            };
            for (int c = 0; c < 2; ++c)
                for (int r = 0; r < 2; ++r) {
                    char buf[40];
                    std::snprintf(buf, sizeof buf, "%.6f,%.6f;", clean(m(r, c).real()),
                                  clean(m(r, c).imag()));
                    key += buf;
                }
            return key;
        };
        std::map<std::string, Mat2> group;
        group[canon_key(Mat2::Identity())] = Mat2::Identity();
        bool grew = true;
        while (grew) {
            grew = false;
            auto snapshot = group;
            for (const auto& [k, m] : snapshot)
                for (const Mat2* g : {&h, &s}) {
                    Mat2 prod = (*g) * m;
                    auto key = canon_key(prod);
                    if (!group.count(key)) {
                        group[key] = prod;
                        grew = true;
                    }
                }
        }
        std::vector<std::array<double, 3>> out;
        for (const auto& [k, m] : group) {
            U3Angles a = u3_angles_from_unitary(m);
            out.push_back({a.theta, a.phi, a.lambda});
        }
        return out;
    }();
    return table;
}

Gate sample_haar_u3(int q, Rng& rng) {
    // Haar on SU(2) = uniform unit quaternion
    double a, b, c, d, norm2;
    do {
        a = rng.gauss();
        b = rng.gauss();
        c = rng.gauss();
        d = rng.gauss();
        norm2 = a * a + b * b + c * c + d * d;
    } while (norm2 < 1e-12);
    double inv = 1.0 / std::sqrt(norm2);
    a *= inv;
    b *= inv;
    c *= inv;
    d *= inv;
    Mat2 u;  // a I - i (b X + c Y + d Z)
    std::complex<double> i1(0, 1);
    u << a - i1 * d, -c - i1 * b, c - i1 * b, a + i1 * d;
    U3Angles ang = u3_angles_from_unitary(u);
    return Gate::u3(q, ang.theta, ang.phi, ang.lambda);
}

Layer sample_one_qubit_layer(const SamplerSpec& spec, Rng& rng) {
    Layer l{spec.graph.n, LayerArity::OneQubit, {}};
    for (int q = 0; q < l.n; ++q) {
        if (spec.gate_set.one_qubit == OneQubitSet::HaarSU2) {
            l.gates.push_back(sample_haar_u3(q, rng));
        } else {
            const auto& tab = clifford24_u3_table();
            const auto& a = tab[rng.uniform_int(0, static_cast<int>(tab.size()) - 1)];
            l.gates.push_back(Gate::u3(q, a[0], a[1], a[2]));
        }
    }
    return l;
}

Layer sample_two_qubit_layer(const SamplerSpec& spec, Rng& rng) {
    Layer l{spec.graph.n, LayerArity::TwoQubit, {}};
    auto edges = spec.graph.edges;
    rng.shuffle(edges.begin(), edges.end());
    // greedy matching over the random order
    std::vector<bool> used(spec.graph.n, false);
    std::vector<std::pair<int, int>> matching;
    for (auto [a, b] : edges)
        if (!used[a] && !used[b]) {
            used[a] = used[b] = true;
            matching.emplace_back(a, b);
        }
    if (matching.empty()) return l;
    double keep = std::min(1.0, spec.xi * spec.graph.n / (2.0 * matching.size()));
    const auto& protos = spec.gate_set.two_qubit;
    for (auto [a, b] : matching) {
        if (rng.uniform() >= keep) continue;
        const auto& p = protos[rng.uniform_int(0, static_cast<int>(protos.size()) - 1)];
        // orient control/target at random so neither endpoint is special
        if (rng.uniform() < 0.5) std::swap(a, b);
        l.gates.push_back(Gate::cprot(a, b, p.axis, p.theta));
    }
    return l;
}

OmegaCircuit sample_omega_circuit(const SamplerSpec& spec, int half_depth, Rng& rng) {
    if (half_depth < 0) throw UserError("half_depth must be >= 0");
    OmegaCircuit oc;
    oc.benchmark_depth_half = half_depth;
    oc.circuit.n = spec.graph.n;
    oc.circuit.layers.push_back(sample_one_qubit_layer(spec, rng));
    for (int i = 0; i < half_depth; ++i) {
        oc.circuit.layers.push_back(sample_two_qubit_layer(spec, rng));
        oc.circuit.layers.push_back(sample_one_qubit_layer(spec, rng));
    }
    return oc;
}

std::vector<OmegaCircuit> sample_correlated_designs(const OmegaCircuit& base,
                                                    const std::vector<GateSetSpec>& variants,
                                                    const SamplerSpec& spec, Rng& rng) {
    std::vector<OmegaCircuit> out;
    for (const auto& var : variants) {
        if (!var.closed_under_inverses())
            throw UserError("variant gate set is not closed under inverses");
        SamplerSpec vspec = spec;
        vspec.gate_set = var;
        OmegaCircuit oc;
        oc.benchmark_depth_half = base.benchmark_depth_half;
        oc.circuit.n = base.circuit.n;
        for (const auto& layer : base.circuit.layers) {
            if (layer.arity == LayerArity::OneQubit) {
                oc.circuit.layers.push_back(sample_one_qubit_layer(vspec, rng));
            } else {
                Layer l{layer.n, LayerArity::TwoQubit, {}};
                const auto& protos = var.two_qubit;
                for (const auto& g : layer.gates) {
                    if (g.kind != GateKind::CPRot) continue;
                    const auto& p = protos[rng.uniform_int(0, static_cast<int>(protos.size()) - 1)];
                    l.gates.push_back(Gate::cprot(g.qubits[0], g.qubits[1], p.axis, p.theta));
                }
                oc.circuit.layers.push_back(std::move(l));
            }
        }
        out.push_back(std::move(oc));
    }
    return out;
}

}  // namespace mrb
