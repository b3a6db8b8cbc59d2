#include "mrb/circuit.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>

#include "json.hpp"

namespace mrb {

using nlohmann::json;

Gate Gate::inverse() const {
    Gate g = *this;
    switch (kind) {
        case GateKind::Idle:
            break;
        case GateKind::XHalfPi:
            // inverse expressed in native gates: x_{pi/2} has no parameterized
            // inverse in the gate set; callers wanting -pi/2 use PauliAxisRot.
            g = Gate::axis_rot(qubits[0], PauliLetter::X, -M_PI / 2);
            break;
        case GateKind::ZRot:
        case GateKind::PauliAxisRot:
        case GateKind::CPRot:
            g.params[0] = -params[0];
            break;
        case GateKind::U3:
            // U3(t,p,l)^-1 = U3(-t, -l-pi, -p-pi) up to global phase.
            g.params = {-params[0], -params[2] - M_PI, -params[1] - M_PI};
            break;
    }
    return g;
}

std::string Gate::kind_key() const {
    char buf[96];
    auto ang = [&](int i) { return params.size() > static_cast<size_t>(i) ? params[i] : 0.0; };
    switch (kind) {
        case GateKind::Idle: return "idle";
        case GateKind::XHalfPi: return "x_pi_2";
        case GateKind::ZRot: return "z_rot";
        case GateKind::U3: return "u3";
        case GateKind::PauliAxisRot:
            std::snprintf(buf, sizeof buf, "rot_%c[%.6f]", std::tolower(letter_char(axis)), ang(0));
            return buf;
        case GateKind::CPRot:
            std::snprintf(buf, sizeof buf, "cprot_%c[%.6f]", std::tolower(letter_char(axis)), ang(0));
            return buf;
    }
    return "?";
}

bool operator==(const Gate& a, const Gate& b) {
    return a.kind == b.kind && a.axis == b.axis && a.params == b.params && a.qubits == b.qubits;
}

std::vector<int> Layer::idle_qubits() const {
    std::vector<bool> used(n, false);
    for (const auto& g : gates)
        for (int q : g.qubits) used[q] = true;
    std::vector<int> out;
    for (int q = 0; q < n; ++q)
        if (!used[q]) out.push_back(q);
    return out;
}

int Layer::gate_on(int q) const {
    for (size_t i = 0; i < gates.size(); ++i)
        for (int gq : gates[i].qubits)
            if (gq == q) return static_cast<int>(i);
    return -1;
}

void Layer::validate() const {
    std::vector<bool> used(n, false);
    for (const auto& g : gates) {
        for (int q : g.qubits) {
            if (q < 0 || q >= n) throw std::invalid_argument("layer: qubit out of range");
            if (used[q]) throw std::invalid_argument("layer: overlapping gate supports");
            used[q] = true;
        }
        bool two = g.kind == GateKind::CPRot;
        if (two != (arity == LayerArity::TwoQubit) && g.kind != GateKind::Idle)
            throw std::invalid_argument("layer: gate arity does not match layer arity");
    }
}

Layer Layer::inverse() const {
    Layer out{n, arity, {}};
    out.gates.reserve(gates.size());
    for (const auto& g : gates) out.gates.push_back(g.inverse());
    return out;
}

void Circuit::validate() const {
    for (const auto& l : layers) {
        if (l.n != n) throw std::invalid_argument("circuit: inconsistent qubit counts");
        l.validate();
    }
}

bool Circuit::has_composite_structure() const {
    for (size_t i = 0; i < layers.size(); ++i) {
        auto want = (i % 2 == 0) ? LayerArity::OneQubit : LayerArity::TwoQubit;
        if (layers[i].arity != want) return false;
    }
    return true;
}

ConnectivityGraph ConnectivityGraph::line(int n) {
    ConnectivityGraph g{n, {}};
    for (int i = 0; i + 1 < n; ++i) g.edges.emplace_back(i, i + 1);
    return g;
}

ConnectivityGraph ConnectivityGraph::complete(int n) {
    ConnectivityGraph g{n, {}};
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) g.edges.emplace_back(i, j);
    return g;
}

void ConnectivityGraph::validate() const {
    for (auto [a, b] : edges) {
        if (a == b) throw std::invalid_argument("graph: self-loop");
        if (a < 0 || b < 0 || a >= n || b >= n)
            throw std::invalid_argument("graph: edge endpoint out of range");
    }
}

bool ConnectivityGraph::connected() const {
    if (n == 0) return true;
    std::vector<std::vector<int>> adj(n);
    for (auto [a, b] : edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::vector<bool> seen(n, false);
    std::vector<int> stack{0};
    seen[0] = true;
    int count = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int w : adj[v])
            if (!seen[w]) {
                seen[w] = true;
                ++count;
                stack.push_back(w);
            }
    }
    return count == n;
}

int ConnectivityGraph::max_matching_size() const {
    // Exhaustive branch-and-bound; graphs here have at most a handful of edges.
    int best = 0;
    std::function<void(size_t, uint32_t, int)> go = [&](size_t i, uint32_t used, int size) {
        best = std::max(best, size);
        for (size_t j = i; j < edges.size(); ++j) {
            uint32_t m = (1u << edges[j].first) | (1u << edges[j].second);
            if ((used & m) == 0) go(j + 1, used | m, size + 1);
        }
    };
    go(0, 0, 0);
    return best;
}

// --- JSON ---

namespace {

std::string kind_token(const Gate& g) {
    switch (g.kind) {
        case GateKind::Idle: return "idle";
        case GateKind::XHalfPi: return "x_pi_2";
        case GateKind::ZRot: return "z_rot";
        case GateKind::U3: return "u3";
        case GateKind::PauliAxisRot:
            return std::string("rot_") + static_cast<char>(std::tolower(letter_char(g.axis)));
        case GateKind::CPRot:
            return std::string("cprot_") + static_cast<char>(std::tolower(letter_char(g.axis)));
    }
    return "?";
}

Gate gate_from_token(const std::string& tok, std::vector<int> qubits, std::vector<double> params) {
    Gate g;
    g.qubits = std::move(qubits);
    g.params = std::move(params);
    if (tok == "idle") g.kind = GateKind::Idle;
    else if (tok == "x_pi_2") g.kind = GateKind::XHalfPi;
    else if (tok == "z_rot") g.kind = GateKind::ZRot;
    else if (tok == "u3") g.kind = GateKind::U3;
    else if (tok.rfind("rot_", 0) == 0) {
        g.kind = GateKind::PauliAxisRot;
        g.axis = letter_from_char(tok.back());
    } else if (tok.rfind("cprot_", 0) == 0) {
        g.kind = GateKind::CPRot;
        g.axis = letter_from_char(tok.back());
    } else {
        throw std::invalid_argument("unknown gate kind: " + tok);
    }
    return g;
}

json gate_to_json(const Gate& g) {
    return json{{"kind", kind_token(g)}, {"qubits", g.qubits}, {"params", g.params}};
}

json layer_to_json(const Layer& l) {
    json arr = json::array();
    for (const auto& g : l.gates) arr.push_back(gate_to_json(g));
    return arr;
}

Layer layer_from_json(const json& arr, int n) {
    Layer l{n, LayerArity::OneQubit, {}};
    bool two = false;
    for (const auto& jg : arr) {
        Gate g = gate_from_token(jg.at("kind").get<std::string>(),
                                 jg.at("qubits").get<std::vector<int>>(),
                                 jg.value("params", std::vector<double>{}));
        two = two || g.kind == GateKind::CPRot;
        l.gates.push_back(std::move(g));
    }
    l.arity = two ? LayerArity::TwoQubit : LayerArity::OneQubit;
    return l;
}

}  // namespace

std::string circuit_to_json(const Circuit& c) {
    json j{{"n", c.n}, {"layers", json::array()}};
    for (const auto& l : c.layers) {
        json jl = layer_to_json(l);
        // record arity explicitly so all-idle two-qubit layers round-trip
        j["layers"].push_back(json{{"arity", l.arity == LayerArity::TwoQubit ? 2 : 1},
                                   {"gates", jl}});
    }
    return j.dump(2);
}

Circuit circuit_from_json(const std::string& text) {
    json j = json::parse(text);
    Circuit c;
    c.n = j.at("n").get<int>();
    for (const auto& jl : j.at("layers")) {
        Layer l = layer_from_json(jl.at("gates"), c.n);
        if (jl.value("arity", 1) == 2) l.arity = LayerArity::TwoQubit;
        c.layers.push_back(std::move(l));
    }
    c.validate();
    return c;
}

std::string graph_to_json(const ConnectivityGraph& g) {
    json j{{"n", g.n}, {"edges", json::array()}};
    for (auto [a, b] : g.edges) j["edges"].push_back(json::array({a, b}));
    return j.dump();
}

ConnectivityGraph graph_from_json_text(const std::string& text) {
    json j = json::parse(text);
    ConnectivityGraph g;
    g.n = j.at("n").get<int>();
    for (const auto& e : j.at("edges")) g.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    g.validate();
    return g;
}

}  // namespace mrb
