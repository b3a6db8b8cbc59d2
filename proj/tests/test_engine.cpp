#include "doctest.h"

#include <cmath>

#include "mrb/analysis.hpp"
#include "mrb/engine.hpp"
#include "mrb/errors.hpp"
#include "mrb/mirror.hpp"
#include "mrb/noise.hpp"
#include "mrb/rng.hpp"
#include "mrb/sampling.hpp"
#include "mrb/unitary.hpp"

using namespace mrb;

namespace {

constexpr double kPi = 3.14159265358979323846;

Circuit random_circuit(int n, int layers, Rng& rng) {
    SamplerSpec spec = SamplerSpec::make(GateSetSpec::su2_cs(), ConnectivityGraph::line(n), 0.5,
                                         rng.next_u64());
    OmegaCircuit oc = sample_omega_circuit(spec, layers, rng);
    return oc.circuit;
}

}  // namespace

TEST_CASE("noiseless distributions match dense statevector amplitudes") {
    Rng rng(601);
    Simulator sim{ErrorModel{}};
    for (int n = 1; n <= 3; ++n) {
        Circuit c = random_circuit(n, 3, rng);
        Eigen::VectorXd probs = sim.simulate_distribution(c);
        Mat u = circuit_unitary(c);
        for (int b = 0; b < (1 << n); ++b)
            REQUIRE(std::abs(probs(b) - std::norm(u(b, 0))) < 1e-10);
    }
}

TEST_CASE("single-gate transfer matrices equal the unitary conjugation formula") {
    Rng rng(602);
    Simulator sim{ErrorModel{}};
    Circuit c;
    c.n = 2;
    c.layers.push_back(
        Layer{2, LayerArity::TwoQubit, {Gate::cprot(1, 0, PauliLetter::Y, 0.83)}});
    RMat r = sim.circuit_ptm(c, false);
    Mat u = circuit_unitary(c);
    // R_ab = Tr(B_a U B_b U^dagger) / 2^n over normalized Paulis B.
    for (int a = 0; a < 16; ++a)
        for (int b = 0; b < 16; ++b) {
            PauliString pa({static_cast<PauliLetter>(a % 4), static_cast<PauliLetter>(a / 4)});
            PauliString pb({static_cast<PauliLetter>(b % 4), static_cast<PauliLetter>(b / 4)});
            std::complex<double> tr =
                (pauli_matrix(pa) * u * pauli_matrix(pb) * u.adjoint()).trace() / 4.0;
            REQUIRE(std::abs(tr.imag()) < 1e-10);
            REQUIRE(std::abs(r(a, b) - tr.real()) < 1e-10);
        }
}

TEST_CASE("trajectory sampling agrees with the exact distribution") {
    Rng rng(603);
    ErrorModel m = sample_random_model(ModelFamily::Stochastic, 0.03, GateSetSpec::su2_cs(),
                                       ConnectivityGraph::line(2), rng);
    m.spam.readout_flips = {0.01, 0.02};
    m.spam.prep_flips = {0.005, 0.0};
    m.spam.gamma = 0.995;
    Simulator sim(m);
    Circuit c = random_circuit(2, 4, rng);
    Eigen::VectorXd probs = sim.simulate_distribution(c);
    uint64_t N = 100000;
    OutcomeHistogram h = sim.simulate_trajectories(c, N, rng);
    CHECK(h.shots == N);
    double tv = 0;
    for (int b = 0; b < 4; ++b) {
        double emp = 0;
        auto it = h.counts.find(static_cast<uint64_t>(b));
        if (it != h.counts.end()) emp = static_cast<double>(it->second) / N;
        tv += std::abs(emp - probs(b));
    }
    CHECK(tv / 2 < 0.01);
}

TEST_CASE("trajectory mode refuses non-stochastic models") {
    ErrorModel m;
    m.gates["x_pi_2"].hamiltonian["Z"] = 0.02;
    Simulator sim(m);
    Circuit c;
    c.n = 1;
    c.layers.push_back(Layer{1, LayerArity::OneQubit, {Gate::u3(0, 0.4, 0.1, -0.2)}});
    Rng rng(604);
    CHECK_THROWS_AS(sim.simulate_trajectories(c, 10, rng), UserError);
}

TEST_CASE("fully depolarizing SPAM flattens the outcome distribution") {
    ErrorModel m;
    m.spam.gamma = 0.0;
    Simulator sim(m);
    Circuit c;
    c.n = 1;
    c.layers.push_back(Layer{1, LayerArity::OneQubit, {Gate::u3(0, 0.3, 1.0, -0.5)}});
    Eigen::VectorXd probs = sim.simulate_distribution(c);
    CHECK(std::abs(probs(0) - 0.5) < 1e-12);
    CHECK(std::abs(probs(1) - 0.5) < 1e-12);
}

TEST_CASE("readout and preparation flips act as classical bit flips") {
    Circuit c;
    c.n = 1;
    c.layers.push_back(Layer{1, LayerArity::OneQubit, {Gate::idle(0)}});
    ErrorModel m;
    m.spam.readout_flips = {0.07};
    Eigen::VectorXd probs = Simulator(m).simulate_distribution(c);
    CHECK(std::abs(probs(1) - 0.07) < 1e-12);
    ErrorModel m2;
    m2.spam.prep_flips = {0.04};
    Eigen::VectorXd probs2 = Simulator(m2).simulate_distribution(c);
    CHECK(std::abs(probs2(1) - 0.04) < 1e-12);
}

TEST_CASE("fidelity and polarization convert per the affine map") {
    for (int n : {1, 2, 3}) {
        double d = std::pow(4.0, n);
        CHECK(polarization_from_fidelity(1.0, n) == doctest::Approx(1.0));
        CHECK(polarization_from_fidelity(1.0 / d, n) == doctest::Approx(0.0));
        for (double g : {0.2, 0.7, 0.95})
            CHECK(polarization_from_fidelity(fidelity_from_polarization(g, n), n) ==
                  doctest::Approx(g).epsilon(1e-12));
    }
}

TEST_CASE("entanglement fidelity of a unitary-error circuit is the overlap") {
    // A pure Hamiltonian Z error of angle alpha on an idle has
    // F = |Tr(U_err)|^2 / 4 = cos^2(alpha).
    double alpha = 0.21;
    ErrorModel m;
    m.gates["idle"].hamiltonian["Z"] = alpha;
    Circuit c;
    c.n = 1;
    c.layers.push_back(Layer{1, LayerArity::OneQubit, {Gate::idle(0)}});
    double F = Simulator(m).entanglement_fidelity(c);
    CHECK(F == doctest::Approx(std::cos(alpha) * std::cos(alpha)).epsilon(1e-10));
}

TEST_CASE("crosstalk terms fire only when the trigger edge holds a gate") {
    ErrorModel m;
    CrosstalkTerm ct;
    ct.trigger_edge = {0, 1};
    ct.spectators = {2};
    ct.extra.stochastic["X"] = 0.1;
    m.crosstalk.push_back(ct);
    Simulator sim(m);

    Circuit with;
    with.n = 3;
    with.layers.push_back(
        Layer{3, LayerArity::TwoQubit, {Gate::cprot(0, 1, PauliLetter::Z, kPi)}});
    Eigen::VectorXd p1 = sim.simulate_distribution(with);
    double delta = (1 - std::exp(-2 * 0.1)) / 2;
    CHECK(std::abs(p1(4) - delta) < 1e-12);  // spectator qubit 2 flipped

    Circuit without;
    without.n = 3;
    without.layers.push_back(
        Layer{3, LayerArity::TwoQubit, {Gate::cprot(1, 2, PauliLetter::Z, kPi)}});
    Eigen::VectorXd p2 = sim.simulate_distribution(without);
    CHECK(std::abs(p2(0) - 1.0) < 1e-10);
}

TEST_CASE("histogram sampling is unbiased and CSV round-trips") {
    Rng rng(605);
    Eigen::VectorXd probs(4);
    probs << 0.1, 0.2, 0.3, 0.4;
    uint64_t N = 200000;
    OutcomeHistogram h = sample_histogram(probs, 2, N, rng);
    for (int b = 0; b < 4; ++b) {
        double emp = static_cast<double>(h.counts[static_cast<uint64_t>(b)]) / N;
        CHECK(std::abs(emp - probs(b)) < 4 * std::sqrt(probs(b) * (1 - probs(b)) / N));
    }
    std::vector<std::tuple<std::string, int, OutcomeHistogram>> rows;
    rows.emplace_back("d000_k000", 0, h);
    std::string csv = histograms_csv(rows);
    auto back = histograms_from_csv(csv);
    REQUIRE(back.size() == 1);
    CHECK(std::get<0>(back[0]) == "d000_k000");
    CHECK(std::get<2>(back[0]).counts == h.counts);
    CHECK(histograms_csv(back) == csv);
}

TEST_CASE("capacity limits are enforced") {
    Circuit big;
    big.n = kPtmCap + 1;
    big.layers.push_back(Layer{big.n, LayerArity::OneQubit, {}});
    CHECK_THROWS_AS(Simulator(ErrorModel{}).simulate_distribution(big), CapacityError);
    Circuit huge;
    huge.n = kTrajCap + 1;
    huge.layers.push_back(Layer{huge.n, LayerArity::OneQubit, {}});
    Rng rng(606);
    CHECK_THROWS_AS(Simulator(ErrorModel{}).simulate_trajectories(huge, 1, rng), CapacityError);
}

TEST_CASE("bitstring formatting puts qubit 0 first") {
    CHECK(OutcomeHistogram::bits_str(0b01, 2) == "10");
    CHECK(OutcomeHistogram::bits_str(0b100, 3) == "001");
}
