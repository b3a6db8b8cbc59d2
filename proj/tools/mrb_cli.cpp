// mrb: mirror randomized benchmarking pipeline.
//
//   design         sample a bundle of randomized mirror circuits
//   run            simulate a bundle under an error model -> histograms CSV
//   analyze        fit the polarization decay -> rate report + depth means CSV
//   oracle         exact fidelity-decay reference rate for a model
//   predict        crosstalk-free rate prediction from dressed 1q/2q rates
//   two-densities  solve the two-density linear system for (eps1, eps2)
//   fit-depol      least-squares depolarizing-model fit to a measured bundle
//   fit-pauli      small-n stochastic-Pauli maximum-likelihood fit
//
// Exit codes: 0 ok, 2 user error, 3 capacity, 4 numerical failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mrb/analysis.hpp"
#include "mrb/diagnostics.hpp"
#include "mrb/engine.hpp"
#include "mrb/errors.hpp"
#include "mrb/mirror.hpp"
#include "mrb/noise.hpp"
#include "mrb/sampling.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mrb;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UserError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty() || out_path == "-") {
        std::cout << text << "\n";
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw UserError("cannot write " + out_path);
    out << text;
    if (!text.empty() && text.back() != '\n') out << "\n";
}

std::string manifest_path(const std::string& bundle) {
    fs::path p(bundle);
    if (fs::is_directory(p)) p /= "manifest.json";
    return p.string();
}

struct Bundle {
    json manifest;
    fs::path dir;

    struct Entry {
        std::string id;
        int depth = 0;
        MirrorCircuit circuit;
    };
    std::vector<Entry> entries;
};

Bundle load_bundle(const std::string& where) {
    Bundle b;
    std::string mp = manifest_path(where);
    b.dir = fs::path(mp).parent_path();
    try {
        b.manifest = json::parse(slurp(mp));
    } catch (const json::exception& e) {
        throw UserError(std::string("manifest: ") + e.what());
    }
    for (const auto& c : b.manifest.at("circuits")) {
        Bundle::Entry e;
        e.id = c.at("id").get<std::string>();
        e.depth = c.at("depth").get<int>();
        e.circuit = mirror_from_json(slurp((b.dir / c.at("file").get<std::string>()).string()));
        b.entries.push_back(std::move(e));
    }
    return b;
}

std::vector<PolarizationSample> polarizations(const Bundle& b, const std::string& hist_csv) {
    std::map<std::string, const Bundle::Entry*> by_id;
    for (const auto& e : b.entries) by_id[e.id] = &e;
    std::vector<PolarizationSample> out;
    for (const auto& [id, depth, hist] : histograms_from_csv(slurp(hist_csv))) {
        auto it = by_id.find(id);
        if (it == by_id.end()) throw UserError("histogram row for unknown circuit " + id);
        out.push_back(observed_polarization(hist, it->second->circuit.target, id, depth));
    }
    if (out.empty()) throw UserError("no histogram rows");
    return out;
}

// --- subcommands ---

int cmd_design(const std::string& design_file, uint64_t seed_override, bool seed_set,
               const std::string& out_dir) {
    json d;
    try {
        d = json::parse(slurp(design_file));
    } catch (const json::exception& e) {
        throw UserError(std::string("design JSON: ") + e.what());
    }
    SamplerSpec spec = sampler_spec_from_json(d.at("sampler").dump());
    std::vector<int> depths = d.value("depths", std::vector<int>{0, 2, 4, 8, 16, 32, 64});
    int K = d.value("K", 30);
    uint64_t shots = d.value("shots", 1024);
    uint64_t seed = seed_set ? seed_override : d.value("seed", spec.seed);
    if (K < 1) throw UserError("design: K must be >= 1");
    if (shots < 1) throw UserError("design: shots must be >= 1");
    for (int dep : depths)
        if (dep < 0 || dep % 2) throw UserError("design: depths must be even and >= 0");

    fs::create_directories(out_dir);
    Rng rng(seed);
    json circuits = json::array();
    for (size_t di = 0; di < depths.size(); ++di) {
        for (int k = 0; k < K; ++k) {
            Rng sub = rng.sub({di, static_cast<uint64_t>(k)});
            OmegaCircuit oc = sample_omega_circuit(spec, depths[di] / 2, sub);
            MirrorCircuit mc = build_mirror(oc, sub);
            char id[32];
            std::snprintf(id, sizeof id, "d%03d_k%03d", depths[di], k);
            std::string file = std::string(id) + ".json";
            emit((fs::path(out_dir) / file).string(), mirror_to_json(mc));
            circuits.push_back({{"id", id}, {"depth", depths[di]}, {"k", k}, {"file", file}});
        }
    }
    json manifest{{"n", spec.graph.n}, {"depths", depths},   {"K", K},
                  {"shots", shots},    {"seed", seed},       {"sampler", json::parse(sampler_spec_to_json(spec))},
                  {"circuits", circuits}};
    emit((fs::path(out_dir) / "manifest.json").string(), manifest.dump(2));
    std::cerr << "wrote " << circuits.size() << " circuits to " << out_dir << "\n";
    return 0;
}

int cmd_run(const std::string& bundle, const std::string& model_file, const std::string& mode,
            uint64_t shots_override, bool shots_set, uint64_t seed, int workers,
            const std::string& out_csv) {
    if (workers < 1) throw UserError("run: workers must be >= 1");
    if (mode != "dense" && mode != "trajectory") throw UserError("run: mode must be dense|trajectory");
    Bundle b = load_bundle(bundle);
    ErrorModel model = error_model_from_json(slurp(model_file));
    uint64_t shots = shots_set ? shots_override : b.manifest.value("shots", 1024);
    if (shots < 1) throw UserError("run: shots must be >= 1");
    Simulator sim(model);
    Rng rng(seed);
    std::vector<std::tuple<std::string, int, OutcomeHistogram>> rows;
    for (size_t i = 0; i < b.entries.size(); ++i) {
        const auto& e = b.entries[i];
        Rng sub = rng.sub({i});
        OutcomeHistogram h;
        if (mode == "dense") {
            Eigen::VectorXd probs = sim.simulate_distribution(e.circuit.circuit);
            h = sample_histogram(probs, e.circuit.circuit.n, shots, sub);
        } else {
            h = sim.simulate_trajectories(e.circuit.circuit, shots, sub);
        }
        rows.emplace_back(e.id, e.depth, std::move(h));
        if ((i + 1) % 50 == 0 || i + 1 == b.entries.size())
            std::cerr << "simulated " << (i + 1) << "/" << b.entries.size() << "\n";
    }
    emit(out_csv, histograms_csv(rows));
    return 0;
}

int cmd_analyze(const std::string& bundle, const std::string& hist_csv, uint64_t seed,
                int resamples, const std::string& out_json, const std::string& out_csv) {
    Bundle b = load_bundle(bundle);
    auto samples = polarizations(b, hist_csv);
    std::set<int> have, want;
    for (const auto& s : samples) have.insert(s.depth);
    for (int d : b.manifest.at("depths").get<std::vector<int>>()) want.insert(d);
    if (have != want) std::cerr << "warning: partial analysis, histogram depths differ from design\n";
    int n = b.manifest.at("n").get<int>();
    DecayFit fit = fit_decay(samples, n);
    Rng rng(seed);
    bootstrap_decay(fit, samples, resamples, rng);
    emit(out_json, decay_fit_to_json(fit));
    if (!out_csv.empty()) emit(out_csv, depth_means_csv(samples));
    return 0;
}

int cmd_oracle(const std::string& sampler_file, const std::string& model_file,
               std::vector<int> depths, int K, uint64_t seed, const std::string& out_json) {
    SamplerSpec spec = sampler_spec_from_json(slurp(sampler_file));
    ErrorModel model = error_model_from_json(slurp(model_file));
    Rng rng(seed);
    EpsilonEstimate e = epsilon_omega_oracle(spec, model, depths, K, rng);
    json j{{"n", e.n},
           {"p_rc", e.p_rc},
           {"epsilon_omega", e.epsilon_omega},
           {"epsilon_per_qubit", e.epsilon_per_qubit},
           {"depths", e.depths},
           {"mean_polarizations", e.mean_polarizations}};
    emit(out_json, j.dump(2));
    return 0;
}

int cmd_predict(const std::string& rates_file, const std::string& sampler_file,
                const std::string& observed_file, int M, uint64_t seed,
                const std::string& out_json) {
    DressedRates rates = dressed_rates_from_json(slurp(rates_file));
    SamplerSpec spec = sampler_spec_from_json(slurp(sampler_file));
    Rng rng(seed);
    double r_pred = predict_crosstalk_free(rates, spec, M, rng);
    json j{{"r_pred", r_pred}, {"M", M}};
    if (!observed_file.empty()) {
        json o = json::parse(slurp(observed_file));
        DecayFit fit;
        fit.n = o.at("n").get<int>();
        fit.r_omega = o.at("r_omega").get<double>();
        fit.r_per_qubit = o.at("r_per_qubit").get<double>();
        CrosstalkGap g = crosstalk_gap(fit, r_pred);
        j["r_obs"] = fit.r_omega;
        j["gap"] = g.gap;
        j["ratio"] = g.ratio;
    }
    emit(out_json, j.dump(2));
    return 0;
}

int cmd_two_densities(double r_half, double r_eighth, const std::string& out_json) {
    TwoDensities t = two_densities_heuristic(r_half, r_eighth);
    if (t.flagged) std::cerr << "warning: negative solution, rates outside the model's range\n";
    json j{{"eps1", t.eps1}, {"eps2", t.eps2}, {"flagged", t.flagged}};
    emit(out_json, j.dump(2));
    return 0;
}

int cmd_fit_depol(const std::string& bundle, const std::string& hist_csv, int resamples,
                  uint64_t seed, const std::string& out_json) {
    Bundle b = load_bundle(bundle);
    auto samples = polarizations(b, hist_csv);
    std::map<std::string, const Bundle::Entry*> by_id;
    for (const auto& e : b.entries) by_id[e.id] = &e;
    std::vector<CircuitInventory> invs;
    for (const auto& s : samples) {
        CircuitInventory inv = inventory_of_mirror(by_id.at(s.circuit_id)->circuit, s.S);
        inv.circuit_id = s.circuit_id;
        invs.push_back(std::move(inv));
    }
    int n = b.manifest.at("n").get<int>();
    DepolarizingFit fit = fit_depolarizing(invs, n);
    if (!fit.unidentifiable.empty()) {
        std::cerr << "warning: unidentifiable parameters:";
        for (const auto& k : fit.unidentifiable) std::cerr << " " << k;
        std::cerr << "\n";
    }
    if (resamples > 1) {
        Rng rng(seed);
        bootstrap_depolarizing(fit, invs, n, resamples, rng);
    }
    emit(out_json, depolarizing_fit_to_json(fit));
    return 0;
}

int cmd_fit_pauli(const std::string& bundle, const std::string& hist_csv, int starts,
                  uint64_t seed, const std::string& out_json) {
    Bundle b = load_bundle(bundle);
    std::map<std::string, const Bundle::Entry*> by_id;
    for (const auto& e : b.entries) by_id[e.id] = &e;
    std::vector<PauliMleData> data;
    for (const auto& [id, depth, hist] : histograms_from_csv(slurp(hist_csv))) {
        auto it = by_id.find(id);
        if (it == by_id.end()) throw UserError("histogram row for unknown circuit " + id);
        data.push_back({it->second->circuit, hist});
    }
    if (data.empty()) throw UserError("no histogram rows");
    int n = b.manifest.at("n").get<int>();
    Rng rng(seed);
    PauliMleFit fit = fit_pauli_stochastic(data, n, rng, starts);
    if (!fit.converged)
        std::cerr << "warning: optimizer stopped at projected gradient norm "
                  << fit.projected_grad_norm << "\n";
    json j{{"model", json::parse(error_model_to_json(fit.model))},
           {"log_likelihood", fit.log_likelihood},
           {"projected_grad_norm", fit.projected_grad_norm},
           {"converged", fit.converged}};
    emit(out_json, j.dump(2));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mirror randomized benchmarking pipeline"};
    app.require_subcommand(1);

    std::string design_file, bundle, model_file, out_path, hist_csv, sampler_file, rates_file,
        observed_file;
    std::string mode = "dense";
    uint64_t seed = 1, shots = 1024;
    int workers = 1, K = 30, resamples = 200, starts = 3, M = 10000;
    double r_half = 0, r_eighth = 0;
    std::vector<int> depths{0, 2, 4, 8, 16, 32, 64};

    auto* design = app.add_subcommand("design", "sample a mirror-circuit bundle");
    design->add_option("design", design_file, "design JSON file")->required();
    auto* design_seed = design->add_option("--seed", seed, "override the design seed");
    design->add_option("--out", out_path, "output bundle directory")->default_val("bundle");

    auto* run = app.add_subcommand("run", "simulate a bundle under an error model");
    run->add_option("bundle", bundle, "bundle directory or manifest")->required();
    run->add_option("--model", model_file, "error model JSON")->required();
    run->add_option("--mode", mode, "dense|trajectory");
    auto* run_shots = run->add_option("--shots", shots, "shots per circuit");
    run->add_option("--seed", seed, "sampling seed");
    run->add_option("--workers", workers, "worker count");
    run->add_option("--out", out_path, "histograms CSV path")->default_val("histograms.csv");

    auto* analyze = app.add_subcommand("analyze", "fit the polarization decay");
    analyze->add_option("bundle", bundle, "bundle directory or manifest")->required();
    analyze->add_option("--histograms", hist_csv, "histograms CSV")->required();
    analyze->add_option("--seed", seed, "bootstrap seed");
    analyze->add_option("--resamples", resamples, "bootstrap resamples");
    analyze->add_option("--out", out_path, "fit report JSON path (default stdout)");
    std::string means_csv = "depth_means.csv";
    analyze->add_option("--means", means_csv, "per-depth means CSV path");

    auto* oracle = app.add_subcommand("oracle", "exact fidelity-decay reference rate");
    oracle->add_option("--sampler", sampler_file, "sampler spec JSON")->required();
    oracle->add_option("--model", model_file, "error model JSON")->required();
    oracle->add_option("--depths", depths, "layer counts")->delimiter(',');
    oracle->add_option("--K", K, "circuits per depth");
    oracle->add_option("--seed", seed, "sampling seed");
    oracle->add_option("--out", out_path, "report JSON path (default stdout)");

    auto* predict = app.add_subcommand("predict", "crosstalk-free rate prediction");
    predict->add_option("--rates", rates_file, "dressed rates JSON")->required();
    predict->add_option("--sampler", sampler_file, "sampler spec JSON")->required();
    predict->add_option("--observed", observed_file, "fit report JSON for gap/ratio");
    predict->add_option("--samples", M, "sampled layers");
    predict->add_option("--seed", seed, "sampling seed");
    predict->add_option("--out", out_path, "report JSON path (default stdout)");

    auto* twod = app.add_subcommand("two-densities", "solve the two-density system");
    twod->add_option("--r-half", r_half, "rate at density 1/2")->required();
    twod->add_option("--r-eighth", r_eighth, "rate at density 1/8")->required();
    twod->add_option("--out", out_path, "report JSON path (default stdout)");

    auto* fitd = app.add_subcommand("fit-depol", "depolarizing-model least squares");
    fitd->add_option("bundle", bundle, "bundle directory or manifest")->required();
    fitd->add_option("--histograms", hist_csv, "histograms CSV")->required();
    fitd->add_option("--resamples", resamples, "bootstrap resamples")->default_val(100);
    fitd->add_option("--seed", seed, "bootstrap seed");
    fitd->add_option("--out", out_path, "report JSON path (default stdout)");

    auto* fitp = app.add_subcommand("fit-pauli", "stochastic-Pauli maximum likelihood");
    fitp->add_option("bundle", bundle, "bundle directory or manifest")->required();
    fitp->add_option("--histograms", hist_csv, "histograms CSV")->required();
    fitp->add_option("--starts", starts, "optimizer multi-starts");
    fitp->add_option("--seed", seed, "start seed");
    fitp->add_option("--out", out_path, "report JSON path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (design->parsed())
            return cmd_design(design_file, seed, design_seed->count() > 0, out_path);
        if (run->parsed())
            return cmd_run(bundle, model_file, mode, shots, run_shots->count() > 0, seed, workers,
                           out_path);
        if (analyze->parsed())
            return cmd_analyze(bundle, hist_csv, seed, resamples, out_path, means_csv);
        if (oracle->parsed()) return cmd_oracle(sampler_file, model_file, depths, K, seed, out_path);
        if (predict->parsed())
            return cmd_predict(rates_file, sampler_file, observed_file, M, seed, out_path);
        if (twod->parsed()) return cmd_two_densities(r_half, r_eighth, out_path);
        if (fitd->parsed()) return cmd_fit_depol(bundle, hist_csv, resamples, seed, out_path);
        if (fitp->parsed()) return cmd_fit_pauli(bundle, hist_csv, starts, seed, out_path);
    } catch (const UserError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const CapacityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
