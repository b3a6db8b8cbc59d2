#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <sys/wait.h>
#include <unistd.h>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kCli = MRB_CLI_PATH;

int run_cli(const std::string& args) {
    std::string cmd = kCli + " " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return status == -1 ? -1 : WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("mrb_cli_test_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

json design_json(int n, const std::vector<int>& depths, int K) {
    json proto_cs{{"axis", "Z"}, {"theta", 1.5707963267948966}};
    json proto_csd{{"axis", "Z"}, {"theta", -1.5707963267948966}};
    json edges = json::array();
    for (int q = 0; q + 1 < n; ++q) edges.push_back(json::array({q, q + 1}));
    json sampler{{"one_qubit", "haar"},
                 {"two_qubit", json::array({proto_cs, proto_csd})},
                 {"graph", {{"n", n}, {"edges", edges}}},
                 {"xi", 0.5},
                 {"seed", 17}};
    return json{{"sampler", sampler}, {"depths", depths}, {"K", K}, {"shots", 2000}, {"seed", 17}};
}

}  // namespace

TEST_CASE("design writes a deterministic bundle and rejects odd depths") {
    TempDir tmp;
    write(tmp.path / "design.json", design_json(2, {0, 2}, 3).dump());
    std::string bundle = (tmp.path / "bundle").string();
    REQUIRE(run_cli("design " + (tmp.path / "design.json").string() + " --out " + bundle) == 0);
    json manifest = json::parse(slurp(tmp.path / "bundle" / "manifest.json"));
    CHECK(manifest.at("circuits").size() == 6);
    CHECK(manifest.at("n") == 2);

    // Rerun into a second directory: byte-identical files.
    std::string bundle2 = (tmp.path / "bundle2").string();
    REQUIRE(run_cli("design " + (tmp.path / "design.json").string() + " --out " + bundle2) == 0);
    for (const auto& c : manifest.at("circuits")) {
        std::string f = c.at("file").get<std::string>();
        CHECK(slurp(tmp.path / "bundle" / f) == slurp(tmp.path / "bundle2" / f));
    }

    write(tmp.path / "bad.json", design_json(2, {0, 3}, 2).dump());
    CHECK(run_cli("design " + (tmp.path / "bad.json").string() + " --out " +
                  (tmp.path / "nope").string()) == 2);
}

TEST_CASE("run, analyze, and fit-depol work end to end on a noiseless bundle") {
    TempDir tmp;
    write(tmp.path / "design.json", design_json(2, {0, 2, 4}, 4).dump());
    std::string bundle = (tmp.path / "bundle").string();
    REQUIRE(run_cli("design " + (tmp.path / "design.json").string() + " --out " + bundle) == 0);
    write(tmp.path / "model.json", R"({"gates": {}, "spam": {"gamma": 1.0, "flips": []}})");
    std::string hist = (tmp.path / "hist.csv").string();
    REQUIRE(run_cli("run " + bundle + " --model " + (tmp.path / "model.json").string() +
                    " --out " + hist + " --seed 3") == 0);

    // Noiseless counts concentrate on each circuit's target: fit gives p = 1.
    std::string fit = (tmp.path / "fit.json").string();
    std::string means = (tmp.path / "means.csv").string();
    REQUIRE(run_cli("analyze " + bundle + " --histograms " + hist + " --out " + fit +
                    " --means " + means + " --resamples 20") == 0);
    json f = json::parse(slurp(fit));
    CHECK(f.at("p").get<double>() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(f.at("r_omega").get<double>() == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(slurp(means).rfind("depth,mean_S", 0) == 0);

    // Determinism across reruns.
    std::string hist2 = (tmp.path / "hist2.csv").string();
    REQUIRE(run_cli("run " + bundle + " --model " + (tmp.path / "model.json").string() +
                    " --out " + hist2 + " --seed 3") == 0);
    CHECK(slurp(hist) == slurp(hist2));

    std::string depol = (tmp.path / "depol.json").string();
    REQUIRE(run_cli("fit-depol " + bundle + " --histograms " + hist + " --resamples 0 --out " +
                    depol) == 0);
    json dj = json::parse(slurp(depol));
    for (const auto& [k, v] : dj.at("rates").items()) CHECK(v.get<double>() < 1e-4);
}

TEST_CASE("trajectory mode refuses a Hamiltonian model with exit code 2") {
    TempDir tmp;
    write(tmp.path / "design.json", design_json(1, {0, 2}, 2).dump());
    std::string bundle = (tmp.path / "bundle").string();
    REQUIRE(run_cli("design " + (tmp.path / "design.json").string() + " --out " + bundle) == 0);
    write(tmp.path / "ham.json",
          R"({"gates": {"x_pi_2": {"H": {"Z": 0.02}, "S": {}}}, "spam": {"gamma": 1.0, "flips": []}})");
    CHECK(run_cli("run " + bundle + " --model " + (tmp.path / "ham.json").string() +
                  " --mode trajectory --out " + (tmp.path / "h.csv").string()) == 2);
}

TEST_CASE("oracle and predict emit their reports") {
    TempDir tmp;
    json d = design_json(2, {0, 2}, 2);
    write(tmp.path / "sampler.json", d.at("sampler").dump());
    write(tmp.path / "model.json", R"({"gates": {}, "spam": {"gamma": 1.0, "flips": []}})");
    std::string rep = (tmp.path / "oracle.json").string();
    REQUIRE(run_cli("oracle --sampler " + (tmp.path / "sampler.json").string() + " --model " +
                    (tmp.path / "model.json").string() + " --depths 0,2,4 --K 3 --out " + rep) ==
            0);
    json oj = json::parse(slurp(rep));
    CHECK(oj.at("epsilon_omega").get<double>() == doctest::Approx(0.0).epsilon(1e-9));

    write(tmp.path / "rates.json",
          R"({"idle": {"0": 0.001, "1": 0.002}, "pairs": [{"edge": [0, 1], "eps": 0.01}]})");
    std::string pred = (tmp.path / "pred.json").string();
    REQUIRE(run_cli("predict --rates " + (tmp.path / "rates.json").string() + " --sampler " +
                    (tmp.path / "sampler.json").string() + " --samples 2000 --out " + pred) == 0);
    json pj = json::parse(slurp(pred));
    CHECK(pj.at("r_pred").get<double>() > 0.0);
    CHECK(pj.at("M").get<int>() == 2000);
}

TEST_CASE("two-densities subcommand solves the linear system") {
    TempDir tmp;
    std::string out = (tmp.path / "td.json").string();
    REQUIRE(run_cli("two-densities --r-half 0.0105 --r-eighth 0.0105 --out " + out) == 0);
    json j = json::parse(slurp(out));
    CHECK(j.at("eps1").get<double>() == doctest::Approx(0.0105).epsilon(1e-9));
    CHECK(j.at("eps2").get<double>() == doctest::Approx(0.0105).epsilon(1e-9));
    CHECK_FALSE(j.at("flagged").get<bool>());
}

TEST_CASE("missing files and unknown subcommands exit with a user error") {
    CHECK(run_cli("design /nonexistent/path.json --out /tmp/mrb_x") == 2);
    CHECK(run_cli("frobnicate") == 2);
}
