#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct Outcome {
    int code = -1;
    std::string out, err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path workdir(const std::string& name) {
    const fs::path d = fs::path(CLI_WORK) / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

Outcome cli(const fs::path& dir, const std::string& args, const std::string& env = "") {
    const std::string cmd = "cd '" + dir.string() + "' && " + env + " '" + CAVBEC_EXE + "' " + args +
                            " > stdout.txt 2> stderr.txt";
    const int status = std::system(cmd.c_str());
    Outcome o;
    o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    o.out = slurp(dir / "stdout.txt");
    o.err = slurp(dir / "stderr.txt");
    fs::remove(dir / "stdout.txt");
    fs::remove(dir / "stderr.txt");
    return o;
}

void write(const fs::path& p, const json& j) { std::ofstream(p) << j.dump(2); }

json phase_noise_config() {
    return json::parse(R"({
        "task": "spectrum",
        "physical": {"swave": {"frequency": {"value": 30, "unit": "omega_R"}}},
        "spectrum": {"kind": "phase_noise"},
        "grid": {"min": -10, "max": 10, "points": 2001, "unit": "kappa"},
        "output": "pn"
    })");
}

json error_record(const Outcome& o) {
    REQUIRE_FALSE(o.err.empty());
    return json::parse(o.err);
}

std::size_t file_count(const fs::path& dir) {
    return static_cast<std::size_t>(std::distance(fs::directory_iterator(dir), fs::directory_iterator()));
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("phase-noise scenario writes CSV and sidecar") {
    const auto dir = workdir("pn");
    write(dir / "cfg.json", phase_noise_config());
    const auto o = cli(dir, "spectrum --config cfg.json --out-dir out");
    REQUIRE(o.code == 0);
    const auto csv = slurp(dir / "out" / "pn.csv");
    CHECK(csv.rfind("omega_over_kappa,S_P\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2002);
    const auto meta = json::parse(slurp(dir / "out" / "pn.meta.json"));
    CHECK(meta["model"]["swave"] == 30.0);
    CHECK(meta["working_point"]["delta_d"].get<double>() == doctest::Approx(-157.97).epsilon(2e-4));
    CHECK(meta["data_file"] == "pn.csv");
}

TEST_CASE("identical configs give byte-identical output") {
    const auto dir = workdir("det");
    write(dir / "cfg.json", phase_noise_config());
    REQUIRE(cli(dir, "spectrum --config cfg.json --out-dir a --threads 1").code == 0);
    REQUIRE(cli(dir, "spectrum --config cfg.json --out-dir b", "CAVBEC_THREADS=4").code == 0);
    REQUIRE(cli(dir, "spectrum --config cfg.json --out-dir c --threads 3").code == 0);
    CHECK(slurp(dir / "a" / "pn.csv") == slurp(dir / "b" / "pn.csv"));
    CHECK(slurp(dir / "a" / "pn.csv") == slurp(dir / "c" / "pn.csv"));
    CHECK(slurp(dir / "a" / "pn.meta.json") == slurp(dir / "b" / "pn.meta.json"));
    REQUIRE(cli(dir, "figure fig3b --out-dir f1").code == 0);
    REQUIRE(cli(dir, "figure fig3b --out-dir f2 --threads 8").code == 0);
    CHECK(slurp(dir / "f1" / "fig3b_sw30.csv") == slurp(dir / "f2" / "fig3b_sw30.csv"));
    CHECK(slurp(dir / "f1" / "fig3b_manifest.json") == slurp(dir / "f2" / "fig3b_manifest.json"));
}

TEST_CASE("non-positive kappa is a validation error naming the field") {
    const auto dir = workdir("kappa");
    auto cfg = phase_noise_config();
    cfg["physical"]["cavity_decay"] = {{"value", 0}, {"unit", "omega_R"}};
    write(dir / "cfg.json", cfg);
    const auto o = cli(dir, "spectrum --config cfg.json --out-dir out");
    CHECK(o.code == 2);
    const auto e = error_record(o);
    CHECK(e["error"] == "InvalidParameter");
    CHECK(e["field"] == "cavity_decay");
    CHECK(e["message"].get<std::string>().find("cavity_decay") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "out" / "pn.csv"));
}

TEST_CASE("all-unstable operating point") {
    const auto dir = workdir("unstable");
    write(dir / "cfg.json", json::parse(R"({
        "task": "spectrum",
        "model": {"lattice_depth": 0.4414, "stark_detuning": -47.86, "swave": 50,
                  "kappa": 24, "gamma": 0.024, "eta": 20},
        "output": "u"
    })"));
    const auto o = cli(dir, "spectrum --config cfg.json --out-dir out");
    CHECK(o.code == 3);
    CHECK(error_record(o)["error"] == "NoStableBranch");
    CHECK((!fs::exists(dir / "out") || file_count(dir / "out") == 0));

    const auto steady = cli(dir, "steady --config cfg.json --out-dir out");
    CHECK(steady.code == 2);   // config names task spectrum
    auto cfg = json::parse(slurp(dir / "cfg.json"));
    cfg.erase("task");
    write(dir / "cfg.json", cfg);
    REQUIRE(cli(dir, "steady --config cfg.json --out-dir out").code == 0);
    const auto report = json::parse(slurp(dir / "out" / "u.json"));
    CHECK(report["selected"].is_null());
    CHECK(report["steady"]["points"][0]["stable"] == false);
}

TEST_CASE("figure presets") {
    const auto dir = workdir("fig");
    REQUIRE(cli(dir, "figure fig3a --out-dir out").code == 0);
    CHECK(fs::exists(dir / "out" / "fig3a_sw0.csv"));
    CHECK(fs::exists(dir / "out" / "fig3a_sw1.csv"));
    CHECK(slurp(dir / "out" / "fig3a_sw0.csv").rfind("omega_over_kappa,S_P\n", 0) == 0);
    const auto manifest = json::parse(slurp(dir / "out" / "fig3a_manifest.json"));
    CHECK(manifest["curves"].size() == 2);
    CHECK(manifest["version"] == "1");

    REQUIRE(cli(dir, "figure fig6b --out-dir out6").code == 0);
    CHECK(slurp(dir / "out6" / "fig6b_si.csv").rfind("omega_over_omegam,S_I\n", 0) == 0);
    CHECK(slurp(dir / "out6" / "fig6b_sopt.csv").rfind("omega_over_omegam,S_opt,phi_opt\n", 0) == 0);
    const auto m6 = json::parse(slurp(dir / "out6" / "fig6b_manifest.json"));
    CHECK(m6["notes"][0].get<std::string>().find("74 omega_R") != std::string::npos);

    const auto nope = cli(dir, "figure nope --out-dir bad");
    CHECK(nope.code == 2);
    CHECK(error_record(nope)["error"] == "UnknownPreset");
}

TEST_CASE("calibrate") {
    const auto dir = workdir("calib");
    auto a = cli(dir, "calibrate --splitting 4.2 --unit kappa");
    REQUIRE(a.code == 0);
    CHECK(json::parse(a.out)["omega_sw_over_omegaR"].get<double>() == doctest::Approx(60.0).epsilon(0.05));
    auto b = cli(dir, "calibrate --splitting 5.6 --unit kappa");
    REQUIRE(b.code == 0);
    CHECK(json::parse(b.out)["omega_sw_over_omegaR"].get<double>() == doctest::Approx(30.0).epsilon(0.1));
    auto c = cli(dir, "calibrate --splitting 100 --unit kappa");
    CHECK(c.code == 3);
    CHECK(error_record(c)["error"] == "OutOfRange");

    REQUIRE(cli(dir, "figure fig4b --out-dir curve").code == 0);
    auto d = cli(dir, "calibrate --splitting 4.2 --unit kappa --curve curve/fig4b_curve.json");
    REQUIRE(d.code == 0);
    const auto est = json::parse(d.out);
    CHECK(est["curve_source"] == "curve_file");
    CHECK(est["omega_sw_over_omegaR"].get<double>() ==
          doctest::Approx(json::parse(a.out)["omega_sw_over_omegaR"].get<double>()).epsilon(0.01));

    auto both = cli(dir, "calibrate --splitting 4.2 --curve x.json --protocol y.json");
    CHECK(both.code == 2);
    auto missing = cli(dir, "calibrate --splitting 4.2 --curve missing.json");
    CHECK(missing.code == 2);
}

TEST_CASE("bad invocations") {
    const auto dir = workdir("bad");
    CHECK(cli(dir, "spectrum --config nowhere.json").code == 2);
    std::ofstream(dir / "broken.json") << "{ not json";
    CHECK(cli(dir, "spectrum --config broken.json").code == 2);
    CHECK(cli(dir, "frobnicate").code == 2);
    write(dir / "cfg.json", phase_noise_config());
    CHECK(cli(dir, "spectrum --config cfg.json", "CAVBEC_THREADS=zero").code == 2);
    CHECK(cli(dir, "spectrum --config cfg.json --format xml").code == 2);
}

TEST_CASE("stability sweep") {
    const auto dir = workdir("sweep");
    write(dir / "cfg.json", json::parse(R"({"physical": {}, "sweep": {"min": 0, "max": 120, "points": 13}})"));
    REQUIRE(cli(dir, "stability --config cfg.json --out-dir out").code == 0);
    const auto csv = slurp(dir / "out" / "stability.csv");
    CHECK(csv.rfind("omega_sw_over_omegaR,stable,", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 14);
    REQUIRE(cli(dir, "stability --config cfg.json --out-dir outj --format json").code == 0);
    const auto j = json::parse(slurp(dir / "outj" / "stability.json"));
    CHECK(j["data"]["stable"].size() == 13);
    CHECK(j["meta"]["unstable_samples"] == 0);
}

}
