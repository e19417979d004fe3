#include "doctest.h"

#include "tvnet/networks.hpp"
#include "tvnet/panel.hpp"
#include "tvnet/text.hpp"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>

#ifndef TVNET_CLI
#error "TVNET_CLI must name the command-line binary"
#endif

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(TVNET_CLI) + " " + args + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

fs::path fresh(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "tvnet_test_cli" / name;
    fs::remove_all(dir);
    fs::create_directories(dir.parent_path());
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Relative path -> contents for every file under dir.
std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = slurp(e.path());
    return out;
}

}  // namespace

TEST_CASE("simulate writes panel, truth and manifest") {
    const fs::path out = fresh("sim");
    CHECK(run("simulate --example 3 --d 4 --n 50 --seed 7 --out " + out.string()) == 0);
    const auto panel = tvnet::load_panel(out / "panel.csv", false);
    CHECK(panel.n() == 50);
    CHECK(panel.d() == 4);
    CHECK(fs::exists(out / "truth.bin"));
    CHECK(fs::exists(out / "manifest.json"));
    CHECK(slurp(out / "manifest.json").find("\"seed\": 7") != std::string::npos);
}

TEST_CASE("exit codes") {
    const fs::path sim = fresh("codes_sim");
    REQUIRE(run("simulate --example 1 --d 4 --n 80 --seed 2 --out " + sim.string()) == 0);
    const std::string input = (sim / "panel.csv").string();
    CHECK(run("estimate --p 0 --input " + input + " --out " + fresh("codes_p0").string()) == 1);
    CHECK(run("estimate --gamma 2 --input " + input + " --out " + fresh("codes_g").string()) == 1);
    CHECK(run("simulate --example 9 --out " + fresh("codes_ex").string()) == 1);
    CHECK(run("simulate --example 1 --d 5 --n 50 --out " + fresh("codes_odd").string()) == 1);
    CHECK(run("estimate --input /nonexistent.csv --out " + fresh("codes_io").string()) == 3);
    CHECK(run("networks --paths /nonexistent --out " + fresh("codes_net").string()) == 3);
    // lag order too large for the sample
    const fs::path tiny = fresh("codes_tiny");
    REQUIRE(run("simulate --example 1 --d 2 --n 6 --seed 1 --out " + tiny.string()) == 0);
    const fs::path failed = fresh("codes_num");
    CHECK(run("estimate --p 6 --input " + (tiny / "panel.csv").string() + " --out " + failed.string()) == 2);
    CHECK_FALSE(fs::exists(failed / "manifest.json"));
    CHECK(run("--help") == 0);
    CHECK(run("frobnicate") == 1);
}

TEST_CASE("identical reruns give identical artifacts") {
    const fs::path sim = fresh("rerun_sim");
    REQUIRE(run("simulate --example 2 --d 6 --n 120 --seed 3 --out " + sim.string()) == 0);
    const std::string input = (sim / "panel.csv").string();
    const fs::path a = fresh("rerun_a"), b = fresh("rerun_b");
    REQUIRE(run("estimate --threads 1 --input " + input + " --out " + a.string()) == 0);
    REQUIRE(run("estimate --threads 3 --input " + input + " --out " + b.string()) == 0);
    const auto sa = snapshot(a), sb = snapshot(b);
    CHECK(sa.size() > 5);
    CHECK(sa == sb);

    const fs::path s2 = fresh("rerun_sim2");
    REQUIRE(run("simulate --example 2 --d 6 --n 120 --seed 3 --out " + s2.string()) == 0);
    CHECK(snapshot(sim) == snapshot(s2));
}

TEST_CASE("networks rebuilds the estimated edge lists") {
    const fs::path sim = fresh("net_sim");
    REQUIRE(run("simulate --example 2 --d 5 --n 150 --seed 4 --out " + sim.string()) == 0);
    const fs::path est = fresh("net_est"), net = fresh("net_net");
    REQUIRE(run("estimate --input " + (sim / "panel.csv").string() + " --out " + est.string()) == 0);
    REQUIRE(run("networks --paths " + (est / "paths").string() + " --precision " +
                (est / "precision.bin").string() + " --out " + net.string()) == 0);
    const auto a = tvnet::parse_edge_list_csv(slurp(est / "edges.csv"), 5);
    const auto b = tvnet::parse_edge_list_csv(slurp(net / "edges.csv"), 5);
    CHECK(a.granger == b.granger);
    CHECK(a.partial == b.partial);
    CHECK(a.granger.size() > 0);
    CHECK(fs::exists(net / "manifest.json"));

    const fs::path met = fresh("net_metrics");
    CHECK(run("metrics --truth " + (sim / "truth.bin").string() + " --edges " + (est / "edges.csv").string() +
              " --out " + met.string()) == 0);
    CHECK(slurp(met / "metrics.json").find("F1") != std::string::npos);
}

TEST_CASE("factor-adjust removes a noiseless rank-two component") {
    std::mt19937_64 rng(6);
    std::normal_distribution<double> z;
    Eigen::MatrixXd f(60, 2), l(2, 5);
    for (Eigen::Index i = 0; i < f.size(); ++i) f.data()[i] = z(rng);
    for (Eigen::Index i = 0; i < l.size(); ++i) l.data()[i] = z(rng);
    const fs::path dir = fresh("factor");
    fs::create_directories(dir);
    tvnet::save_panel(tvnet::TimeSeriesPanel(f * l), dir / "z.csv");
    const fs::path out = dir / "out";
    REQUIRE(run("factor-adjust --factor-mode constant --k 2 --input " + (dir / "z.csv").string() +
                " --out " + out.string()) == 0);
    const auto x = tvnet::load_panel(out / "idiosyncratic.csv", false);
    CHECK(x.values().cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("config file values yield to flags") {
    const fs::path dir = fresh("config");
    fs::create_directories(dir);
    {
        std::ofstream cfg(dir / "run.toml");
        cfg << "# scenario\nexample = 3\nd = 4\nn = 30\nseed = 9\n";
    }
    const fs::path a = dir / "a", b = dir / "b";
    REQUIRE(run("simulate --config " + (dir / "run.toml").string() + " --out " + a.string()) == 0);
    REQUIRE(run("simulate --config " + (dir / "run.toml").string() + " --n 40 --out " + b.string()) == 0);
    CHECK(tvnet::load_panel(a / "panel.csv", false).n() == 30);
    CHECK(tvnet::load_panel(b / "panel.csv", false).n() == 40);
    CHECK(tvnet::load_panel(b / "panel.csv", false).d() == 4);
}

TEST_CASE("benchmark with one replication reports that replication") {
    const fs::path out = fresh("bench");
    REQUIRE(run("benchmark --example 1 --d 4 --n 80 --reps 1 --methods wglasso,oracle --out " + out.string()) == 0);
    const std::string csv = slurp(out / "benchmark.csv");
    CHECK(csv.rfind("example,d,n,method,metric,mean,sd,count\n", 0) == 0);
    CHECK(csv.find("\n1,4,80,oracle,FP,0,0,1\n") != std::string::npos);
    CHECK(csv.find("\n1,4,80,oracle,FN,0,0,1\n") != std::string::npos);
    CHECK(fs::exists(out / "replications.json"));
}

TEST_CASE("estimate on Example 1 finds exactly the self-edges") {
    int exact = 0;
    const int seeds = 20;
    for (int s = 0; s < seeds; ++s) {
        const fs::path sim = fresh("e2e_sim"), est = fresh("e2e_est");
        REQUIRE(run("simulate --example 1 --d 10 --n 400 --seed " + std::to_string(900 + s) + " --out " +
                    sim.string()) == 0);
        REQUIRE(run("estimate --input " + (sim / "panel.csv").string() + " --out " + est.string()) == 0);
        const auto edges = tvnet::parse_edge_list_csv(slurp(est / "edges.csv"), 10);
        bool ok = edges.granger.size() == 10;
        for (Eigen::Index i = 0; i < 10; ++i) ok = ok && edges.granger.contains(i, i);
        exact += ok;
    }
    MESSAGE("exactly the self-edges in " << exact << " of " << seeds << " runs");
    CHECK(exact >= 18);
}

TEST_CASE("benchmark reproduces the Example 1 F1 cell") {
    const fs::path out = fresh("bench_ex1");
    REQUIRE(run("benchmark --example 1 --d 50 --n 200 --reps 20 --methods wglasso --out " + out.string()) == 0);
    const std::string csv = slurp(out / "benchmark.csv");
    const std::string key = "\n1,50,200,wglasso,F1,";
    const auto at = csv.find(key);
    REQUIRE(at != std::string::npos);
    const double f1 = std::stod(csv.substr(at + key.size()));
    MESSAGE("mean F1 " << f1);
    CHECK(std::abs(f1 - 0.953) <= 0.05);
}
