// Acceptance report: one PASS/FAIL line per criterion.  Monte-Carlo runs that
// serve several criteria are computed once.  With arguments, only the listed
// criteria run (e.g. `tvnet_acceptance 6 7`).

#include "property_checks.hpp"

#include "tvnet/benchmark.hpp"
#include "tvnet/error.hpp"
#include "tvnet/kernels.hpp"
#include "tvnet/parallel.hpp"
#include "tvnet/wglasso.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#ifndef TVNET_SOURCE_DIR
#error "TVNET_SOURCE_DIR must point at the repository root"
#endif

using namespace tvnet;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Run {
    BenchmarkResult result;
    double seconds = 0.0;

    double mean(const std::string& method, const std::string& metric) const {
        const auto m = result.summary.find(method);
        if (m == result.summary.end()) return std::numeric_limits<double>::quiet_NaN();
        const auto v = m->second.find(metric);
        return v == m->second.end() ? std::numeric_limits<double>::quiet_NaN() : v->second.mean;
    }
    long failures(const std::string& method) const {
        const auto f = result.failures.find(method);
        return f == result.failures.end() ? 0 : f->second;
    }
};

std::map<std::string, Run> cache;

const Run& simulate_once(int example, Eigen::Index d, Eigen::Index n, int reps,
                         std::vector<Method> methods) {
    std::ostringstream key;
    key << example << '/' << d << '/' << n << '/' << reps;
    auto it = cache.find(key.str());
    if (it != cache.end()) return it->second;
    BenchmarkConfig c;
    c.example = example;
    c.d = d;
    c.n = n;
    c.reps = reps;
    c.seed = 1;
    c.methods = std::move(methods);
    c.options.threads = default_threads();
    std::cerr << "  running example " << example << " d=" << d << " n=" << n << " reps=" << reps
              << " ..." << std::endl;
    const auto t0 = Clock::now();
    Run run{run_benchmark(c), 0.0};
    run.seconds = seconds_since(t0);
    std::cerr << "  done in " << run.seconds << " s" << std::endl;
    return cache.emplace(key.str(), std::move(run)).first->second;
}

// Shared runs.  The method lists cover every criterion that reads them.
const Run& ex1_n200() {
    return simulate_once(1, 50, 200, 20,
                         {Method::WgLasso, Method::Oracle, Method::Clime, Method::InfeasibleClime});
}
const Run& ex1_n400() {
    return simulate_once(1, 50, 400, 10, {Method::WgLasso, Method::Clime, Method::InfeasibleClime});
}
const Run& ex2(Eigen::Index n, int reps) {
    return simulate_once(2, 50, n, reps, {Method::WgLasso, Method::Oracle});
}
const Run& ex3_n400() {
    return simulate_once(3, 50, 400, 10, {Method::WgLasso, Method::Oracle, Method::Full, Method::Clime});
}

struct Verdict {
    bool passed;
    std::string detail;
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

bool within(double v, double centre, double tol) { return std::abs(v - centre) <= tol; }

std::string failure_note(const Run& r) {
    std::string s;
    for (const auto& [m, k] : r.result.failures)
        if (k > 0) s += " " + m + "-failures=" + std::to_string(k);
    return s;
}

Verdict criterion1() {
    const Run& r = ex1_n200();
    const double f1 = r.mean("wglasso", "F1"), mcc = r.mean("wglasso", "MCC");
    const double fp = r.mean("oracle", "FP"), fn = r.mean("oracle", "FN");
    const bool ok = f1 >= 0.90 && f1 <= 1.0 && mcc >= 0.90 && mcc <= 1.0 && fp == 0.0 && fn == 0.0 &&
                    r.failures("wglasso") == 0 && r.failures("oracle") == 0 && r.seconds <= 1800.0;
    return {ok, "wgLASSO F1=" + fmt(f1) + " MCC=" + fmt(mcc) + " (need [0.90,1]); oracle FP=" + fmt(fp) +
                    " FN=" + fmt(fn) + " (need 0); 20 reps incl. both CLIME variants took " +
                    fmt(r.seconds) + " s (limit 1800)" + failure_note(r)};
}

Verdict criterion2() {
    const Run& r = ex1_n400();
    const double f1 = r.mean("wglasso", "F1"), ee = r.mean("wglasso", "EE_A");
    const bool ok = f1 >= 0.99 && within(ee, 0.160, 0.05) && r.failures("wglasso") == 0;
    return {ok, "wgLASSO F1=" + fmt(f1) + " (need >= 0.99); EE_A=" + fmt(ee) + " (need 0.160 +- 0.05)" +
                    failure_note(r)};
}

Verdict criterion3() {
    const Run& a = ex1_n200();
    const Run& b = ex1_n400();
    const double f1 = a.mean("clime", "F1"), fp = a.mean("clime", "FP");
    const double inf_f1 = a.mean("infeasible-clime", "F1");
    const double fn4 = b.mean("clime", "FN"), f14 = b.mean("clime", "F1");
    const bool ok = within(f1, 0.884, 0.08) && fp <= 0.5 && fn4 <= 0.5 && f14 >= 0.99 && inf_f1 >= f1 &&
                    a.failures("clime") == 0 && b.failures("clime") == 0;
    return {ok, "n=200: CLIME F1=" + fmt(f1) + " (need 0.884 +- 0.08), FP=" + fmt(fp) +
                    " (need <= 0.5), infeasible F1=" + fmt(inf_f1) + " (need >= CLIME); n=400: FN=" +
                    fmt(fn4) + " (need <= 0.5), F1=" + fmt(f14) + " (need >= 0.99)" + failure_note(a) +
                    failure_note(b)};
}

Verdict criterion4() {
    const Run& a = ex2(200, 20);
    const Run& b = ex2(400, 10);
    const double f1 = a.mean("wglasso", "F1");
    const double wg2 = a.mean("wglasso", "EE_A"), or2 = a.mean("oracle", "EE_A");
    const double wg4 = b.mean("wglasso", "EE_A"), or4 = b.mean("oracle", "EE_A");
    const bool ok = within(f1, 0.834, 0.07) && wg2 > or2 && wg4 < wg2 && or4 < or2 &&
                    a.failures("wglasso") == 0 && b.failures("wglasso") == 0;
    return {ok, "n=200 wgLASSO F1=" + fmt(f1) + " (need 0.834 +- 0.07); EE_A wgLASSO " + fmt(wg2) + " -> " +
                    fmt(wg4) + ", oracle " + fmt(or2) + " -> " + fmt(or4) +
                    " (need wgLASSO > oracle at n=200 and both decreasing)" + failure_note(a) +
                    failure_note(b)};
}

Verdict criterion5() {
    const Run& r = ex3_n400();
    const double ee = r.mean("wglasso", "EE_A"), eo = r.mean("clime", "EE_Omega");
    bool identical = r.failures("full") == 0 && r.failures("oracle") == 0;
    for (const auto& rep : r.result.replications) {
        const auto f = rep.records.find("full"), o = rep.records.find("oracle");
        if (f == rep.records.end() || o == rep.records.end() || f->second != o->second) identical = false;
    }
    const bool ok = within(ee, 0.348, 0.07) && within(eo, 1.601, 0.15) && identical;
    return {ok, "wgLASSO EE_A=" + fmt(ee) + " (need 0.348 +- 0.07); CLIME EE_Omega=" + fmt(eo) +
                    " (need 1.601 +- 0.15); full == oracle in every replication: " +
                    (identical ? "yes" : "no") + failure_note(r)};
}

Verdict criterion6() {
    std::string detail;
    bool ok = true;
    for (int example : {1, 2}) {
        const auto data = generate({example, 100, 200, 1, 0, 200});
        const double h = default_bandwidths(200, 100).h;
        const auto design = build_lagged_design(data.panel, 0, 1);
        std::string outcome;
        try {
            fit_full(design, h);
            outcome = "no error";
            ok = false;
        } catch (const SingularDesignError& e) {
            outcome = "SingularDesignError";
        } catch (const std::exception& e) {
            outcome = std::string("other error: ") + e.what();
            ok = false;
        }
        detail += "example " + std::to_string(example) + ": " + outcome + "; ";
    }
    return {ok, detail + "d=100, n=200, h=" + fmt(default_bandwidths(200, 100).h)};
}

Verdict criterion7() {
    const auto t0 = Clock::now();
    const std::vector<std::pair<std::string, std::function<checks::Result()>>> suites = {
        {"a:lasso-kkt", [] { return checks::lasso_kkt(50); }},
        {"a:group-kkt", [] { return checks::group_lasso_kkt(50); }},
        {"b:clime-lp", [] { return checks::clime_lp(25); }},
        {"c:annihilation", [] { return checks::weight_annihilation(100); }},
        {"d:scad", [] { return checks::scad_piecewise(); }},
        {"e:symmetrize", [] { return checks::symmetrize_properties(100); }},
        {"f:pca", [] { return checks::pca_properties(20); }},
        {"g:truth", [] { return checks::truth_invariants(); }},
        {"h:determinism", [] { return checks::thread_determinism(); }},
    };
    bool ok = true;
    std::string detail;
    for (const auto& [name, run] : suites) {
        const auto r = run();
        ok = ok && r.passed;
        detail += name + (r.passed ? " ok" : " FAILED (" + r.detail + ")") + "; ";
    }
    const double secs = seconds_since(t0);
    ok = ok && secs < 300.0;
    return {ok, detail + "took " + fmt(secs) + " s (limit 300)"};
}

Verdict criterion8() {
    namespace fs = std::filesystem;
    const fs::path dir = fs::path(TVNET_SOURCE_DIR) / "configs";
    std::vector<std::string> names;
    if (fs::is_directory(dir))
        for (const auto& e : fs::directory_iterator(dir))
            if (e.path().extension() == ".toml") names.push_back(e.path().filename().string());
    std::sort(names.begin(), names.end());
    std::string list;
    for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
    return {!names.empty(), "opt-in long-running configs (not gated): " + (list.empty() ? "none" : list)};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
        {"1 Example 1 reduced scale (d=50 n=200, 20 reps)", criterion1},
        {"2 Example 1 large n (d=50 n=400, 10 reps)", criterion2},
        {"3 Example 1 CLIME (d=50, n=200 and 400)", criterion3},
        {"4 Example 2 ordering (d=50, n=200 and 400)", criterion4},
        {"5 Example 3 non-sparse (d=50 n=400, 10 reps)", criterion5},
        {"6 tv-Full failure at d=100 n=200", criterion6},
        {"7 property suites", criterion7},
        {"8 full-scale configs", criterion8},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        if (!only.empty() && !only.count(static_cast<int>(k + 1))) continue;
        const auto& [name, check] = criteria[k];
        Verdict v{false, ""};
        try {
            v = check();
        } catch (const std::exception& e) {
            v = {false, std::string("threw: ") + e.what()};
        }
        failed += !v.passed;
        std::cout << (v.passed ? "PASS  " : "FAIL  ") << name << " | " << v.detail << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
