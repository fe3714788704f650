// Acceptance gate: one self-contained check per criterion, each printing a
// single [PASS]/[FAIL] line. Run with --criterion N for one check or with no
// arguments for all of them.

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "tensorlab/deviation.hpp"
#include "tensorlab/experiments.hpp"
#include "tensorlab/order_stats.hpp"

using namespace tensorlab;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double elapsed_s(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g", x);
    return buf;
}

SpectrumSpec random_spectrum(Rng& rng, int d) {
    std::vector<double> vals(d);
    for (int j = 0; j < d; ++j) vals[j] = 0.2 + 2.8 * rng.uniform();
    return SpectrumSpec::explicit_spec(vals);
}

// ---------------------------------------------------------------------------
// 1. ascent vs exact eigen path at p = 2

Outcome criterion1() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(derive_seed(101, 0, "acc1"));
    double worst = 0.0;
    for (int inst = 0; inst < 100; ++inst) {
        const int d = 2 + static_cast<int>(rng.uniform() * 49);    // <= 50
        const long n = d + static_cast<long>(rng.uniform() * (500 - d));
        SpectrumSpec spec = random_spectrum(rng, d);
        auto pop = PopulationOracle::gaussian_closed_form(spec);
        SampleBatch batch = sample_anisotropic(
            DistModel::gaussian, spec, n,
            SeedTrace{101, static_cast<std::uint64_t>(inst), "acc1-batch"});
        MomentFunctional f(std::move(batch), 2, MomentMode::signed_power, pop);
        const DomainSpec dom = DomainSpec::sphere(d);
        SupResult exact = sup_exact_p2(f, dom);
        AscentOptions opts;
        opts.restarts = 2;    // the warm start from the eigenvector dominates
        opts.max_iters = 400;
        opts.seed = derive_seed(101, inst, "acc1-ascent");
        SupResult asc = sup_ascent(f, dom, opts);
        worst = std::max(worst, std::abs(asc.value - exact.value) /
                                    std::max(exact.value, 1e-300));
    }
    const double secs = elapsed_s(t0);
    Outcome out;
    out.pass = worst <= 1e-6 && secs < 60.0;
    out.detail = "worst rel diff " + fmt(worst) + ", " + fmt(secs) + "s";
    return out;
}

// ---------------------------------------------------------------------------
// 2. ascent vs dense grid oracle in low dimension

Outcome criterion2() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(derive_seed(102, 0, "acc2"));
    double worst = 0.0;
    for (int inst = 0; inst < 50; ++inst) {
        const int d = 2 + inst % 2;
        const double p = 2.0 + (inst / 2) % 3;
        const long n = 30 + static_cast<long>(rng.uniform() * 70);
        auto pop = PopulationOracle::gaussian_closed_form(SpectrumSpec::identity(d));
        SampleBatch batch = sample_isotropic(
            DistModel::gaussian, d, n,
            SeedTrace{102, static_cast<std::uint64_t>(inst), "acc2-batch"});
        MomentFunctional f(std::move(batch), p, MomentMode::signed_power, pop);
        const DomainSpec dom = DomainSpec::sphere(d);
        AscentOptions opts;
        opts.seed = derive_seed(102, inst, "acc2-ascent");
        SupResult asc = sup_ascent(f, dom, opts);
        SupResult grid = sup_grid(f, dom, d == 2 ? 100000 : 200000);
        const double diff = std::abs(asc.value - grid.value);
        const double tol = std::max(1e-3, 1e-3 * std::max(asc.value, grid.value));
        worst = std::max(worst, diff / tol);
    }
    const double secs = elapsed_s(t0);
    Outcome out;
    out.pass = worst <= 1.0 && secs < 300.0;
    out.detail = "worst diff/tol " + fmt(worst) + ", " + fmt(secs) + "s";
    return out;
}

// ---------------------------------------------------------------------------
// 3. analytic gradient vs central finite differences

Outcome criterion3() {
    Rng rng(derive_seed(103, 0, "acc3"));
    const double h = 1e-5;
    double worst = 0.0;
    const DistModel models[] = {DistModel::gaussian, DistModel::rademacher,
                                DistModel::uniform_sphere_scaled};
    for (int inst = 0; inst < 60; ++inst) {
        const DistModel model = models[inst % 3];
        const double p = 2.0 + (inst / 3) % 4;  // 2..5
        const int d = 2 + static_cast<int>(rng.uniform() * 6);
        const long n = 20 + static_cast<long>(rng.uniform() * 80);
        auto pop = model == DistModel::gaussian
                       ? PopulationOracle::gaussian_closed_form(SpectrumSpec::identity(d))
                       : PopulationOracle::mc(model, SpectrumSpec::identity(d), 20000,
                                              derive_seed(103, inst, "acc3-oracle"));
        SampleBatch batch = sample_isotropic(
            model, d, n, SeedTrace{103, static_cast<std::uint64_t>(inst), "acc3-batch"});
        MomentFunctional f(std::move(batch), p, MomentMode::signed_power, pop);
        Eigen::VectorXd v(d);
        for (int j = 0; j < d; ++j) v[j] = rng.normal();
        v.normalize();
        Eigen::VectorXd an = centered_gradient(f, v);
        Eigen::VectorXd fd(d);
        for (int j = 0; j < d; ++j) {
            Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
            e[j] = h;
            fd[j] = (centered_value(f, v + e) - centered_value(f, v - e)) / (2 * h);
        }
        worst = std::max(worst, (an - fd).norm() / std::max(an.norm(), 1e-300));
    }
    Outcome out;
    out.pass = worst <= 1e-5;
    out.detail = "worst rel error " + fmt(worst);
    return out;
}

// ---------------------------------------------------------------------------
// 4. closed-form even moments vs a large Monte Carlo oracle

Outcome criterion4() {
    Rng rng(derive_seed(104, 0, "acc4"));
    double worst = 0.0;
    for (int inst = 0; inst < 20; ++inst) {
        const int d = 2 + static_cast<int>(rng.uniform() * 4);
        const double p = 2.0 * (1 + inst % 4);  // 2, 4, 6, 8
        SpectrumSpec spec = random_spectrum(rng, d);
        auto closed = PopulationOracle::gaussian_closed_form(spec);
        auto mc = PopulationOracle::mc(DistModel::gaussian, spec, 1000000,
                                       derive_seed(104, inst, "acc4-oracle"));
        Eigen::VectorXd v(d);
        for (int j = 0; j < d; ++j) v[j] = rng.normal();
        const double a = closed.moment(v, p, MomentMode::signed_power);
        const double b = mc.moment(v, p, MomentMode::signed_power);
        const double se = mc.moment_std_error(v, p, MomentMode::signed_power);
        worst = std::max(worst, std::abs(a - b) / (4.0 * se));
    }
    Outcome out;
    out.pass = worst <= 1.0;
    out.detail = "worst |diff|/(4 SE) " + fmt(worst);
    return out;
}

// ---------------------------------------------------------------------------
// 5. Gaussian-complexity sandwich on random spectra

Outcome criterion5() {
    Rng rng(derive_seed(105, 0, "acc5"));
    bool pass = true;
    std::string bad;
    for (int inst = 0; inst < 30; ++inst) {
        const int d = 2 + static_cast<int>(rng.uniform() * 14);
        SpectrumSpec spec = random_spectrum(rng, d);
        auto est = gauss_complexity_mc(DomainSpec::ellipsoid(spec), 20000,
                                       derive_seed(105, inst, "acc5-gamma"));
        double trace = 0.0;
        for (double l : materialize_spectrum(spec)) trace += l;
        const double lo = std::sqrt(2.0 / std::numbers::pi) * ellipsoid_radius(spec);
        const double hi = std::sqrt(trace);
        if (est.mean + 3.0 * est.std_error < lo || est.mean - 3.0 * est.std_error > hi) {
            pass = false;
            bad = "instance " + std::to_string(inst) + ": gamma " + fmt(est.mean) +
                  " vs [" + fmt(lo) + ", " + fmt(hi) + "]";
            break;
        }
    }
    Outcome out;
    out.pass = pass;
    out.detail = pass ? "30 spectra inside the sandwich" : bad;
    return out;
}

// ---------------------------------------------------------------------------
// shared runner for the rate curves of criteria 6 and 7

ExperimentConfig curve_config(const SpectrumSpec& spec, double p, std::uint64_t seed) {
    ExperimentConfig cfg;
    cfg.model = DistModel::gaussian;
    cfg.spectrum = spec;
    cfg.mode = MomentMode::signed_power;
    cfg.p_list = {p};
    cfg.n_list = {256, 512, 1024, 2048, 4096, 8192};
    cfg.trials_per_cell = 100;
    cfg.t_kind = DomainKind::sphere;
    cfg.restarts = 8;
    cfg.max_iters = 500;
    cfg.master_seed = seed;
    return cfg;
}

RateFit run_curve(const ExperimentConfig& cfg) {
    std::vector<CellResult> cells;
    for (long n : cfg.n_list) cells.push_back(run_cell(cfg, n, cfg.p_list[0]));
    return fit_rates(cells);
}

Outcome criterion6() {
    const auto t0 = std::chrono::steady_clock::now();
    struct Curve { int d; double p; };
    const Curve curves[] = {{5, 2}, {10, 2}, {5, 3}};
    Outcome out;
    out.pass = true;
    std::string parts;
    for (const Curve& c : curves) {
        RateFit fit = run_curve(curve_config(SpectrumSpec::identity(c.d), c.p, 106));
        parts += " (d=" + std::to_string(c.d) + ",p=" + fmt(c.p) + "): " + fmt(fit.slope);
        if (fit.slope < -0.65 || fit.slope > -0.35) out.pass = false;
    }
    const double secs = elapsed_s(t0);
    if (secs >= 1200.0) out.pass = false;
    out.detail = "slopes" + parts + ", " + fmt(secs) + "s";
    return out;
}

Outcome criterion7() {
    Outcome out;
    out.pass = true;
    std::string parts;
    auto check = [&](const SpectrumSpec& spec, double p, const std::string& tag) {
        RateFit fit = run_curve(curve_config(spec, p, 107));
        parts += " " + tag + ": " + fmt(fit.ratio_spread);
        if (!(fit.ratio_spread <= 6.0)) out.pass = false;
    };
    check(SpectrumSpec::identity(5), 2, "(d=5,p=2)");
    check(SpectrumSpec::identity(10), 2, "(d=10,p=2)");
    check(SpectrumSpec::identity(5), 3, "(d=5,p=3)");
    for (int r : {2, 8, 32})
        check(SpectrumSpec::flat(r, 50), 2, "(flat r=" + std::to_string(r) + ")");
    out.detail = "ratio spreads" + parts;
    return out;
}

// ---------------------------------------------------------------------------
// 8. order-statistics tail verifier with seed-half stability

Outcome criterion8() {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    out.pass = true;
    double worst_drift = 0.0;
    for (double t : {3.0, 5.0, 8.0}) {
        for (double q : {2.0, 4.0}) {
            TailReport full = verify_lemma(DistModel::gaussian, 1000, t, q, 100000, 108);
            const double budget = 2.0 * std::exp(-t) + 1e-12;
            if (full.exceed_freq_head > budget || full.exceed_freq_tail > budget)
                out.pass = false;
            TailReport h1 =
                verify_lemma(DistModel::gaussian, 1000, t, q, 50000, 108, 0);
            TailReport h2 =
                verify_lemma(DistModel::gaussian, 1000, t, q, 50000, 108, 50000);
            auto drift = [](double a, double b) {
                return std::abs(a - b) / (0.5 * (a + b));
            };
            const double dh = drift(h1.fitted_C_head, h2.fitted_C_head);
            const double dt = drift(h1.fitted_C_tail, h2.fitted_C_tail);
            worst_drift = std::max({worst_drift, dh, dt});
            if (dh > 0.25 || dt > 0.25) out.pass = false;
        }
    }
    const double secs = elapsed_s(t0);
    if (secs >= 300.0) out.pass = false;
    out.detail = "worst half drift " + fmt(worst_drift) + ", " + fmt(secs) + "s";
    return out;
}

// ---------------------------------------------------------------------------
// 9. deviation process: increment ratios and sup-tail constant stability

Outcome criterion9() {
    Outcome out;
    out.pass = true;
    IncrementReport inc =
        increment_subgauss_check(DistModel::gaussian, 5, 100, 4.0, 50, 2000, 109);
    if (!(inc.max_ratio <= 3.0 * inc.median_ratio)) out.pass = false;

    const std::vector<double> u_grid = {1.0, 2.0, 3.0};
    SupTailReport a = sup_tail_check(DistModel::gaussian, DomainSpec::sphere(2), 4.0,
                                     100, u_grid, 5000, 109, 1024, 0);
    SupTailReport b = sup_tail_check(DistModel::gaussian, DomainSpec::sphere(2), 4.0,
                                     100, u_grid, 5000, 109, 1024, 5000);
    double worst_drift = 0.0;
    for (size_t i = 0; i < u_grid.size(); ++i) {
        const double drift = std::abs(a.fitted_C[i] - b.fitted_C[i]) /
                             (0.5 * (a.fitted_C[i] + b.fitted_C[i]));
        worst_drift = std::max(worst_drift, drift);
        if (drift > 0.30) out.pass = false;
    }
    out.detail = "increment max/median " + fmt(inc.max_ratio / inc.median_ratio) +
                 ", worst C drift " + fmt(worst_drift);
    return out;
}

// ---------------------------------------------------------------------------
// 10. symmetrization inequality across models and powers

Outcome criterion10() {
    Outcome out;
    out.pass = true;
    std::string parts;
    const DistModel models[] = {DistModel::gaussian, DistModel::rademacher,
                                DistModel::uniform_sphere_scaled};
    for (DistModel model : models) {
        for (double p : {2.0, 4.0}) {
            SymmetrizationReport rep = verify_symmetrization(
                model, SpectrumSpec::identity(2), DomainSpec::sphere(2), p, 50, 2000,
                110, 512, 500000);
            parts += " " + std::string(model_name(model)) + "/p=" + fmt(p) +
                     (rep.holds ? ":ok" : ":VIOLATED");
            if (!rep.holds) out.pass = false;
        }
    }
    out.detail = parts.substr(1);
    return out;
}

// ---------------------------------------------------------------------------
// 11. CLI determinism: identical config + seed gives byte-identical CSV

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Outcome criterion11() {
    Outcome out;
#ifndef TENSORLAB_CLI_PATH
    out.detail = "CLI path not wired in";
    return out;
#else
    const std::string cli = TENSORLAB_CLI_PATH;
    const std::string cfg_path = "/tmp/tensorlab_acc11.cfg";
    {
        std::ofstream cfg(cfg_path);
        cfg << "model = gaussian\nspectrum = flat_top\ndim = 4\np = 2\n"
               "N = 32\nN = 64\nN = 128\nN = 256\ntrials = 20\n"
               "master_seed = 7\noutput = /tmp/tensorlab_acc11_OUT\n";
    }
    auto run = [&](const std::string& tag) {
        const std::string cmd = cli + " simulate --config " + cfg_path +
                                " --seed 7 2>/dev/null >/dev/null";
        if (std::system(cmd.c_str()) != 0) return std::string();
        const std::string body = slurp("/tmp/tensorlab_acc11_OUT.csv");
        std::rename("/tmp/tensorlab_acc11_OUT.csv",
                    ("/tmp/tensorlab_acc11_" + tag + ".csv").c_str());
        return body;
    };
    const std::string a = run("a");
    const std::string b = run("b");

    const std::string lemma_cmd = cli +
                                  " verify-lemma --n 200 --t 3 --q 2 --trials 2000 "
                                  "--seed 5 --out /tmp/tensorlab_acc11_lemma";
    std::string la, lb;
    if (std::system((lemma_cmd + "_a.csv 2>/dev/null").c_str()) == 0)
        la = slurp("/tmp/tensorlab_acc11_lemma_a.csv");
    if (std::system((lemma_cmd + "_b.csv 2>/dev/null").c_str()) == 0)
        lb = slurp("/tmp/tensorlab_acc11_lemma_b.csv");

    out.pass = !a.empty() && a == b && !la.empty() && la == lb;
    out.detail = out.pass ? "simulate and verify-lemma reruns byte-identical"
                          : "outputs differ or a run failed";
    for (const char* f :
         {"/tmp/tensorlab_acc11.cfg", "/tmp/tensorlab_acc11_a.csv",
          "/tmp/tensorlab_acc11_b.csv", "/tmp/tensorlab_acc11_OUT.txt",
          "/tmp/tensorlab_acc11_lemma_a.csv", "/tmp/tensorlab_acc11_lemma_b.csv"})
        std::remove(f);
    return out;
#endif
}

struct Criterion {
    int id;
    const char* description;
    std::function<Outcome()> run;
};

const Criterion kCriteria[] = {
    {1, "ascent matches the exact eigen solution at p=2", criterion1},
    {2, "ascent matches a dense grid oracle for d in {2,3}, p in {2,3,4}", criterion2},
    {3, "analytic gradients match central finite differences", criterion3},
    {4, "closed-form even moments match a 10^6-draw Monte Carlo oracle", criterion4},
    {5, "Gaussian complexity sits between sqrt(2/pi) rad and sqrt(trace)", criterion5},
    {6, "large-N log-log error slopes are near -1/2", criterion6},
    {7, "error/bound ratio spread stays within 6x per curve", criterion7},
    {8, "order-statistics tail constants hold and are seed-half stable", criterion8},
    {9, "deviation increments are subgaussian and sup-tail fits are stable", criterion9},
    {10, "symmetrized sups dominate centered sups across models", criterion10},
    {11, "CLI reruns with identical config and seed are byte-identical", criterion11},
};

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::string(argv[i]) == "--criterion" && i + 1 < argc)
            only = std::atoi(argv[++i]);
    }
    int failures = 0;
    for (const Criterion& c : kCriteria) {
        if (only != 0 && c.id != only) continue;
        Outcome out = c.run();
        std::cout << (out.pass ? "[PASS] " : "[FAIL] ") << c.id << ": " << c.description
                  << " (" << out.detail << ")\n";
        std::cout.flush();
        if (!out.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
