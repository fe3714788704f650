#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "tensorlab/deviation.hpp"
#include "tensorlab/experiments.hpp"
#include "tensorlab/order_stats.hpp"

using namespace tensorlab;

namespace {

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

struct SpectrumArgs {
    std::string kind = "flat_top";
    int dim = 2;
    int r = 0;
    double alpha = 1.0;
    double beta = 1.0;
    std::vector<double> values;

    SpectrumSpec build() const {
        if (kind == "flat_top") return SpectrumSpec::flat(r > 0 ? r : dim, dim);
        if (kind == "poly_decay") return SpectrumSpec::poly(alpha, dim);
        if (kind == "exp_decay") return SpectrumSpec::expo(beta, dim);
        if (kind == "explicit") return SpectrumSpec::explicit_spec(values);
        throw CLI::ValidationError("--spectrum", "unknown spectrum kind " + kind);
    }

    void attach(CLI::App* app) {
        app->add_option("--spectrum", kind, "flat_top|poly_decay|exp_decay|explicit");
        app->add_option("--d,--dim", dim, "ambient dimension");
        app->add_option("--r", r, "flat_top plateau size (default d)");
        app->add_option("--alpha", alpha, "poly_decay rate");
        app->add_option("--beta", beta, "exp_decay rate");
        app->add_option("--value", values, "explicit eigenvalues (repeat)");
    }
};

int cmd_simulate(const std::string& config_path, std::uint64_t seed, bool seed_set) {
    ExperimentConfig cfg = parse_config(config_path);
    if (seed_set) cfg.master_seed = seed;
    return run_experiment(cfg);
}

int cmd_fit(const std::string& input, const std::string& out) {
    std::ifstream in(input);
    if (!in) throw std::runtime_error("cannot open " + input);
    std::string line;
    std::getline(in, line);  // header
    std::vector<CellResult> cells;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string field;
        CellResult c;
        auto next = [&] {
            if (!std::getline(row, field, ','))
                throw std::runtime_error("fit: malformed CSV row: " + line);
            return field;
        };
        c.d = std::stoi(next());
        c.n = std::stol(next());
        c.p = std::stod(next());
        c.model = next();
        c.spectrum_id = next();
        c.mean_error = std::stod(next());
        c.std_error = std::stod(next());
        c.theory = std::stod(next());
        c.ratio = std::stod(next());
        c.seed = std::stoull(next());
        cells.push_back(c);
    }
    RateFit fit = fit_rates(cells);
    emit_report(fit, out);
    std::cout << "slope_largeN: " << fmt(fit.slope) << " +- "
              << fmt(fit.slope_ci_halfwidth) << "\n";
    std::cout << "ratio_spread: " << fmt(fit.ratio_spread) << "\n";
    return 0;
}

int cmd_verify_lemma(const std::string& model_name_, long n, std::vector<double> ts,
                     std::vector<double> qs, long trials, std::uint64_t seed,
                     const std::string& out) {
    const DistModel model = model_from_name(model_name_);
    std::ofstream csv(out);
    if (!csv) throw std::runtime_error("cannot write " + out);
    csv << "n,t,q,k,trials,fitted_C_head,fitted_C_tail,exceed_head,exceed_tail,seed\n";
    for (double t : ts) {
        for (double q : qs) {
            TailReport rep = verify_lemma(model, n, t, q, trials, seed);
            csv << rep.n << ',' << fmt(rep.t) << ',' << fmt(rep.q) << ','
                << (std::isinf(rep.k) ? "inf" : fmt(rep.k)) << ',' << rep.trials << ','
                << fmt(rep.fitted_C_head) << ',' << fmt(rep.fitted_C_tail) << ','
                << fmt(rep.exceed_freq_head) << ',' << fmt(rep.exceed_freq_tail) << ','
                << rep.seed << '\n';
            std::cerr << "t=" << t << " q=" << q
                      << " C_head=" << fmt(rep.fitted_C_head)
                      << " (k-version " << fmt(rep.fitted_C_head_k) << ")"
                      << " C_tail=" << fmt(rep.fitted_C_tail) << "\n";
        }
    }
    return 0;
}

int cmd_verify_deviation(const std::string& model_name_, int d, long n, double p_dev,
                         int pairs, long resample_trials, long sup_trials,
                         std::vector<double> u_grid, int grid_resolution,
                         std::uint64_t seed, const std::string& out) {
    const DistModel model = model_from_name(model_name_);
    IncrementReport inc =
        increment_subgauss_check(model, d, n, p_dev, pairs, resample_trials, seed);
    {
        std::ofstream csv(out + "_increments.csv");
        if (!csv) throw std::runtime_error("cannot write " + out + "_increments.csv");
        csv << "pair,psi2_ratio,seed\n";
        for (size_t i = 0; i < inc.ratios.size(); ++i)
            csv << i << ',' << fmt(inc.ratios[i]) << ',' << seed << '\n';
    }
    std::cerr << "increment psi2 ratio: max=" << fmt(inc.max_ratio)
              << " median=" << fmt(inc.median_ratio) << "\n";
    if (d <= 3 && !u_grid.empty()) {
        SupTailReport st = sup_tail_check(model, DomainSpec::sphere(d), p_dev, n,
                                          u_grid, sup_trials, seed, grid_resolution);
        std::ofstream csv(out + "_suptail.csv");
        if (!csv) throw std::runtime_error("cannot write " + out + "_suptail.csv");
        csv << "u,fitted_C,exceed_freq,gamma,radius,trials,seed\n";
        for (size_t i = 0; i < st.u_grid.size(); ++i)
            csv << fmt(st.u_grid[i]) << ',' << fmt(st.fitted_C[i]) << ','
                << fmt(st.exceed_freq[i]) << ',' << fmt(st.gamma) << ','
                << fmt(st.radius) << ',' << st.trials << ',' << st.seed << '\n';
    }
    return 0;
}

int cmd_verify_symmetrization(const std::string& model_name_, const SpectrumArgs& spec,
                              double p, long n, long trials, int grid_resolution,
                              std::uint64_t seed, const std::string& out) {
    const DistModel model = model_from_name(model_name_);
    const SpectrumSpec spectrum = spec.build();
    SymmetrizationReport rep =
        verify_symmetrization(model, spectrum, DomainSpec::sphere(spectrum.dim), p, n,
                              trials, seed, grid_resolution);
    std::ofstream csv(out);
    if (!csv) throw std::runtime_error("cannot write " + out);
    csv << "model,d,p,N,trials,lhs_mean,lhs_se,rhs_mean,rhs_se,holds,seed\n";
    csv << model_name_ << ',' << spectrum.dim << ',' << fmt(p) << ',' << n << ','
        << trials << ',' << fmt(rep.lhs_mean) << ',' << fmt(rep.lhs_se) << ','
        << fmt(rep.rhs_mean) << ',' << fmt(rep.rhs_se) << ','
        << (rep.holds ? 1 : 0) << ',' << seed << '\n';
    std::cerr << "L=" << fmt(rep.lhs_mean) << " R=" << fmt(rep.rhs_mean)
              << " holds=" << (rep.holds ? "yes" : "no") << "\n";
    return rep.holds ? 0 : 2;
}

int cmd_complexity(const SpectrumArgs& spec, long trials, std::uint64_t seed) {
    ComplexityProfile prof = compute_profile(spec.build(), trials, seed);
    std::cout << "trace: " << fmt(prof.trace) << "\n";
    std::cout << "op_norm: " << fmt(prof.op_norm) << "\n";
    std::cout << "eff_rank: " << fmt(prof.eff_rank) << "\n";
    std::cout << "radius: " << fmt(prof.radius) << "\n";
    std::cout << "gauss_complexity: " << fmt(prof.gauss_complexity.mean) << " +- "
              << fmt(prof.gauss_complexity.std_error) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical lab for empirical moment tensor concentration"};
    app.require_subcommand(1);

    std::uint64_t seed = 1;

    // simulate
    auto* sim = app.add_subcommand("simulate", "run a Monte Carlo grid from a config");
    std::string config_path;
    sim->add_option("--config", config_path, "config file")->required();
    auto* sim_seed = sim->add_option("--seed", seed, "override config master_seed");

    // fit
    auto* fitc = app.add_subcommand("fit", "rate fit from a cells CSV");
    std::string fit_in, fit_out = "fit_report";
    fitc->add_option("--input", fit_in, "cells CSV")->required();
    fitc->add_option("--out", fit_out, "output path prefix");

    // verify-lemma
    auto* vl = app.add_subcommand("verify-lemma", "order statistics tail verifier");
    std::string vl_model = "gaussian", vl_out = "lemma.csv";
    long vl_n = 1000, vl_trials = 100000;
    std::vector<double> vl_t{3.0, 5.0, 8.0}, vl_q{2.0, 4.0};
    vl->add_option("--model", vl_model);
    vl->add_option("--n", vl_n);
    vl->add_option("--t", vl_t, "t values (repeat)");
    vl->add_option("--q", vl_q, "q values (repeat)");
    vl->add_option("--trials", vl_trials);
    vl->add_option("--seed", seed);
    vl->add_option("--out", vl_out);

    // verify-deviation
    auto* vd = app.add_subcommand("verify-deviation",
                                  "deviation process increments and sup tail");
    std::string vd_model = "gaussian", vd_out = "deviation";
    int vd_d = 5, vd_pairs = 50, vd_res = 1024;
    long vd_n = 100, vd_resample = 2000, vd_sup_trials = 10000;
    double vd_p = 4.0;
    std::vector<double> vd_u{1.0, 2.0, 3.0};
    vd->add_option("--model", vd_model);
    vd->add_option("--d", vd_d);
    vd->add_option("--N", vd_n);
    vd->add_option("--p-dev", vd_p);
    vd->add_option("--pairs", vd_pairs);
    vd->add_option("--resample-trials", vd_resample);
    vd->add_option("--sup-trials", vd_sup_trials);
    vd->add_option("--u", vd_u, "tail levels (repeat)");
    vd->add_option("--grid-resolution", vd_res);
    vd->add_option("--seed", seed);
    vd->add_option("--out", vd_out, "output path prefix");

    // verify-symmetrization
    auto* vs = app.add_subcommand("verify-symmetrization",
                                  "Rademacher symmetrization inequality check");
    std::string vs_model = "gaussian", vs_out = "symmetrization.csv";
    SpectrumArgs vs_spec;
    double vs_p = 2.0;
    long vs_n = 50, vs_trials = 2000;
    int vs_res = 512;
    vs->add_option("--model", vs_model);
    vs_spec.attach(vs);
    vs->add_option("--p", vs_p);
    vs->add_option("--N", vs_n);
    vs->add_option("--trials", vs_trials);
    vs->add_option("--grid-resolution", vs_res);
    vs->add_option("--seed", seed);
    vs->add_option("--out", vs_out);

    // complexity
    auto* cx = app.add_subcommand("complexity", "complexity profile of a spectrum");
    SpectrumArgs cx_spec;
    long cx_trials = 100000;
    cx_spec.attach(cx);
    cx->add_option("--trials", cx_trials);
    cx->add_option("--seed", seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (sim->parsed()) return cmd_simulate(config_path, seed, sim_seed->count() > 0);
        if (fitc->parsed()) return cmd_fit(fit_in, fit_out);
        if (vl->parsed())
            return cmd_verify_lemma(vl_model, vl_n, vl_t, vl_q, vl_trials, seed, vl_out);
        if (vd->parsed())
            return cmd_verify_deviation(vd_model, vd_d, vd_n, vd_p, vd_pairs,
                                        vd_resample, vd_sup_trials, vd_u, vd_res, seed,
                                        vd_out);
        if (vs->parsed())
            return cmd_verify_symmetrization(vs_model, vs_spec, vs_p, vs_n, vs_trials,
                                             vs_res, seed, vs_out);
        if (cx->parsed()) return cmd_complexity(cx_spec, cx_trials, seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
