#pragma once

#include <string>
#include <vector>

#include "tensorlab/complexity.hpp"
#include "tensorlab/sphere_norm.hpp"

namespace tensorlab {

struct ExperimentConfig {
    DistModel model = DistModel::gaussian;
    SpectrumSpec spectrum = SpectrumSpec::identity(2);
    MomentMode mode = MomentMode::signed_power;
    std::vector<double> p_list;
    std::vector<long> n_list;  // strictly increasing
    long trials_per_cell = 100;
    DomainKind t_kind = DomainKind::sphere;
    int restarts = 32;
    int max_iters = 2000;
    double tol = 1e-8;
    std::uint64_t master_seed = 1;
    std::string output_path = "report";
    long mc_oracle_draws = 1000000;
    double budget = 5e12;  // work-unit guard; cells above it are skipped
};

// Flat key = value text, '#' comments, repeated keys append to lists.
// Unknown keys are errors.
ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

struct CellResult {
    int d = 0;
    long n = 0;
    double p = 2.0;
    double mean_error = 0.0;
    double std_error = 0.0;
    double theory = 0.0;
    double ratio = 0.0;
    double max_restart_spread = 0.0;
    long failed_trials = 0;
    bool flagged = false;  // skipped for budget or >5% optimizer failures
    std::string model;
    std::string spectrum_id;
    std::uint64_t seed = 0;
};

struct RateFit {
    std::vector<CellResult> cells;
    double slope = 0.0;
    double slope_ci_halfwidth = 0.0;
    double ratio_spread = 0.0;  // max ratio / min ratio
    long cells_in_fit = 0;
};

// Mean over trials of sup_{v in T} |(1/N) sum <X_i,v>^p - E<X,v>^p|,
// exact eigen path when p = 2.
CellResult run_cell(const ExperimentConfig& cfg, long n, double p);

// Effective-rank envelope ||Sigma||^{p/2} (r^{p/2}/N + sqrt(r/N)),
// normalized to constant 1.
double theory_bound(const SpectrumSpec& spectrum, long n, double p);

// Complexity-based envelope (gamma^p + sqrt(N) gamma rad^{p-1}) / N.
double theory_bound_T(double gamma, double radius, long n, double p);

// OLS of ln(mean_error) on ln(N), restricted to cells with N >= r^{p-1}.
RateFit fit_rates(const std::vector<CellResult>& cells);

// CSV (path + ".csv") and structured-text summary (path + ".txt");
// byte-stable for identical input.
void emit_report(const RateFit& fit, const std::string& path);

// Runs the whole config grid. Returns 0, or 2 when any cell was flagged.
int run_experiment(const ExperimentConfig& cfg);

}  // namespace tensorlab
