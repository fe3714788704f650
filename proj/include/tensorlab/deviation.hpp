#pragma once

#include <Eigen/Dense>
#include <vector>

#include "tensorlab/complexity.hpp"
#include "tensorlab/sphere_opt.hpp"
#include "tensorlab/tensor_moments.hpp"

namespace tensorlab {

// The l^p matrix deviation process
//   Z_v = | ||Av||_p - N^{1/p} ||<Z, v>||_{L^p} |
// for A with i.i.d. isotropic subgaussian rows. Nonnegative, 1-homogeneous,
// Z_0 = 0.
class DeviationProcess {
public:
    DeviationProcess(SampleBatch batch, double p_dev, DistModel model,
                     long lp_mc_draws = 200000, std::uint64_t lp_seed = 7777);

    double eval(const Eigen::VectorXd& v) const;
    // ||<Z, v>||_{L^{p_dev}} for the isotropic model
    double marginal_lp(const Eigen::VectorXd& v) const;
    // marginal at every column (precomputable: independent of the batch)
    Eigen::VectorXd marginal_grid(const Eigen::MatrixXd& points) const;
    // Z at every column of points
    Eigen::VectorXd eval_grid(const Eigen::MatrixXd& points) const;
    // ||Av||_{p_dev} at every column
    Eigen::VectorXd lp_norms_grid(const Eigen::MatrixXd& points) const;

    double p_dev() const { return p_dev_; }
    const SampleBatch& batch() const { return batch_; }

private:
    SampleBatch batch_;
    double p_dev_;
    DistModel model_;
    bool closed_form_marginal_;
    Eigen::MatrixXd lp_draws_;  // cached only when no closed form
};

struct IncrementReport {
    double max_ratio = 0.0;
    double median_ratio = 0.0;
    int pairs_used = 0;
    std::vector<double> ratios;
};

// Empirical psi2 of Z_v - Z_u over resampled batches, divided by ||u - v||.
IncrementReport increment_subgauss_check(DistModel model, int d, long n,
                                         double p_dev, int pair_count,
                                         long resample_trials, std::uint64_t seed);

struct SupTailReport {
    std::vector<double> u_grid;
    std::vector<double> fitted_C;      // per u: quantile of sup / (gamma + u rad)
    std::vector<double> exceed_freq;   // per u, against fitted_C
    double gamma = 0.0;
    double gamma_se = 0.0;
    double radius = 0.0;
    long trials = 0;
    std::uint64_t seed = 0;
};

// Per trial resamples the batch, takes sup_{v in T} Z_v on an angular grid
// (d <= 3), and fits the smallest C with freq{sup > C (gamma + u rad)}
// <= 2 e^{-u^2} for each u.
SupTailReport sup_tail_check(DistModel model, const DomainSpec& domain, double p_dev,
                             long n, const std::vector<double>& u_grid, long trials,
                             std::uint64_t seed, int grid_resolution = 1024,
                             std::uint64_t trial_offset = 0);

struct SymmetrizationReport {
    double lhs_mean = 0.0;  // E sup |sum (<Z_i,v>^p - E<Z,v>^p)|
    double rhs_mean = 0.0;  // E sup |sum eps_i <Z_i,v>^p|
    double lhs_se = 0.0;
    double rhs_se = 0.0;
    long trials = 0;
    bool holds = false;  // lhs <= 2 rhs + 3 combined SE
};

SymmetrizationReport verify_symmetrization(DistModel model, const SpectrumSpec& spectrum,
                                           const DomainSpec& domain, double p, long n,
                                           long trials, std::uint64_t seed,
                                           int grid_resolution = 512,
                                           long mc_oracle_draws = 1000000);

}  // namespace tensorlab
