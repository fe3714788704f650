#pragma once

#include <Eigen/Dense>

#include "tensorlab/distributions.hpp"
#include "tensorlab/sphere_opt.hpp"

namespace tensorlab {

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
};

struct ComplexityProfile {
    double eff_rank = 0.0;
    double radius = 0.0;
    McEstimate gauss_complexity;
    double trace = 0.0;
    double op_norm = 0.0;
};

// tr(Sigma) / ||Sigma||
double effective_rank(const SpectrumSpec& spectrum);

// rad(Sigma^{1/2} S^{d-1}) = sqrt(lambda_1)
double ellipsoid_radius(const SpectrumSpec& spectrum);

// Gaussian complexity E sup_{v in T} |<g, v>|. Each trial is exact:
// sup over the ellipsoid Sigma^{1/2} S^{d-1} equals ||Sigma^{1/2} g||_2.
McEstimate gauss_complexity_mc(const DomainSpec& domain, long trials, std::uint64_t seed);

// ||<X, v>||_{L^p}. Gaussian with even integer p is closed form
// ((p-1)!!)^{1/p} (v' Sigma v)^{1/2}; everything else frozen-seed MC.
double lp_marginal_norm(DistModel model, const SpectrumSpec& spectrum,
                        const Eigen::VectorXd& v, double p, long mc_draws,
                        std::uint64_t seed);

ComplexityProfile compute_profile(const SpectrumSpec& spectrum, long trials,
                                  std::uint64_t seed);

}  // namespace tensorlab
