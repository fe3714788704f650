#pragma once

#include "tensorlab/sphere_opt.hpp"
#include "tensorlab/tensor_moments.hpp"

namespace tensorlab {

enum class SupMethod { exact_eig, ascent, grid };

struct SupResult {
    double value = 0.0;        // sup_{v in T} |F(v)|
    Eigen::VectorXd argmax;    // on T, canonical half-space for even p
    int restarts_used = 0;
    double best_restart_spread = 0.0;
    SupMethod method = SupMethod::ascent;
    bool converged = true;
    double grid_error_bound = 0.0;  // grid method only
};

// p = 2 exact path: largest-magnitude eigenvalue of the centered second
// moment matrix (conjugated by Sigma^{1/2} for ellipsoid T).
SupResult sup_exact_p2(const MomentFunctional& f, const DomainSpec& domain);

// Multi-start projected gradient ascent on |F|, both signs ascended
// separately, warm-started from the p = 2 eigenvector.
SupResult sup_ascent(const MomentFunctional& f, const DomainSpec& domain,
                     const AscentOptions& opts);

// Brute-force oracle for d in {2,3}; grid_error_bound is a Lipschitz bound
// on the distance to the true sup.
SupResult sup_grid(const MomentFunctional& f, const DomainSpec& domain, int resolution);

// Flip sign so the first nonzero coordinate is positive (even-p canonical
// representative).
void canonicalize_sign(Eigen::VectorXd& v);

}  // namespace tensorlab
