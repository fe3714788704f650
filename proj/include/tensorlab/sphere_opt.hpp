#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "tensorlab/distributions.hpp"

namespace tensorlab {

enum class DomainKind { sphere, ellipsoid };

// The index set T of the supremum: the unit sphere S^{d-1} or the ellipsoid
// Sigma^{1/2} S^{d-1}. The ellipsoid is parameterized by pullback, v =
// Sigma^{1/2} u with u on the sphere.
struct DomainSpec {
    DomainKind kind = DomainKind::sphere;
    int dim = 1;
    std::vector<double> eigenvalues;  // ellipsoid only

    static DomainSpec sphere(int d);
    static DomainSpec ellipsoid(const SpectrumSpec& spectrum);

    // sqrt of eigenvalues as a vector (ones for the sphere)
    Eigen::VectorXd sqrt_scale() const;
    double radius() const;  // sup of Euclidean norms over T
};

// Objective seam: value and gradient as functions of the ambient point v.
struct SphereObjective {
    std::function<double(const Eigen::VectorXd&)> value;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
};

struct AscentOptions {
    int restarts = 32;
    int max_iters = 2000;
    double tol = 1e-8;        // on the projected gradient norm
    std::uint64_t seed = 1;
    std::vector<Eigen::VectorXd> warm_starts;  // extra start points (u-space)
};

struct AscentResult {
    double value = 0.0;           // best objective value found
    Eigen::VectorXd arg;          // maximizer, mapped to T
    int restarts_used = 0;
    double restart_spread = 0.0;  // max - min over per-restart optima
    bool converged = false;       // at least the best restart converged
    int failed_restarts = 0;
};

// Multi-start projected gradient ascent of obj over T, Armijo backtracking
// from unit step. Deterministic given options.seed.
AscentResult maximize_on_sphere(const SphereObjective& obj, const DomainSpec& domain,
                                const AscentOptions& opts);

// Unit directions for brute-force grids: d=2 gives `resolution` angles
// uniform in [0, pi); d=3 a Fibonacci sphere with `resolution` points.
// Columns are unit vectors.
Eigen::MatrixXd grid_directions(int d, int resolution);

}  // namespace tensorlab
