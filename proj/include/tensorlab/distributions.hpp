#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "tensorlab/rng.hpp"

namespace tensorlab {

enum class SpectrumKind { flat_top, poly_decay, exp_decay, explicit_values };

// Eigenvalue profile of the covariance matrix. Sigma is kept diagonal; every
// quantity we compute is invariant under orthogonal conjugation, so the
// spectrum carries all the information.
struct SpectrumSpec {
    SpectrumKind kind = SpectrumKind::flat_top;
    int dim = 1;
    int r = 1;               // flat_top
    double alpha = 1.0;      // poly_decay: lambda_i = i^{-alpha}
    double beta = 1.0;       // exp_decay: lambda_i = exp(-beta (i-1))
    std::vector<double> values;  // explicit_values

    static SpectrumSpec flat(int r, int dim);
    static SpectrumSpec poly(double alpha, int dim);
    static SpectrumSpec expo(double beta, int dim);
    static SpectrumSpec explicit_spec(std::vector<double> values);
    static SpectrumSpec identity(int dim) { return flat(dim, dim); }

    std::string id() const;  // short label for reports
};

// Nonincreasing eigenvalue list of length dim. Throws std::invalid_argument
// on bad parameters (dim < 1, r > dim, nonpositive decay rate, ...).
std::vector<double> materialize_spectrum(const SpectrumSpec& spec);

// Mean-zero isotropic subgaussian models. uniform_sphere_scaled is the
// uniform law on sqrt(d) * S^{d-1}.
enum class DistModel { gaussian, rademacher, uniform_sphere_scaled };

const char* model_name(DistModel m);
DistModel model_from_name(const std::string& name);

struct SampleBatch {
    Eigen::MatrixXd rows;  // N x d
    SeedTrace seed_trace;

    long n() const { return rows.rows(); }
    int dim() const { return static_cast<int>(rows.cols()); }
};

// N i.i.d. rows of the isotropic model; bit-reproducible from seed_trace.
SampleBatch sample_isotropic(DistModel model, int d, long n, const SeedTrace& trace);

// Rows are diag(sqrt(lambda)) * Z_i with Z_i from sample_isotropic under the
// same seed_trace.
SampleBatch sample_anisotropic(DistModel model, const SpectrumSpec& spectrum,
                               long n, const SeedTrace& trace);

// Rotation hook for regression tests: rows become rows * Q^T.
void apply_rotation(SampleBatch& batch, const Eigen::MatrixXd& q);

// Empirical psi_2 norm: the t solving (1/n) sum exp(z_i^2/t^2) = 2, found by
// bisection on [max|z|/sqrt(ln(2n)), 10 max|z|]. All-zero input returns 0.
double estimate_psi2(std::span<const double> samples, double rel_tol = 1e-6);

}  // namespace tensorlab
