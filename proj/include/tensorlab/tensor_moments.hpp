#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <vector>

#include "tensorlab/distributions.hpp"

namespace tensorlab {

enum class MomentMode { signed_power, abs_power };

// Raised when the gradient of |x|^p with non-integer p is requested at an
// exact zero of some <X_i, v>; the caller perturbs v and retries.
struct NondifferentiablePoint : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Population moment E <X, v>^p. The Gaussian closed form is
// (p-1)!! (v' Sigma v)^{p/2} for even p and 0 for odd p; everything else is a
// frozen-seed Monte Carlo average over cached draws, so the oracle is a
// smooth deterministic function of v.
class PopulationOracle {
public:
    enum class Kind { gaussian_closed_form, mc_oracle };

    static PopulationOracle gaussian_closed_form(const SpectrumSpec& spectrum);
    static PopulationOracle mc(DistModel model, const SpectrumSpec& spectrum,
                               long draws, std::uint64_t oracle_seed);

    Kind kind() const { return kind_; }
    const SpectrumSpec& spectrum() const { return spectrum_; }
    const std::vector<double>& eigenvalues() const { return eigenvalues_; }

    double moment(const Eigen::VectorXd& v, double p, MomentMode mode) const;
    // E X X^T under the oracle (diag spectrum for the closed form, empirical
    // second moment of the cached draws for MC).
    Eigen::MatrixXd second_moment_matrix() const;
    // moment() at every column of points; chunked so the MC branch never
    // materializes a draws-by-points matrix.
    Eigen::VectorXd moment_grid(const Eigen::MatrixXd& points, double p,
                                MomentMode mode) const;
    // Standard error of the MC estimate (0 for the closed form).
    double moment_std_error(const Eigen::VectorXd& v, double p, MomentMode mode) const;
    Eigen::VectorXd gradient(const Eigen::VectorXd& v, double p, MomentMode mode) const;

private:
    Kind kind_ = Kind::gaussian_closed_form;
    DistModel model_ = DistModel::gaussian;
    SpectrumSpec spectrum_;
    std::vector<double> eigenvalues_;
    Eigen::MatrixXd draws_;  // M x d, mc_oracle only
};

// The centered empirical moment functional
//   F(v) = (1/N) sum_i g(<X_i, v>) - E g(<X, v>),  g = x^p or |x|^p.
// Immutable after construction; evaluation at different v is thread-safe.
struct MomentFunctional {
    SampleBatch batch;
    double p = 2.0;
    MomentMode mode = MomentMode::signed_power;
    PopulationOracle population;

    MomentFunctional(SampleBatch b, double p_, MomentMode mode_, PopulationOracle pop);

    int dim() const { return batch.dim(); }
};

double empirical_moment(const MomentFunctional& f, const Eigen::VectorXd& v);
// empirical moment at every column of points, evaluated in chunks
Eigen::VectorXd empirical_moment_grid(const MomentFunctional& f,
                                      const Eigen::MatrixXd& points);
double centered_value(const MomentFunctional& f, const Eigen::VectorXd& v);
Eigen::VectorXd centered_gradient(const MomentFunctional& f, const Eigen::VectorXd& v);

// Empirical gradient alone: (p/N) sum_i sgn-adjusted <X_i,v>^{p-1} X_i.
Eigen::VectorXd empirical_gradient(const MomentFunctional& f, const Eigen::VectorXd& v);

double double_factorial(int n);  // (n)!! with (-1)!! = 1

// Dense cross-check: the flat d^p moment tensor (1/N) sum X_i^{tensor p},
// row-major multi-index order. Only for d <= 6, p <= 4.
std::vector<double> dense_moment_tensor(const SampleBatch& batch, int p);
double dense_tensor_apply(const std::vector<double>& tensor, int d, int p,
                          const Eigen::VectorXd& v);
void dump_dense_tensor_csv(const std::vector<double>& tensor, int d, int p,
                           const std::string& path);

}  // namespace tensorlab
