#include "tensorlab/tensor_moments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "tensorlab/parallel.hpp"

namespace tensorlab {

namespace {

bool is_integer(double p) { return p == std::floor(p); }

// g(t) elementwise: t^p (sign kept, integer p) or |t|^p.
Eigen::ArrayXd apply_power(const Eigen::ArrayXd& t, double p, MomentMode mode) {
    const int ip = static_cast<int>(p);
    if (is_integer(p) && ip <= 8) {
        // repeated multiplication: exact for small integer powers
        Eigen::ArrayXd y = Eigen::ArrayXd::Ones(t.size());
        for (int k = 0; k < ip; ++k) y *= t;
        if (mode == MomentMode::abs_power && (ip % 2 != 0)) return y.abs();
        return y;
    }
    if (mode == MomentMode::signed_power)
        return t.unaryExpr([p](double x) { return std::pow(x, p); });
    return t.abs().pow(p);
}

// g'(t)/p elementwise; throws if |x|^p is non-smooth at an exact zero.
Eigen::ArrayXd apply_power_deriv(const Eigen::ArrayXd& t, double p, MomentMode mode) {
    if (mode == MomentMode::abs_power && !is_integer(p)) {
        for (long i = 0; i < t.size(); ++i)
            if (t[i] == 0.0)
                throw NondifferentiablePoint("abs_power gradient at exact zero projection");
    }
    const double q = p - 1.0;
    const int iq = static_cast<int>(q);
    if (is_integer(q) && iq <= 8 && iq >= 0) {
        Eigen::ArrayXd y = Eigen::ArrayXd::Ones(t.size());
        for (int k = 0; k < iq; ++k) y *= t;
        if (mode == MomentMode::abs_power && (iq % 2 == 0))
            return y.abs() * t.sign();  // sgn(x) |x|^{p-1}
        return y;
    }
    Eigen::ArrayXd y = t.abs().pow(q);
    return y * t.sign();
}

double kahan_mean(const Eigen::ArrayXd& y) {
    KahanSum acc;
    for (long i = 0; i < y.size(); ++i) acc.add(y[i]);
    return acc.sum / static_cast<double>(y.size());
}

}  // namespace

double double_factorial(int n) {
    double r = 1.0;
    for (int k = n; k >= 2; k -= 2) r *= k;
    return r;
}

PopulationOracle PopulationOracle::gaussian_closed_form(const SpectrumSpec& spectrum) {
    PopulationOracle o;
    o.kind_ = Kind::gaussian_closed_form;
    o.model_ = DistModel::gaussian;
    o.spectrum_ = spectrum;
    o.eigenvalues_ = materialize_spectrum(spectrum);
    return o;
}

PopulationOracle PopulationOracle::mc(DistModel model, const SpectrumSpec& spectrum,
                                      long draws, std::uint64_t oracle_seed) {
    PopulationOracle o;
    o.kind_ = Kind::mc_oracle;
    o.model_ = model;
    o.spectrum_ = spectrum;
    o.eigenvalues_ = materialize_spectrum(spectrum);
    SeedTrace trace{oracle_seed, 0, "population-oracle"};
    o.draws_ = sample_anisotropic(model, spectrum, draws, trace).rows;
    return o;
}

double PopulationOracle::moment(const Eigen::VectorXd& v, double p, MomentMode mode) const {
    if (kind_ == Kind::gaussian_closed_form) {
        if (mode != MomentMode::signed_power || !is_integer(p))
            throw std::invalid_argument("gaussian closed form needs signed integer p");
        const int ip = static_cast<int>(p);
        if (ip % 2 != 0) return 0.0;  // symmetry
        double q = 0.0;
        for (int j = 0; j < v.size(); ++j) q += eigenvalues_[j] * v[j] * v[j];
        return double_factorial(ip - 1) * std::pow(q, p / 2.0);
    }
    Eigen::ArrayXd t = (draws_ * v).array();
    return kahan_mean(apply_power(t, p, mode));
}

Eigen::MatrixXd PopulationOracle::second_moment_matrix() const {
    const int d = static_cast<int>(eigenvalues_.size());
    if (kind_ == Kind::gaussian_closed_form) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
        for (int j = 0; j < d; ++j) m(j, j) = eigenvalues_[j];
        return m;
    }
    return (draws_.transpose() * draws_) / static_cast<double>(draws_.rows());
}

double PopulationOracle::moment_std_error(const Eigen::VectorXd& v, double p,
                                          MomentMode mode) const {
    if (kind_ == Kind::gaussian_closed_form) return 0.0;
    Eigen::ArrayXd y = apply_power((draws_ * v).array(), p, mode);
    const double m = kahan_mean(y);
    const double var = kahan_mean((y - m).square());
    return std::sqrt(var / static_cast<double>(y.size()));
}

Eigen::VectorXd PopulationOracle::gradient(const Eigen::VectorXd& v, double p,
                                           MomentMode mode) const {
    if (kind_ == Kind::gaussian_closed_form) {
        if (mode != MomentMode::signed_power || !is_integer(p))
            throw std::invalid_argument("gaussian closed form needs signed integer p");
        const int ip = static_cast<int>(p);
        if (ip % 2 != 0) return Eigen::VectorXd::Zero(v.size());
        double q = 0.0;
        for (int j = 0; j < v.size(); ++j) q += eigenvalues_[j] * v[j] * v[j];
        Eigen::VectorXd sv(v.size());
        for (int j = 0; j < v.size(); ++j) sv[j] = eigenvalues_[j] * v[j];
        return p * double_factorial(ip - 1) * std::pow(q, p / 2.0 - 1.0) * sv;
    }
    Eigen::ArrayXd w = apply_power_deriv((draws_ * v).array(), p, mode);
    return (p / static_cast<double>(draws_.rows())) * (draws_.transpose() * w.matrix());
}

Eigen::VectorXd PopulationOracle::moment_grid(const Eigen::MatrixXd& points, double p,
                                              MomentMode mode) const {
    const long cols = points.cols();
    Eigen::VectorXd out(cols);
    if (kind_ == Kind::gaussian_closed_form) {
        for (long c = 0; c < cols; ++c) out[c] = moment(points.col(c), p, mode);
        return out;
    }
    const long chunk = 8;
    const double inv_m = 1.0 / static_cast<double>(draws_.rows());
    for (long c0 = 0; c0 < cols; c0 += chunk) {
        const long w = std::min(chunk, cols - c0);
        Eigen::MatrixXd t = draws_ * points.middleCols(c0, w);
        for (long j = 0; j < w; ++j) {
            Eigen::ArrayXd y = apply_power(t.col(j).array(), p, mode);
            KahanSum acc;
            for (long i = 0; i < y.size(); ++i) acc.add(y[i]);
            out[c0 + j] = acc.sum * inv_m;
        }
    }
    return out;
}

MomentFunctional::MomentFunctional(SampleBatch b, double p_, MomentMode mode_,
                                   PopulationOracle pop)
    : batch(std::move(b)), p(p_), mode(mode_), population(std::move(pop)) {
    if (p < 2.0) throw std::invalid_argument("moment functional needs p >= 2");
    if (mode == MomentMode::signed_power && !is_integer(p))
        throw std::invalid_argument("signed_power needs integer p");
}

double empirical_moment(const MomentFunctional& f, const Eigen::VectorXd& v) {
    if (v.size() != f.dim()) throw std::invalid_argument("empirical_moment: dim mismatch");
    Eigen::ArrayXd t = (f.batch.rows * v).array();
    return kahan_mean(apply_power(t, f.p, f.mode));
}

Eigen::VectorXd empirical_moment_grid(const MomentFunctional& f,
                                      const Eigen::MatrixXd& points) {
    const long cols = points.cols();
    Eigen::VectorXd out(cols);
    const long chunk = 1024;
    const double inv_n = 1.0 / static_cast<double>(f.batch.n());
    for (long c0 = 0; c0 < cols; c0 += chunk) {
        const long w = std::min(chunk, cols - c0);
        Eigen::MatrixXd t = f.batch.rows * points.middleCols(c0, w);
        for (long j = 0; j < w; ++j) {
            Eigen::ArrayXd y = apply_power(t.col(j).array(), f.p, f.mode);
            KahanSum acc;
            for (long i = 0; i < y.size(); ++i) acc.add(y[i]);
            out[c0 + j] = acc.sum * inv_n;
        }
    }
    return out;
}

double centered_value(const MomentFunctional& f, const Eigen::VectorXd& v) {
    return empirical_moment(f, v) - f.population.moment(v, f.p, f.mode);
}

Eigen::VectorXd empirical_gradient(const MomentFunctional& f, const Eigen::VectorXd& v) {
    if (v.size() != f.dim()) throw std::invalid_argument("empirical_gradient: dim mismatch");
    Eigen::ArrayXd w = apply_power_deriv((f.batch.rows * v).array(), f.p, f.mode);
    return (f.p / static_cast<double>(f.batch.n())) *
           (f.batch.rows.transpose() * w.matrix());
}

Eigen::VectorXd centered_gradient(const MomentFunctional& f, const Eigen::VectorXd& v) {
    return empirical_gradient(f, v) - f.population.gradient(v, f.p, f.mode);
}

std::vector<double> dense_moment_tensor(const SampleBatch& batch, int p) {
    const int d = batch.dim();
    if (d > 6 || p > 4 || p < 1)
        throw std::invalid_argument("dense tensor limited to d <= 6, p <= 4");
    long size = 1;
    for (int k = 0; k < p; ++k) size *= d;
    std::vector<double> tensor(size, 0.0);
    const double inv_n = 1.0 / static_cast<double>(batch.n());
    std::vector<int> idx(p, 0);
    for (long flat = 0; flat < size; ++flat) {
        long rem = flat;
        for (int k = p - 1; k >= 0; --k) {
            idx[k] = static_cast<int>(rem % d);
            rem /= d;
        }
        KahanSum acc;
        for (long i = 0; i < batch.n(); ++i) {
            double prod = 1.0;
            for (int k = 0; k < p; ++k) prod *= batch.rows(i, idx[k]);
            acc.add(prod);
        }
        tensor[flat] = acc.sum * inv_n;
    }
    return tensor;
}

double dense_tensor_apply(const std::vector<double>& tensor, int d, int p,
                          const Eigen::VectorXd& v) {
    long size = static_cast<long>(tensor.size());
    KahanSum acc;
    std::vector<int> idx(p, 0);
    for (long flat = 0; flat < size; ++flat) {
        long rem = flat;
        double prod = tensor[flat];
        for (int k = p - 1; k >= 0; --k) {
            prod *= v[rem % d];
            rem /= d;
        }
        acc.add(prod);
    }
    (void)idx;
    return acc.sum;
}

void dump_dense_tensor_csv(const std::vector<double>& tensor, int d, int p,
                           const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "flat_index,value\n";
    char buf[64];
    for (size_t i = 0; i < tensor.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", tensor[i]);
        out << i << ',' << buf << '\n';
    }
    (void)d;
    (void)p;
}

}  // namespace tensorlab
