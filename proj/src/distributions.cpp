#include "tensorlab/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace tensorlab {

SpectrumSpec SpectrumSpec::flat(int r, int dim) {
    SpectrumSpec s;
    s.kind = SpectrumKind::flat_top;
    s.r = r;
    s.dim = dim;
    return s;
}

SpectrumSpec SpectrumSpec::poly(double alpha, int dim) {
    SpectrumSpec s;
    s.kind = SpectrumKind::poly_decay;
    s.alpha = alpha;
    s.dim = dim;
    return s;
}

SpectrumSpec SpectrumSpec::expo(double beta, int dim) {
    SpectrumSpec s;
    s.kind = SpectrumKind::exp_decay;
    s.beta = beta;
    s.dim = dim;
    return s;
}

SpectrumSpec SpectrumSpec::explicit_spec(std::vector<double> values) {
    SpectrumSpec s;
    s.kind = SpectrumKind::explicit_values;
    s.dim = static_cast<int>(values.size());
    s.values = std::move(values);
    return s;
}

std::string SpectrumSpec::id() const {
    std::ostringstream os;
    switch (kind) {
        case SpectrumKind::flat_top: os << "flat_top(r=" << r << ",d=" << dim << ")"; break;
        case SpectrumKind::poly_decay: os << "poly_decay(alpha=" << alpha << ",d=" << dim << ")"; break;
        case SpectrumKind::exp_decay: os << "exp_decay(beta=" << beta << ",d=" << dim << ")"; break;
        case SpectrumKind::explicit_values: os << "explicit(d=" << dim << ")"; break;
    }
    return os.str();
}

std::vector<double> materialize_spectrum(const SpectrumSpec& spec) {
    if (spec.dim < 1) throw std::invalid_argument("spectrum: dim must be >= 1");
    std::vector<double> lam(spec.dim, 0.0);
    switch (spec.kind) {
        case SpectrumKind::flat_top:
            if (spec.r < 1 || spec.r > spec.dim)
                throw std::invalid_argument("flat_top: need 1 <= r <= dim");
            std::fill(lam.begin(), lam.begin() + spec.r, 1.0);
            break;
        case SpectrumKind::poly_decay:
            if (spec.alpha <= 0.0)
                throw std::invalid_argument("poly_decay: alpha must be > 0");
            for (int i = 0; i < spec.dim; ++i)
                lam[i] = std::pow(static_cast<double>(i + 1), -spec.alpha);
            break;
        case SpectrumKind::exp_decay:
            if (spec.beta <= 0.0)
                throw std::invalid_argument("exp_decay: beta must be > 0");
            for (int i = 0; i < spec.dim; ++i)
                lam[i] = std::exp(-spec.beta * i);
            break;
        case SpectrumKind::explicit_values:
            if (spec.values.size() != static_cast<size_t>(spec.dim))
                throw std::invalid_argument("explicit spectrum: length mismatch");
            for (double v : spec.values)
                if (v < 0.0) throw std::invalid_argument("explicit spectrum: negative eigenvalue");
            lam = spec.values;
            std::sort(lam.begin(), lam.end(), std::greater<>());
            break;
    }
    if (lam[0] <= 0.0) throw std::invalid_argument("spectrum: leading eigenvalue must be > 0");
    return lam;
}

const char* model_name(DistModel m) {
    switch (m) {
        case DistModel::gaussian: return "gaussian";
        case DistModel::rademacher: return "rademacher";
        case DistModel::uniform_sphere_scaled: return "uniform_sphere_scaled";
    }
    return "?";
}

DistModel model_from_name(const std::string& name) {
    if (name == "gaussian") return DistModel::gaussian;
    if (name == "rademacher") return DistModel::rademacher;
    if (name == "uniform_sphere_scaled" || name == "sphere") return DistModel::uniform_sphere_scaled;
    throw std::invalid_argument("unknown model: " + name);
}

SampleBatch sample_isotropic(DistModel model, int d, long n, const SeedTrace& trace) {
    if (d < 1 || n < 1) throw std::invalid_argument("sample_isotropic: need d >= 1, n >= 1");
    SampleBatch batch;
    batch.rows.resize(n, d);
    batch.seed_trace = trace;
    Rng rng(trace);
    const double sqrt_d = std::sqrt(static_cast<double>(d));
    for (long i = 0; i < n; ++i) {
        switch (model) {
            case DistModel::gaussian:
                for (int j = 0; j < d; ++j) batch.rows(i, j) = rng.normal();
                break;
            case DistModel::rademacher:
                for (int j = 0; j < d; ++j) batch.rows(i, j) = rng.rademacher();
                break;
            case DistModel::uniform_sphere_scaled: {
                double norm2 = 0.0;
                do {
                    for (int j = 0; j < d; ++j) {
                        const double g = rng.normal();
                        batch.rows(i, j) = g;
                        norm2 += g * g;
                    }
                } while (norm2 == 0.0);
                batch.rows.row(i) *= sqrt_d / std::sqrt(norm2);
                break;
            }
        }
    }
    return batch;
}

SampleBatch sample_anisotropic(DistModel model, const SpectrumSpec& spectrum,
                               long n, const SeedTrace& trace) {
    const auto lam = materialize_spectrum(spectrum);
    SampleBatch batch = sample_isotropic(model, spectrum.dim, n, trace);
    for (int j = 0; j < spectrum.dim; ++j)
        batch.rows.col(j) *= std::sqrt(lam[j]);
    return batch;
}

void apply_rotation(SampleBatch& batch, const Eigen::MatrixXd& q) {
    if (q.rows() != batch.dim() || q.cols() != batch.dim())
        throw std::invalid_argument("apply_rotation: shape mismatch");
    batch.rows = batch.rows * q.transpose();
}

double estimate_psi2(std::span<const double> samples, double rel_tol) {
    if (samples.size() < 1) throw std::invalid_argument("estimate_psi2: empty input");
    const double n = static_cast<double>(samples.size());
    double max_abs = 0.0;
    for (double z : samples) max_abs = std::max(max_abs, std::abs(z));
    if (max_abs == 0.0) return 0.0;

    auto mgf = [&](double t) {
        const double inv_t2 = 1.0 / (t * t);
        double sum = 0.0, comp = 0.0;
        for (double z : samples) {
            // clamp the exponent so infeasibly small t just reads as "huge"
            const double e = std::exp(std::min(z * z * inv_t2, 700.0));
            const double y = e - comp;
            const double s = sum + y;
            comp = (s - sum) - y;
            sum = s;
        }
        return sum / n;
    };

    // The empirical constraint is infeasible below max|z|/sqrt(ln(2n)).
    double lo = max_abs / std::sqrt(std::log(2.0 * n));
    double hi = max_abs * 10.0;
    while (mgf(hi) > 2.0) hi *= 2.0;  // pathological inputs only
    // mgf is decreasing in t; bisect for mgf(t) = 2.
    while (hi - lo > rel_tol * hi) {
        const double mid = 0.5 * (lo + hi);
        if (mgf(mid) > 2.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace tensorlab
