#include "tensorlab/complexity.hpp"

#include <cmath>
#include <stdexcept>

#include "tensorlab/parallel.hpp"

namespace tensorlab {

double effective_rank(const SpectrumSpec& spectrum) {
    const auto lam = materialize_spectrum(spectrum);
    double tr = 0.0;
    for (double l : lam) tr += l;
    return tr / lam[0];
}

double ellipsoid_radius(const SpectrumSpec& spectrum) {
    return std::sqrt(materialize_spectrum(spectrum)[0]);
}

McEstimate gauss_complexity_mc(const DomainSpec& domain, long trials, std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("gauss_complexity_mc: trials >= 1");
    const Eigen::VectorXd s = domain.sqrt_scale();
    std::vector<double> vals(trials);
    parallel_for(trials, [&](long i) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i), "gauss-complexity"));
        double sum2 = 0.0;
        for (int j = 0; j < domain.dim; ++j) {
            const double g = rng.normal() * s[j];
            sum2 += g * g;
        }
        vals[i] = std::sqrt(sum2);  // sup_{v in T} |<g,v>| = ||S g||_2
    });
    KahanSum acc;
    for (double v : vals) acc.add(v);
    const double mean = acc.sum / static_cast<double>(trials);
    KahanSum var;
    for (double v : vals) var.add((v - mean) * (v - mean));
    McEstimate est;
    est.mean = mean;
    est.std_error = std::sqrt(var.sum / static_cast<double>(trials) /
                              static_cast<double>(trials));
    return est;
}

double lp_marginal_norm(DistModel model, const SpectrumSpec& spectrum,
                        const Eigen::VectorXd& v, double p, long mc_draws,
                        std::uint64_t seed) {
    if (p < 1.0) throw std::invalid_argument("lp_marginal_norm: p >= 1");
    const auto lam = materialize_spectrum(spectrum);
    const bool even_int = p == std::floor(p) && static_cast<long>(p) % 2 == 0;
    if (model == DistModel::gaussian && even_int) {
        double q = 0.0;
        for (long j = 0; j < v.size(); ++j) q += lam[j] * v[j] * v[j];
        const int ip = static_cast<int>(p);
        double dfact = 1.0;
        for (int k = ip - 1; k >= 2; k -= 2) dfact *= k;
        return std::pow(dfact, 1.0 / p) * std::sqrt(q);
    }
    SeedTrace trace{seed, 0, "lp-marginal"};
    const SampleBatch batch = sample_anisotropic(model, spectrum, mc_draws, trace);
    Eigen::ArrayXd t = (batch.rows * v).array().abs().pow(p);
    KahanSum acc;
    for (long i = 0; i < t.size(); ++i) acc.add(t[i]);
    return std::pow(acc.sum / static_cast<double>(mc_draws), 1.0 / p);
}

ComplexityProfile compute_profile(const SpectrumSpec& spectrum, long trials,
                                  std::uint64_t seed) {
    const auto lam = materialize_spectrum(spectrum);
    ComplexityProfile prof;
    prof.op_norm = lam[0];
    for (double l : lam) prof.trace += l;
    prof.eff_rank = prof.trace / prof.op_norm;
    prof.radius = std::sqrt(prof.op_norm);
    prof.gauss_complexity =
        gauss_complexity_mc(DomainSpec::ellipsoid(spectrum), trials, seed);
    return prof;
}

}  // namespace tensorlab
