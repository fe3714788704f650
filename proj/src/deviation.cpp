#include "tensorlab/deviation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tensorlab/parallel.hpp"

namespace tensorlab {

namespace {

bool has_closed_form(DistModel model, double p) {
    return model == DistModel::gaussian && p == std::floor(p) &&
           static_cast<long>(p) % 2 == 0;
}

Eigen::VectorXd col_lp_norms(const Eigen::MatrixXd& m, double p) {
    Eigen::VectorXd out(m.cols());
    for (long c = 0; c < m.cols(); ++c) {
        KahanSum acc;
        for (long i = 0; i < m.rows(); ++i)
            acc.add(std::pow(std::abs(m(i, c)), p));
        out[c] = std::pow(acc.sum, 1.0 / p);
    }
    return out;
}

}  // namespace

DeviationProcess::DeviationProcess(SampleBatch batch, double p_dev, DistModel model,
                                   long lp_mc_draws, std::uint64_t lp_seed)
    : batch_(std::move(batch)),
      p_dev_(p_dev),
      model_(model),
      closed_form_marginal_(has_closed_form(model, p_dev)) {
    if (p_dev < 2.0) throw std::invalid_argument("deviation process needs p >= 2");
    if (!closed_form_marginal_) {
        SeedTrace trace{lp_seed, 0, "deviation-lp-marginal"};
        lp_draws_ = sample_isotropic(model_, batch_.dim(), lp_mc_draws, trace).rows;
    }
}

double DeviationProcess::marginal_lp(const Eigen::VectorXd& v) const {
    if (closed_form_marginal_) {
        const int ip = static_cast<int>(p_dev_);
        return std::pow(double_factorial(ip - 1), 1.0 / p_dev_) * v.norm();
    }
    Eigen::ArrayXd t = (lp_draws_ * v).array().abs().pow(p_dev_);
    KahanSum acc;
    for (long i = 0; i < t.size(); ++i) acc.add(t[i]);
    return std::pow(acc.sum / static_cast<double>(lp_draws_.rows()), 1.0 / p_dev_);
}

Eigen::VectorXd DeviationProcess::marginal_grid(const Eigen::MatrixXd& points) const {
    Eigen::VectorXd out(points.cols());
    if (closed_form_marginal_) {
        const int ip = static_cast<int>(p_dev_);
        const double c = std::pow(double_factorial(ip - 1), 1.0 / p_dev_);
        for (long j = 0; j < points.cols(); ++j) out[j] = c * points.col(j).norm();
        return out;
    }
    const long chunk = 8;
    for (long c0 = 0; c0 < points.cols(); c0 += chunk) {
        const long w = std::min(chunk, points.cols() - c0);
        Eigen::MatrixXd t = lp_draws_ * points.middleCols(c0, w);
        for (long j = 0; j < w; ++j) {
            KahanSum acc;
            for (long i = 0; i < t.rows(); ++i)
                acc.add(std::pow(std::abs(t(i, j)), p_dev_));
            out[c0 + j] =
                std::pow(acc.sum / static_cast<double>(t.rows()), 1.0 / p_dev_);
        }
    }
    return out;
}

Eigen::VectorXd DeviationProcess::lp_norms_grid(const Eigen::MatrixXd& points) const {
    return col_lp_norms(batch_.rows * points, p_dev_);
}

double DeviationProcess::eval(const Eigen::VectorXd& v) const {
    if (v.size() != batch_.dim()) throw std::invalid_argument("eval_Z: dim mismatch");
    Eigen::ArrayXd t = (batch_.rows * v).array().abs().pow(p_dev_);
    KahanSum acc;
    for (long i = 0; i < t.size(); ++i) acc.add(t[i]);
    const double av_norm = std::pow(acc.sum, 1.0 / p_dev_);
    const double pop = std::pow(static_cast<double>(batch_.n()), 1.0 / p_dev_) *
                       marginal_lp(v);
    return std::abs(av_norm - pop);
}

Eigen::VectorXd DeviationProcess::eval_grid(const Eigen::MatrixXd& points) const {
    const Eigen::VectorXd norms = lp_norms_grid(points);
    const Eigen::VectorXd marg = marginal_grid(points);
    const double scale = std::pow(static_cast<double>(batch_.n()), 1.0 / p_dev_);
    return (norms - scale * marg).cwiseAbs();
}

IncrementReport increment_subgauss_check(DistModel model, int d, long n,
                                         double p_dev, int pair_count,
                                         long resample_trials, std::uint64_t seed) {
    if (pair_count < 1 || resample_trials < 100)
        throw std::invalid_argument("increment check: too few pairs or trials");

    // pairs stacked as columns [u_0 v_0 u_1 v_1 ...]
    Eigen::MatrixXd pts(d, 2 * pair_count);
    {
        Rng rng(derive_seed(seed, 0, "increment-pairs"));
        for (int c = 0; c < 2 * pair_count; ++c)
            for (int j = 0; j < d; ++j) pts(j, c) = rng.normal();
    }

    // marginal term is batch-independent
    Eigen::VectorXd marg;
    {
        SampleBatch dummy = sample_isotropic(model, d, 1, SeedTrace{seed, 0, "inc-m"});
        DeviationProcess proc(std::move(dummy), p_dev, model);
        marg = proc.marginal_grid(pts);
    }
    const double scale = std::pow(static_cast<double>(n), 1.0 / p_dev);

    std::vector<std::vector<double>> increments(
        pair_count, std::vector<double>(resample_trials));
    parallel_for(resample_trials, [&](long trial) {
        SampleBatch batch = sample_isotropic(
            model, d, n, SeedTrace{seed, static_cast<std::uint64_t>(trial),
                                   "increment-batch"});
        Eigen::VectorXd norms = col_lp_norms(batch.rows * pts, p_dev);
        for (int pr = 0; pr < pair_count; ++pr) {
            const double zu = std::abs(norms[2 * pr] - scale * marg[2 * pr]);
            const double zv = std::abs(norms[2 * pr + 1] - scale * marg[2 * pr + 1]);
            increments[pr][trial] = zv - zu;
        }
    });

    IncrementReport rep;
    for (int pr = 0; pr < pair_count; ++pr) {
        const double dist = (pts.col(2 * pr) - pts.col(2 * pr + 1)).norm();
        if (dist == 0.0) continue;  // degenerate pair
        const double psi2 = estimate_psi2(increments[pr]);
        rep.ratios.push_back(psi2 / dist);
    }
    rep.pairs_used = static_cast<int>(rep.ratios.size());
    if (rep.pairs_used == 0) throw std::runtime_error("increment check: all pairs degenerate");
    std::vector<double> sorted = rep.ratios;
    std::sort(sorted.begin(), sorted.end());
    rep.max_ratio = sorted.back();
    rep.median_ratio = sorted[sorted.size() / 2];
    return rep;
}

SupTailReport sup_tail_check(DistModel model, const DomainSpec& domain, double p_dev,
                             long n, const std::vector<double>& u_grid, long trials,
                             std::uint64_t seed, int grid_resolution,
                             std::uint64_t trial_offset) {
    if (domain.dim > 3)
        throw std::invalid_argument("sup_tail_check: grid sup needs d <= 3");
    const Eigen::MatrixXd g = grid_directions(domain.dim, grid_resolution);
    const Eigen::VectorXd s = domain.sqrt_scale();
    const Eigen::MatrixXd points = s.asDiagonal() * g;

    // marginal on the grid is trial-independent
    Eigen::VectorXd marg;
    {
        SampleBatch dummy =
            sample_isotropic(model, domain.dim, 1, SeedTrace{seed, 0, "st-m"});
        DeviationProcess proc(std::move(dummy), p_dev, model);
        marg = proc.marginal_grid(points);
    }
    const double scale = std::pow(static_cast<double>(n), 1.0 / p_dev);

    std::vector<double> sups(trials);
    parallel_for(trials, [&](long i) {
        SampleBatch batch = sample_isotropic(
            model, domain.dim, n,
            SeedTrace{seed, trial_offset + static_cast<std::uint64_t>(i),
                      "suptail-batch"});
        Eigen::VectorXd norms = col_lp_norms(batch.rows * points, p_dev);
        sups[i] = (norms - scale * marg).cwiseAbs().maxCoeff();
    });

    SupTailReport rep;
    rep.u_grid = u_grid;
    rep.trials = trials;
    rep.seed = seed;
    rep.radius = domain.radius();
    McEstimate gamma = gauss_complexity_mc(domain, 100000, derive_seed(seed, 0, "st-gamma"));
    rep.gamma = gamma.mean;
    rep.gamma_se = gamma.std_error;

    for (double u : u_grid) {
        const double denom = rep.gamma + u * rep.radius;
        std::vector<double> ratios(trials);
        for (long i = 0; i < trials; ++i) ratios[i] = sups[i] / denom;
        std::sort(ratios.begin(), ratios.end());
        const double level = std::clamp(1.0 - 2.0 * std::exp(-u * u), 0.0, 1.0);
        long idx = static_cast<long>(std::ceil(level * trials)) - 1;
        idx = std::clamp<long>(idx, 0, trials - 1);
        const double c = ratios[idx];
        long exc = 0;
        for (long i = 0; i < trials; ++i)
            if (sups[i] > c * denom) ++exc;
        rep.fitted_C.push_back(c);
        rep.exceed_freq.push_back(static_cast<double>(exc) / trials);
    }
    return rep;
}

SymmetrizationReport verify_symmetrization(DistModel model, const SpectrumSpec& spectrum,
                                           const DomainSpec& domain, double p, long n,
                                           long trials, std::uint64_t seed,
                                           int grid_resolution, long mc_oracle_draws) {
    if (domain.dim > 3)
        throw std::invalid_argument("verify_symmetrization: grid sup needs d <= 3");
    const Eigen::MatrixXd g = grid_directions(domain.dim, grid_resolution);
    const Eigen::VectorXd s = domain.sqrt_scale();
    const Eigen::MatrixXd points = s.asDiagonal() * g;

    const bool closed = model == DistModel::gaussian && p == std::floor(p);
    PopulationOracle oracle =
        closed ? PopulationOracle::gaussian_closed_form(spectrum)
               : PopulationOracle::mc(model, spectrum, mc_oracle_draws,
                                      derive_seed(seed, 0, "symm-oracle"));
    const Eigen::VectorXd pop =
        oracle.moment_grid(points, p, MomentMode::signed_power);

    std::vector<double> lhs(trials), rhs(trials);
    parallel_for(trials, [&](long i) {
        const auto ui = static_cast<std::uint64_t>(i);
        // centered sup
        {
            SampleBatch batch =
                sample_anisotropic(model, spectrum, n, SeedTrace{seed, ui, "symm-L"});
            Eigen::MatrixXd t = batch.rows * points;  // n x R
            double best = 0.0;
            for (long c = 0; c < t.cols(); ++c) {
                KahanSum acc;
                for (long r = 0; r < n; ++r) acc.add(std::pow(t(r, c), p));
                best = std::max(best, std::abs(acc.sum - n * pop[c]));
            }
            lhs[i] = best;
        }
        // Rademacher-randomized sup, independent sample
        {
            SampleBatch batch =
                sample_anisotropic(model, spectrum, n, SeedTrace{seed, ui, "symm-R"});
            Rng eps(derive_seed(seed, ui, "symm-eps"));
            Eigen::VectorXd signs(n);
            for (long r = 0; r < n; ++r) signs[r] = eps.rademacher();
            Eigen::MatrixXd t = batch.rows * points;
            double best = 0.0;
            for (long c = 0; c < t.cols(); ++c) {
                KahanSum acc;
                for (long r = 0; r < n; ++r) acc.add(signs[r] * std::pow(t(r, c), p));
                best = std::max(best, std::abs(acc.sum));
            }
            rhs[i] = best;
        }
    });

    auto mean_se = [&](const std::vector<double>& v, double& mean, double& se) {
        KahanSum acc;
        for (double x : v) acc.add(x);
        mean = acc.sum / static_cast<double>(v.size());
        KahanSum var;
        for (double x : v) var.add((x - mean) * (x - mean));
        se = std::sqrt(var.sum) / static_cast<double>(v.size());
    };

    SymmetrizationReport rep;
    rep.trials = trials;
    mean_se(lhs, rep.lhs_mean, rep.lhs_se);
    mean_se(rhs, rep.rhs_mean, rep.rhs_se);
    const double se_comb = std::sqrt(rep.lhs_se * rep.lhs_se + 4.0 * rep.rhs_se * rep.rhs_se);
    rep.holds = rep.lhs_mean <= 2.0 * rep.rhs_mean + 3.0 * se_comb;
    return rep;
}

}  // namespace tensorlab
