#include "tensorlab/order_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "tensorlab/parallel.hpp"

namespace tensorlab {

double threshold_k(double t, long n) {
    if (t <= 0.0) throw std::invalid_argument("threshold_k: t must be > 0");
    if (n < 1) throw std::invalid_argument("threshold_k: n must be >= 1");
    const double lnp = std::max(std::log(std::numbers::e_v<double> * n / t), 0.0);
    if (lnp == 0.0) return std::numeric_limits<double>::infinity();
    return t / lnp;
}

RearrangedSample rearrange(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("rearrange: empty input");
    RearrangedSample r;
    r.sorted_abs.reserve(values.size());
    for (double v : values) r.sorted_abs.push_back(std::abs(v));
    // stable: equal magnitudes keep original order
    std::stable_sort(r.sorted_abs.begin(), r.sorted_abs.end(), std::greater<>());
    return r;
}

double head_sum(const RearrangedSample& r, long m) {
    const long lim = std::min<long>(m, static_cast<long>(r.sorted_abs.size()));
    KahanSum acc;
    for (long i = 0; i < lim; ++i) acc.add(r.sorted_abs[i] * r.sorted_abs[i]);
    return acc.sum;
}

double tail_qsum(const RearrangedSample& r, long m, double q) {
    if (q < 2.0) throw std::invalid_argument("tail_qsum: q >= 2 required");
    const long n = static_cast<long>(r.sorted_abs.size());
    KahanSum acc;
    for (long i = std::max<long>(m, 0); i < n; ++i)
        acc.add(std::pow(r.sorted_abs[i], q));
    return acc.sum;
}

double scalar_psi2(DistModel model_1d) {
    switch (model_1d) {
        case DistModel::gaussian:
            return std::sqrt(8.0 / 3.0);  // solves (1 - 2/t^2)^{-1/2} = 2
        case DistModel::rademacher:
        case DistModel::uniform_sphere_scaled:  // in 1-d this is +-1
            return 1.0 / std::sqrt(std::log(2.0));
    }
    return 0.0;
}

namespace {

// index cap for floor(k) with k possibly infinite
long cap_index(double k, long n) {
    if (std::isinf(k)) return n;
    return std::min<long>(static_cast<long>(std::floor(k)), n);
}

double quantile_sorted(std::vector<double>& v, double level) {
    std::sort(v.begin(), v.end());
    const long n = static_cast<long>(v.size());
    // smallest C with #(x > C) <= n (1 - level)
    long idx = static_cast<long>(std::ceil(level * n)) - 1;
    idx = std::clamp<long>(idx, 0, n - 1);
    return v[idx];
}

}  // namespace

TailReport verify_lemma(DistModel model_1d, long n, double t, double q,
                        long trials, std::uint64_t seed,
                        std::uint64_t trial_offset) {
    if (trials < 1) throw std::invalid_argument("verify_lemma: trials >= 1");
    TailReport rep;
    rep.t = t;
    rep.n = n;
    rep.q = q;
    rep.k = threshold_k(t, n);
    rep.trials = trials;
    rep.seed = seed;

    const double inv_psi2 = 1.0 / scalar_psi2(model_1d);
    const long m_head = cap_index(3.0 * rep.k, n);
    const long m_head_k = cap_index(rep.k, n);
    const long m_tail = cap_index(rep.k, n);

    std::vector<double> head_ratio(trials), head_ratio_k(trials), tail_ratio(trials);
    parallel_for(trials, [&](long i) {
        Rng rng(derive_seed(seed, trial_offset + static_cast<std::uint64_t>(i),
                            "lemma-trial"));
        std::vector<double> x(n);
        for (long j = 0; j < n; ++j) {
            double z = 0.0;
            switch (model_1d) {
                case DistModel::gaussian: z = rng.normal(); break;
                case DistModel::rademacher:
                case DistModel::uniform_sphere_scaled: z = rng.rademacher(); break;
            }
            x[j] = z * inv_psi2;
        }
        RearrangedSample r = rearrange(x);
        head_ratio[i] = head_sum(r, m_head) / t;
        head_ratio_k[i] = head_sum(r, m_head_k) / t;
        tail_ratio[i] = tail_qsum(r, m_tail, q) / static_cast<double>(n);
    });

    const double level = std::clamp(1.0 - 2.0 * std::exp(-t), 0.0, 1.0);
    std::vector<double> hr = head_ratio, hrk = head_ratio_k, tr = tail_ratio;
    rep.fitted_C_head = quantile_sorted(hr, level);
    rep.fitted_C_head_k = quantile_sorted(hrk, level);
    rep.fitted_C_tail = quantile_sorted(tr, level);

    long exc_head = 0, exc_tail = 0;
    for (long i = 0; i < trials; ++i) {
        if (head_ratio[i] > rep.fitted_C_head) ++exc_head;
        if (tail_ratio[i] > rep.fitted_C_tail) ++exc_tail;
    }
    rep.exceed_freq_head = static_cast<double>(exc_head) / trials;
    rep.exceed_freq_tail = static_cast<double>(exc_tail) / trials;
    return rep;
}

}  // namespace tensorlab
