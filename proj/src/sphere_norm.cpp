#include "tensorlab/sphere_norm.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tensorlab {

namespace {

bool is_even_integer(double p) {
    return p == std::floor(p) && static_cast<long>(p) % 2 == 0;
}

// Centered second moment matrix (1/N) X^T X - E X X^T.
Eigen::MatrixXd centered_p2_matrix(const MomentFunctional& f) {
    Eigen::MatrixXd m =
        (f.batch.rows.transpose() * f.batch.rows) / static_cast<double>(f.batch.n());
    return m - f.population.second_moment_matrix();
}

Eigen::VectorXd top_abs_eigenvector(const Eigen::MatrixXd& sym, double* out_val) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    const auto& vals = es.eigenvalues();
    int best = 0;
    for (int i = 1; i < vals.size(); ++i)
        if (std::abs(vals[i]) > std::abs(vals[best])) best = i;
    if (out_val) *out_val = vals[best];
    return es.eigenvectors().col(best);
}

}  // namespace

void canonicalize_sign(Eigen::VectorXd& v) {
    for (long j = 0; j < v.size(); ++j) {
        if (v[j] != 0.0) {
            if (v[j] < 0.0) v = -v;
            return;
        }
    }
}

SupResult sup_exact_p2(const MomentFunctional& f, const DomainSpec& domain) {
    if (f.p != 2.0 || f.mode != MomentMode::signed_power)
        throw std::invalid_argument("sup_exact_p2 requires p = 2, signed mode");
    const Eigen::VectorXd s = domain.sqrt_scale();
    Eigen::MatrixXd m = centered_p2_matrix(f);
    // pullback: u' S M S u over the unit sphere
    m = s.asDiagonal() * m * s.asDiagonal();
    double lam = 0.0;
    Eigen::VectorXd u = top_abs_eigenvector(m, &lam);
    SupResult res;
    res.method = SupMethod::exact_eig;
    res.value = std::abs(lam);
    res.argmax = (s.array() * u.array()).matrix();
    canonicalize_sign(res.argmax);
    return res;
}

SupResult sup_ascent(const MomentFunctional& f, const DomainSpec& domain,
                     const AscentOptions& opts) {
    SphereObjective plus{
        [&f](const Eigen::VectorXd& v) { return centered_value(f, v); },
        [&f](const Eigen::VectorXd& v) { return centered_gradient(f, v); }};
    SphereObjective minus{
        [&f](const Eigen::VectorXd& v) { return -centered_value(f, v); },
        [&f](const Eigen::VectorXd& v) {
            return (-centered_gradient(f, v)).eval();
        }};

    // warm start from the p = 2 slice eigenvector
    AscentOptions o = opts;
    {
        const Eigen::VectorXd s = domain.sqrt_scale();
        Eigen::MatrixXd m = centered_p2_matrix(f);
        m = s.asDiagonal() * m * s.asDiagonal();
        o.warm_starts.push_back(top_abs_eigenvector(m, nullptr));
    }

    AscentResult best = maximize_on_sphere(plus, domain, o);
    int restarts_used = best.restarts_used;
    int failed = best.failed_restarts;
    // For odd signed p the objective is odd and T symmetric, so maximizing
    // -F is the same problem at -v; skip the second pass.
    const bool need_minus = !(f.mode == MomentMode::signed_power &&
                              static_cast<long>(f.p) % 2 == 1);
    if (need_minus) {
        AscentResult neg = maximize_on_sphere(minus, domain, o);
        restarts_used += neg.restarts_used;
        failed += neg.failed_restarts;
        if (neg.value > best.value) best = neg;
    }

    SupResult res;
    res.method = SupMethod::ascent;
    res.argmax = best.arg;
    res.value = std::abs(centered_value(f, res.argmax));
    res.restarts_used = restarts_used;
    res.best_restart_spread = best.restart_spread;
    res.converged = (failed == 0) || best.converged;
    if (is_even_integer(f.p)) canonicalize_sign(res.argmax);
    return res;
}

SupResult sup_grid(const MomentFunctional& f, const DomainSpec& domain, int resolution) {
    if (domain.dim > 3) throw std::invalid_argument("sup_grid supports d in {2,3}");
    const Eigen::MatrixXd g = grid_directions(domain.dim, resolution);
    const Eigen::VectorXd s = domain.sqrt_scale();
    const Eigen::MatrixXd points = s.asDiagonal() * g;  // columns on T

    SupResult res;
    res.method = SupMethod::grid;
    const Eigen::VectorXd centered =
        empirical_moment_grid(f, points) - f.population.moment_grid(points, f.p, f.mode);
    res.value = -1.0;
    int best_col = 0;
    for (int c = 0; c < points.cols(); ++c) {
        const double val = std::abs(centered[c]);
        if (val > res.value) {
            res.value = val;
            best_col = c;
        }
    }
    res.argmax = points.col(best_col);
    if (is_even_integer(f.p)) canonicalize_sign(res.argmax);

    // Lipschitz bound on the sup gap: |<X_i,v>| <= ||X_i|| rad(T) on T, so
    // |dF| <= (p/N) sum ||X_i||^p rad^{p-1} plus the population term.
    const double rad = domain.radius();
    double emp = 0.0;
    for (long i = 0; i < f.batch.n(); ++i)
        emp += std::pow(f.batch.rows.row(i).norm(), f.p);
    emp = f.p * (emp / static_cast<double>(f.batch.n())) * std::pow(rad, f.p - 1.0);
    double pop = 0.0;
    if (f.population.kind() == PopulationOracle::Kind::gaussian_closed_form) {
        const double lam1 = f.population.eigenvalues()[0];
        pop = f.p * double_factorial(static_cast<int>(f.p) - 1) *
              std::pow(lam1 * rad * rad, (f.p - 1.0) / 2.0) * std::sqrt(lam1);
    } else {
        // the MC population is an average of the same form as the empirical
        // term; bound it by the same expression
        pop = emp;
    }
    const double lip = (emp + pop) * rad;  // pullback scale factor
    const double gap = (domain.dim == 2)
                           ? std::numbers::pi / resolution
                           : 3.5 / std::sqrt(static_cast<double>(resolution));
    res.grid_error_bound = lip * gap;
    return res;
}

}  // namespace tensorlab
