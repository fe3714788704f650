#include "tensorlab/sphere_opt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace tensorlab {

DomainSpec DomainSpec::sphere(int d) {
    DomainSpec t;
    t.kind = DomainKind::sphere;
    t.dim = d;
    return t;
}

DomainSpec DomainSpec::ellipsoid(const SpectrumSpec& spectrum) {
    DomainSpec t;
    t.kind = DomainKind::ellipsoid;
    t.dim = spectrum.dim;
    t.eigenvalues = materialize_spectrum(spectrum);
    return t;
}

Eigen::VectorXd DomainSpec::sqrt_scale() const {
    Eigen::VectorXd s = Eigen::VectorXd::Ones(dim);
    if (kind == DomainKind::ellipsoid)
        for (int j = 0; j < dim; ++j) s[j] = std::sqrt(eigenvalues[j]);
    return s;
}

double DomainSpec::radius() const {
    if (kind == DomainKind::sphere) return 1.0;
    return std::sqrt(eigenvalues[0]);  // eigenvalues are nonincreasing
}

namespace {

Eigen::VectorXd random_unit(Rng& rng, int d) {
    Eigen::VectorXd u(d);
    double norm2 = 0.0;
    do {
        for (int j = 0; j < d; ++j) {
            u[j] = rng.normal();
            norm2 += u[j] * u[j];
        }
    } while (norm2 == 0.0);
    return u / std::sqrt(norm2);
}

struct RestartOutcome {
    double value = -std::numeric_limits<double>::infinity();
    Eigen::VectorXd u;
    bool converged = false;
};

// Single ascent run in u-space. scale maps u to the ambient point v.
RestartOutcome ascend_once(const SphereObjective& obj, const Eigen::VectorXd& scale,
                           Eigen::VectorXd u, int max_iters, double tol) {
    const auto to_v = [&](const Eigen::VectorXd& x) {
        return (scale.array() * x.array()).matrix().eval();
    };
    RestartOutcome out;
    double fu = obj.value(to_v(u));
    for (int iter = 0; iter < max_iters; ++iter) {
        Eigen::VectorXd gv = obj.gradient(to_v(u));
        Eigen::VectorXd gu = (scale.array() * gv.array()).matrix();
        Eigen::VectorXd r = gu - gu.dot(u) * u;  // tangent projection
        const double rn = r.norm();
        if (rn <= tol) {
            out.converged = true;
            break;
        }
        // Armijo backtracking from unit step
        double alpha = 1.0;
        bool moved = false;
        while (alpha > 1e-14) {
            Eigen::VectorXd cand = u + alpha * r;
            cand.normalize();
            const double fc = obj.value(to_v(cand));
            if (fc >= fu + 1e-4 * alpha * rn * rn) {
                u = cand;
                fu = fc;
                moved = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!moved) {
            // no ascent direction at line-search resolution
            out.converged = true;
            break;
        }
    }
    out.value = fu;
    out.u = u;
    return out;
}

}  // namespace

AscentResult maximize_on_sphere(const SphereObjective& obj, const DomainSpec& domain,
                                const AscentOptions& opts) {
    if (opts.restarts < 1) throw std::invalid_argument("ascent: restarts >= 1 required");
    const Eigen::VectorXd scale = domain.sqrt_scale();
    const int d = domain.dim;

    AscentResult best;
    best.arg = Eigen::VectorXd::Zero(d);
    double spread_min = std::numeric_limits<double>::infinity();
    double spread_max = -std::numeric_limits<double>::infinity();

    std::vector<Eigen::VectorXd> starts = opts.warm_starts;
    for (int k = 0; k < opts.restarts; ++k) {
        Rng rng(derive_seed(opts.seed, static_cast<std::uint64_t>(k), "ascent-restart"));
        starts.push_back(random_unit(rng, d));
    }

    bool first = true;
    for (const auto& s : starts) {
        RestartOutcome r = ascend_once(obj, scale, s, opts.max_iters, opts.tol);
        ++best.restarts_used;
        if (!r.converged) ++best.failed_restarts;
        spread_min = std::min(spread_min, r.value);
        spread_max = std::max(spread_max, r.value);
        Eigen::VectorXd arg = (scale.array() * r.u.array()).matrix();
        // deterministic tie-break: lexicographically smallest argument
        const bool tie_wins =
            r.value == best.value &&
            std::lexicographical_compare(arg.data(), arg.data() + d,
                                         best.arg.data(), best.arg.data() + d);
        if (first || r.value > best.value || tie_wins) {
            best.value = r.value;
            best.arg = std::move(arg);
            best.converged = r.converged;
            first = false;
        }
    }
    best.restart_spread = spread_max - spread_min;
    return best;
}

Eigen::MatrixXd grid_directions(int d, int resolution) {
    if (resolution < 1) throw std::invalid_argument("grid: resolution >= 1");
    if (d == 2) {
        Eigen::MatrixXd g(2, resolution);
        for (int i = 0; i < resolution; ++i) {
            const double theta = std::numbers::pi * i / resolution;
            g(0, i) = std::cos(theta);
            g(1, i) = std::sin(theta);
        }
        return g;
    }
    if (d == 3) {
        // Fibonacci sphere
        Eigen::MatrixXd g(3, resolution);
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (int i = 0; i < resolution; ++i) {
            const double z = 1.0 - 2.0 * (i + 0.5) / resolution;
            const double rad = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double phi = golden * i;
            g(0, i) = rad * std::cos(phi);
            g(1, i) = rad * std::sin(phi);
            g(2, i) = z;
        }
        return g;
    }
    throw std::invalid_argument("grid directions support d in {2,3} only");
}

}  // namespace tensorlab
