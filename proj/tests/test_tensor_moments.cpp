#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "tensorlab/tensor_moments.hpp"

using namespace tensorlab;

namespace {

SampleBatch make_batch(std::initializer_list<std::initializer_list<double>> rows) {
    SampleBatch b;
    const long n = static_cast<long>(rows.size());
    const long d = static_cast<long>(rows.begin()->size());
    b.rows.resize(n, d);
    long i = 0;
    for (const auto& r : rows) {
        long j = 0;
        for (double x : r) b.rows(i, j++) = x;
        ++i;
    }
    return b;
}

Eigen::VectorXd vec2(double a, double b) {
    Eigen::VectorXd v(2);
    v << a, b;
    return v;
}

}  // namespace

TEST_CASE("empirical moment hand examples") {
    auto oracle = PopulationOracle::gaussian_closed_form(SpectrumSpec::identity(2));
    SUBCASE("single row p=2") {
        MomentFunctional f(make_batch({{1, 0}}), 2, MomentMode::signed_power, oracle);
        CHECK(empirical_moment(f, vec2(1, 0)) == 1.0);
    }
    SUBCASE("odd cancellation p=3") {
        MomentFunctional f(make_batch({{1, 0}, {-1, 0}}), 3, MomentMode::signed_power,
                           oracle);
        CHECK(empirical_moment(f, vec2(1, 0)) == 0.0);
    }
    SUBCASE("two rows p=2 diagonal direction") {
        MomentFunctional f(make_batch({{1, 1}, {2, 0}}), 2, MomentMode::signed_power,
                           oracle);
        const double s = 1.0 / std::sqrt(2.0);
        CHECK(empirical_moment(f, vec2(s, s)) == doctest::Approx(2.0).epsilon(1e-12));
    }
    SUBCASE("dimension mismatch") {
        MomentFunctional f(make_batch({{1, 0}}), 2, MomentMode::signed_power, oracle);
        Eigen::VectorXd v3 = Eigen::VectorXd::Ones(3);
        CHECK_THROWS_AS(empirical_moment(f, v3), std::invalid_argument);
    }
}

TEST_CASE("gaussian closed-form population moments") {
    auto oracle = PopulationOracle::gaussian_closed_form(SpectrumSpec::identity(2));
    CHECK(oracle.moment(vec2(1, 0), 2, MomentMode::signed_power) == 1.0);
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(oracle.moment(vec2(s, s), 4, MomentMode::signed_power) ==
          doctest::Approx(3.0).epsilon(1e-12));
    CHECK(oracle.moment(vec2(0.3, -0.7), 3, MomentMode::signed_power) == 0.0);
    CHECK(oracle.moment(vec2(0.3, -0.7), 5, MomentMode::signed_power) == 0.0);
}

TEST_CASE("closed form matches mc oracle within 4 standard errors") {
    auto spectrum = SpectrumSpec::explicit_spec({1.5, 0.7});
    auto closed = PopulationOracle::gaussian_closed_form(spectrum);
    auto mc = PopulationOracle::mc(DistModel::gaussian, spectrum, 1000000, 31337);
    Eigen::VectorXd v = vec2(0.6, 0.8);
    for (double p : {2.0, 4.0}) {
        const double a = closed.moment(v, p, MomentMode::signed_power);
        const double b = mc.moment(v, p, MomentMode::signed_power);
        const double se = mc.moment_std_error(v, p, MomentMode::signed_power);
        CHECK(std::abs(a - b) <= 4.0 * se);
    }
}

TEST_CASE("centered value single-row example") {
    auto oracle = PopulationOracle::gaussian_closed_form(SpectrumSpec::identity(2));
    MomentFunctional f(make_batch({{1, 0}}), 2, MomentMode::signed_power, oracle);
    CHECK(centered_value(f, vec2(0, 1)) == -1.0);
}

TEST_CASE("homogeneity is exact for scaling by 2") {
    auto oracle = PopulationOracle::gaussian_closed_form(SpectrumSpec::identity(2));
    auto batch = make_batch({{0.3, -1.2}, {2.5, 0.7}, {-0.4, 0.9}});
    for (double p : {2.0, 3.0, 4.0}) {
        MomentFunctional f(batch, p, MomentMode::signed_power, oracle);
        Eigen::VectorXd v = vec2(0.25, -0.75);
        CHECK(empirical_moment(f, 2.0 * v) ==
              std::pow(2.0, p) * empirical_moment(f, v));
    }
}

TEST_CASE("signed and abs modes coincide for even p") {
    auto oracle = PopulationOracle::gaussian_closed_form(SpectrumSpec::identity(2));
    auto batch = make_batch({{0.3, -1.2}, {2.5, 0.7}, {-0.4, 0.9}});
    for (double p : {2.0, 4.0}) {
        MomentFunctional fs(batch, p, MomentMode::signed_power, oracle);
        MomentFunctional fa(batch, p, MomentMode::abs_power, oracle);
        Eigen::VectorXd v = vec2(-0.9, 0.45);
        CHECK(empirical_moment(fs, v) == empirical_moment(fa, v));
    }
}

TEST_CASE("analytic gradient matches central finite differences") {
    const int d = 4;
    auto oracle = PopulationOracle::gaussian_closed_form(SpectrumSpec::identity(d));
    SampleBatch batch = sample_isotropic(DistModel::gaussian, d, 40, SeedTrace{1, 0, "g"});
    Rng rng(derive_seed(1, 1, "grad-dirs"));
    const double h = 1e-5;
    for (double p : {2.0, 3.0, 4.0}) {
        MomentFunctional f(batch, p, MomentMode::signed_power, oracle);
        for (int rep = 0; rep < 20; ++rep) {
            Eigen::VectorXd v(d);
            for (int j = 0; j < d; ++j) v[j] = rng.normal();
            v.normalize();
            Eigen::VectorXd an = centered_gradient(f, v);
            Eigen::VectorXd fd(d);
            for (int j = 0; j < d; ++j) {
                Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
                e[j] = h;
                fd[j] = (centered_value(f, v + e) - centered_value(f, v - e)) / (2 * h);
            }
            CHECK((an - fd).norm() / an.norm() <= 1e-5);
        }
    }
}

TEST_CASE("mc oracle gradient is the gradient of the frozen mc moment") {
    const int d = 3;
    auto oracle = PopulationOracle::mc(DistModel::rademacher, SpectrumSpec::identity(d),
                                       50000, 222);
    SampleBatch batch = sample_isotropic(DistModel::rademacher, d, 30, SeedTrace{2, 0, "g"});
    MomentFunctional f(batch, 4, MomentMode::signed_power, oracle);
    Eigen::VectorXd v(d);
    v << 0.2, -0.5, 0.84;
    const double h = 1e-5;
    Eigen::VectorXd an = centered_gradient(f, v);
    Eigen::VectorXd fd(d);
    for (int j = 0; j < d; ++j) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
        e[j] = h;
        fd[j] = (centered_value(f, v + e) - centered_value(f, v - e)) / (2 * h);
    }
    CHECK((an - fd).norm() / an.norm() <= 1e-5);
}

TEST_CASE("nondifferentiable point reported for abs non-integer p") {
    auto oracle = PopulationOracle::mc(DistModel::gaussian, SpectrumSpec::identity(2),
                                       1000, 5);
    MomentFunctional f(make_batch({{0, 1}, {1, 1}}), 2.5, MomentMode::abs_power, oracle);
    CHECK_THROWS_AS(empirical_gradient(f, vec2(1, 0)), NondifferentiablePoint);
}

TEST_CASE("closed form rejects non-gaussian-compatible requests") {
    auto oracle = PopulationOracle::gaussian_closed_form(SpectrumSpec::identity(2));
    CHECK_THROWS_AS(oracle.moment(vec2(1, 0), 2.5, MomentMode::abs_power),
                    std::invalid_argument);
}

TEST_CASE("dense tensor cross-check") {
    SampleBatch batch = sample_isotropic(DistModel::gaussian, 3, 25, SeedTrace{8, 0, "d"});
    const int p = 3;
    auto tensor = dense_moment_tensor(batch, p);
    auto oracle = PopulationOracle::gaussian_closed_form(SpectrumSpec::identity(3));
    MomentFunctional f(batch, p, MomentMode::signed_power, oracle);
    Eigen::VectorXd v(3);
    v << 0.1, -0.6, 0.5;
    CHECK(dense_tensor_apply(tensor, 3, p, v) ==
          doctest::Approx(empirical_moment(f, v)).epsilon(1e-12));
    CHECK_THROWS_AS(dense_moment_tensor(sample_isotropic(DistModel::gaussian, 7, 2,
                                                         SeedTrace{8, 1, "d"}),
                                        2),
                    std::invalid_argument);

    const std::string path = "/tmp/tensorlab_dense_test.csv";
    dump_dense_tensor_csv(tensor, 3, p, path);
    CHECK(std::filesystem::exists(path));
    std::remove(path.c_str());
}
