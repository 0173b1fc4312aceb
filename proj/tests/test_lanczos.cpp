#include "specrank/error.hpp"
#include "specrank/gen.hpp"
#include "specrank/lanczos.hpp"
#include "specrank/oracle.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace specrank;

namespace {

// e1^T T^p e1 by repeated multiplication with the tridiagonal matrix.
double tridiag_moment(const TridiagonalMatrix& t, int p) {
    const std::size_t m = t.size();
    std::vector<double> x(m, 0.0), y(m);
    x[0] = 1.0;
    for (int k = 0; k < p; ++k) {
        for (std::size_t i = 0; i < m; ++i) {
            double s = t.alpha[i] * x[i];
            if (i > 0) s += t.beta[i - 1] * x[i - 1];
            if (i + 1 < m) s += t.beta[i] * x[i + 1];
            y[i] = s;
        }
        x.swap(y);
    }
    return x[0];
}

}  // namespace

TEST_CASE("tridiag_eigen small cases") {
    const auto one = tridiag_eigen({{2.0}, {}});
    CHECK(one.theta == std::vector<double>{2.0});
    CHECK(one.tau_sq == std::vector<double>{1.0});

    const auto two = tridiag_eigen({{0.0, 0.0}, {1.0}});
    CHECK(two.theta[0] == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(two.theta[1] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(two.tau_sq[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(two.tau_sq[1] == doctest::Approx(0.5).epsilon(1e-14));

    // numpy.linalg.eigh reference
    const auto three = tridiag_eigen({{1.0, 2.0, 3.0}, {1.0, 1.0}});
    const std::vector<double> theta = {0.26794919243112286, 2.0, 3.7320508075688767};
    const std::vector<double> tau = {0.6220084679281462, 0.33333333333333304, 0.04465819873852047};
    for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(three.theta[i] - theta[i]) < 1e-13);
        CHECK(std::abs(three.tau_sq[i] - tau[i]) < 1e-13);
    }
}

TEST_CASE("tridiag_eigen quadrature matches powers of T") {
    StreamRng rng(31, 0);
    TridiagonalMatrix t;
    for (int i = 0; i < 50; ++i) t.alpha.push_back(rng.normal());
    for (int i = 0; i < 49; ++i) t.beta.push_back(0.1 + rng.uniform());
    const auto r = tridiag_eigen(t);
    CHECK(std::is_sorted(r.theta.begin(), r.theta.end()));
    double sum = 0.0;
    for (double w : r.tau_sq) {
        CHECK(w >= 0.0);
        sum += w;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-10);
    for (int p = 0; p <= 5; ++p) {
        double q = 0.0;
        for (std::size_t k = 0; k < r.theta.size(); ++k) q += r.tau_sq[k] * std::pow(r.theta[k], p);
        const double exact = tridiag_moment(t, p);
        CHECK(std::abs(q - exact) <= 1e-9 * std::max(1.0, std::abs(exact)));
    }
}

TEST_CASE("lanczos full Krylov reproduces the spectrum") {
    const auto op = LinearOperator::diagonal({1, 2, 3, 4});
    const std::vector<double> v = {0.5, 0.5, 0.5, 0.5};
    const auto r = lanczos(op, v, 4);
    const auto s = tridiag_eigen(r.tridiagonal);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(s.theta[i] - (i + 1)) < 1e-8);
    for (double b : r.tridiagonal.beta) CHECK(b >= 0.0);
}

TEST_CASE("lanczos on the identity") {
    const auto op = LinearOperator::diagonal(std::vector<double>(9, 1.0));
    const auto r = lanczos(op, testing::random_unit(9, 1), 1);
    CHECK(r.tridiagonal.alpha.size() == 1);
    CHECK(r.tridiagonal.alpha[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.tridiagonal.beta.empty());
    // more steps break down immediately
    const auto r2 = lanczos(op, testing::random_unit(9, 1), 5);
    CHECK(r2.breakdown);
    CHECK(r2.tridiagonal.size() == 1);
}

TEST_CASE("lanczos extreme Ritz value converges") {
    // extremes separated from the bulk by 0.1 converge well within 50 steps
    auto d = testing::uniform_values(498, 0.1, 0.9, 17);
    d.push_back(0.0);
    d.push_back(1.0);
    const auto op = LinearOperator::diagonal(d);
    const auto exact = dense_eigs(op);
    const auto s = tridiag_eigen(lanczos(op, testing::random_unit(500, 3), 50).tridiagonal);
    CHECK(std::abs(s.theta.back() - exact.eigenvalues.back()) < 1e-6);
    CHECK(std::abs(s.theta.front() - exact.eigenvalues.front()) < 1e-6);
}

TEST_CASE("lanczos errors") {
    const auto op = LinearOperator::diagonal({1, 2, 3});
    CHECK_THROWS_AS(lanczos(op, std::vector<double>{1, 0, 0}, 0), InvalidArgument);
    CHECK_THROWS_AS(lanczos(op, std::vector<double>{1, 0, 0}, 4), InvalidArgument);
    CHECK_THROWS_AS(lanczos(op, std::vector<double>{1, 1, 0}, 2), InvalidArgument);
    CHECK_THROWS_AS(lanczos(op, std::vector<double>{1, 0}, 2), DimensionError);
}

TEST_CASE("reorthogonalized basis stays orthonormal") {
    const std::size_t n = 300;
    const auto op = LinearOperator::dense(n, testing::random_symmetric(n, 12));
    const auto r = lanczos(op, testing::random_unit(n, 5), 80, {.reorthogonalize = true, .keep_basis = true});
    REQUIRE(r.basis.size() == 80);
    double worst = 0.0;
    for (std::size_t i = 0; i < r.basis.size(); ++i)
        for (std::size_t j = 0; j < i; ++j) worst = std::max(worst, std::abs(dot(r.basis[i], r.basis[j])));
    CHECK(worst <= 1e-8);
}

TEST_CASE("Gauss quadrature exactness up to degree 2m-1") {
    const std::size_t n = 200;
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        auto a = testing::random_symmetric(n, 40 + seed);
        for (auto& x : a) x /= std::sqrt(static_cast<double>(n));  // spectrum in about [-2, 2]
        const auto op = LinearOperator::dense(n, a);
        const auto v = testing::random_unit(n, 60 + seed);
        for (std::size_t m : {5, 10}) {
            const auto s = tridiag_eigen(lanczos(op, v, m).tridiagonal);
            std::vector<double> w = v;
            for (std::size_t p = 0; p <= 2 * m - 1; ++p) {
                const double exact = dot(v, w);
                double q = 0.0;
                for (std::size_t k = 0; k < m; ++k) q += s.tau_sq[k] * std::pow(s.theta[k], static_cast<double>(p));
                double scale = 0.0;
                for (std::size_t k = 0; k < m; ++k) scale += s.tau_sq[k] * std::pow(std::abs(s.theta[k]), static_cast<double>(p));
                CHECK(std::abs(q - exact) <= 1e-8 * std::max(scale, 1e-300));
                w = op.apply(w);
            }
        }
    }
}

TEST_CASE("Ritz values of m steps lie within those of m+1 steps") {
    const std::size_t n = 120;
    const auto op = LinearOperator::dense(n, testing::random_symmetric(n, 2));
    const auto v = testing::random_unit(n, 9);
    for (std::size_t m = 2; m < 15; ++m) {
        const auto a = tridiag_eigen(lanczos(op, v, m).tridiagonal);
        const auto b = tridiag_eigen(lanczos(op, v, m + 1).tridiagonal);
        CHECK(a.theta.front() >= b.theta.front() - 1e-10);
        CHECK(a.theta.back() <= b.theta.back() + 1e-10);
    }
}

TEST_CASE("spectrum_bounds") {
    SUBCASE("contains the spectrum") {
        std::vector<double> d(11);
        for (int i = 0; i <= 10; ++i) d[static_cast<std::size_t>(i)] = i;
        const auto b = spectrum_bounds(LinearOperator::diagonal(d));
        CHECK(b.lambda_min <= 0.0);
        CHECK(b.lambda_max >= 10.0);
        CHECK(b.lambda_max <= 10.2);
    }
    SUBCASE("identity gets a nondegenerate window") {
        const auto b = spectrum_bounds(LinearOperator::diagonal(std::vector<double>(20, 1.0)));
        CHECK(b.lambda_min < 1.0);
        CHECK(b.lambda_max > 1.0);
        CHECK(b.lambda_max - b.lambda_min < 0.1);
    }
    SUBCASE("psd lower end never above zero") {
        const auto b = spectrum_bounds(LinearOperator::diagonal({2.0, 3.0, 4.0, 5.0}), {.assume_psd = true});
        CHECK(b.lambda_min < 0.0);
        CHECK(b.lambda_max >= 5.0);
    }
    SUBCASE("noiseless Hadamard upper bound just above one") {
        const auto g = hadamard_lowrank(256, 16, 0.0, 0);
        const auto b = spectrum_bounds(g.op, {.assume_psd = true});
        CHECK(b.lambda_max >= 1.0);
        CHECK(b.lambda_max <= 1.011);
    }
    SUBCASE("single step falls back to Gershgorin") {
        const auto b = spectrum_bounds(LinearOperator::dense(2, {1, 0, 0, 1}));
        CHECK(b.lambda_min <= 1.0);
        CHECK(b.lambda_max >= 1.0);
    }
}
