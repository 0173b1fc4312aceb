#include "specrank/gen.hpp"
#include "specrank/ldos.hpp"
#include "specrank/oracle.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace specrank;

namespace {

RitzData single(std::vector<double> theta, std::vector<double> tau, std::size_t n) {
    RitzData d;
    d.per_probe.push_back({std::move(theta), std::move(tau)});
    d.n = n;
    d.steps = d.per_probe[0].theta.size();
    d.truncated = {false};
    return d;
}

}  // namespace

TEST_CASE("collect_ritz basics") {
    SUBCASE("one by one") {
        const auto op = LinearOperator::diagonal({3.0});
        const auto probes = generate_probes(1, {.nv = 4});
        const auto d = collect_ritz(op, 1, probes);
        for (const auto& p : d.per_probe) {
            CHECK(p.theta == std::vector<double>{3.0});
            CHECK(p.tau_sq[0] == doctest::Approx(1.0).epsilon(1e-15));
        }
    }
    SUBCASE("full Krylov recovers the eigenvalues") {
        const std::size_t n = 30;
        const auto op = LinearOperator::dense(n, testing::random_symmetric(n, 3));
        const auto ex = dense_eigs(op);
        const auto d = collect_ritz(op, n, generate_probes(n, {.nv = 5}));
        for (const auto& p : d.per_probe)
            for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(p.theta[i] - ex.eigenvalues[i]) < 1e-8);
    }
    SUBCASE("separated extremes converge, the rest stay inside") {
        auto e = testing::uniform_values(498, 0.1, 0.9, 8);
        e.push_back(0.0);
        e.push_back(1.0);
        const auto op = LinearOperator::diagonal(e);
        const auto d = collect_ritz(op, 50, generate_probes(500, {.nv = 3}));
        for (const auto& p : d.per_probe) {
            CHECK(std::abs(p.theta.front()) < 1e-6);
            CHECK(std::abs(p.theta.back() - 1.0) < 1e-6);
            CHECK(p.theta[1] > 0.1 - 1e-12);
            CHECK(p.theta[p.theta.size() - 2] < 0.9 + 1e-12);
        }
    }
    SUBCASE("breakdown truncates and renormalizes") {
        const auto op = LinearOperator::diagonal({1, 1, 1, 2, 2, 2});
        const auto d = collect_ritz(op, 5, generate_probes(6, {.nv = 2}));
        for (std::size_t l = 0; l < 2; ++l) {
            CHECK(d.truncated[l]);
            CHECK(d.per_probe[l].theta.size() == 2);
            CHECK(d.per_probe[l].tau_sq[0] + d.per_probe[l].tau_sq[1] == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    CHECK_THROWS(collect_ritz(LinearOperator::diagonal({1, 2}), 3, generate_probes(2, {.nv = 1})));
}

TEST_CASE("lanczos counts") {
    const auto d = single({1.0, 2.0, 3.0}, {0.2, 0.3, 0.5}, 10);
    CHECK(count_eigs_lanczos(d, 0.0, 4.0).mean() == doctest::Approx(10.0));
    CHECK(count_eigs_lanczos(d, -5.0, 0.5).mean() == 0.0);
    CHECK(count_eigs_lanczos(d, 1.0, 2.0).mean() == doctest::Approx(3.0));  // (1, 2] holds only theta = 2
    CHECK(rank_lanczos(d, 0.5).mean() == doctest::Approx(10.0));
    CHECK(rank_lanczos(d, 3.5).mean() == 0.0);
    CHECK(rank_lanczos(d, 2.0).mean() == doctest::Approx(5.0));

    // split intervals add up exactly, and rank + lower count = n
    const auto probes = generate_probes(200, {.nv = 6});
    const auto data = collect_ritz(LinearOperator::diagonal(testing::uniform_values(200, 0, 1, 4)), 40, probes);
    const auto x = count_eigs_lanczos(data, -1.0, 0.3), y = count_eigs_lanczos(data, 0.3, 0.8),
               z = count_eigs_lanczos(data, -1.0, 0.8);
    const auto r = rank_lanczos(data, 0.3);
    for (std::size_t l = 0; l < 6; ++l) {
        CHECK(x.per_probe[l] + y.per_probe[l] == doctest::Approx(z.per_probe[l]).epsilon(1e-14));
        CHECK(r.series.per_probe[l] + x.per_probe[l] == doctest::Approx(200.0).epsilon(1e-14));
    }
    double prev = 1e300;
    for (double eps = -0.1; eps <= 1.1; eps += 0.01) {
        const double v = rank_lanczos(data, eps).mean();
        CHECK(v <= prev);
        prev = v;
    }
}

TEST_CASE("planted gap count near the oracle") {
    std::vector<double> e = testing::uniform_values(650, 0.0, 0.1, 6);
    const auto hi = testing::uniform_values(350, 0.5, 1.0, 7);
    e.insert(e.end(), hi.begin(), hi.end());
    const auto op = LinearOperator::diagonal(e);
    const auto exact = exact_count(dense_eigs(op), 0.3, 2.0);
    const auto data = collect_ritz(op, 50, generate_probes(1000, {.nv = 30}));
    CHECK(std::abs(count_eigs_lanczos(data, 0.3, 2.0).mean() - exact) <= 0.05 * exact);
}

TEST_CASE("cumulative DOS") {
    const auto d = single({1.0, 2.0}, {0.25, 0.75}, 4);
    const auto c = cdos(d);
    CHECK(c.per_probe[0].rho_sq == std::vector<double>{0.25, 1.0});
    CHECK(c.evaluate(0.5) == 0.0);
    CHECK(c.evaluate(1.5) == 0.25);
    CHECK(c.evaluate(9.0) == 1.0);

    const auto data = collect_ritz(LinearOperator::dense(80, testing::random_symmetric(80, 5)), 30,
                                   generate_probes(80, {.nv = 9}));
    const auto curve = cdos(data);
    for (double eps : {-10.0, -3.0, 0.0, 1.7, 10.0}) {
        const auto a = rank_lanczos(data, eps).series.per_probe;
        const auto b = rank_from_cdos(curve, eps).per_probe;
        CHECK(a == b);
    }
    for (const auto& p : curve.per_probe) {
        CHECK(std::is_sorted(p.rho_sq.begin(), p.rho_sq.end()));
        CHECK(std::abs(p.rho_sq.back() - 1.0) <= 1e-10);
    }
}

TEST_CASE("full Krylov cumulative weights equal exact counts") {
    const std::size_t n = 12;
    const auto op = LinearOperator::dense(n, testing::random_symmetric(n, 13));
    const auto ex = dense_eigs(op);
    // Equal weight on every eigenvector makes n * rho_k^2 an exact count; a
    // diagonal operator with the same spectrum gives that with a flat probe.
    const auto diag = LinearOperator::diagonal(ex.eigenvalues);
    const Vector v(n, 1.0 / std::sqrt(static_cast<double>(n)));
    const std::vector<Vector> probes = {v};
    const auto data = collect_ritz(diag, n, probes);
    const auto c = cdos(data);
    for (std::size_t k = 0; k < n; ++k) {
        CHECK(std::abs(c.per_probe[0].theta[k] - ex.eigenvalues[k]) < 1e-10);
        CHECK(static_cast<double>(n) * c.per_probe[0].rho_sq[k] == doctest::Approx(static_cast<double>(k + 1)));
    }
}

TEST_CASE("Lanczos DOS") {
    SUBCASE("single node is one Gaussian") {
        const auto c = evaluate_dos_lanczos(single({0.0}, {1.0}, 1), 401, 0.1);
        CHECK(std::abs(integrate(c) - 1.0) <= 1e-3);
        const auto peak = std::max_element(c.phi.begin(), c.phi.end()) - c.phi.begin();
        CHECK(std::abs(c.t[static_cast<std::size_t>(peak)]) < 1e-12);
    }
    SUBCASE("matches the blurred exact comb on full Krylov runs") {
        const std::size_t n = 20;
        const auto op = LinearOperator::dense(n, testing::random_symmetric(n, 21));
        const auto ex = dense_eigs(op);
        const Vector v(n, 1.0 / std::sqrt(static_cast<double>(n)));
        const auto diag = LinearOperator::diagonal(ex.eigenvalues);
        const std::vector<Vector> probes = {v};
        const auto data = collect_ritz(diag, n, probes);
        const double blur = 0.3;
        const auto c = evaluate_dos_lanczos(data, 400, blur);
        const auto e = exact_dos(ex, c.t, blur);
        double l1 = 0.0;
        for (std::size_t i = 0; i + 1 < c.size(); ++i)
            l1 += (c.t[i + 1] - c.t[i]) * 0.5 * (std::abs(c.phi[i] - e.phi[i]) + std::abs(c.phi[i + 1] - e.phi[i + 1]));
        CHECK(l1 <= 1e-6);
    }
    SUBCASE("integral over the full window") {
        const auto data = collect_ritz(LinearOperator::diagonal(testing::uniform_values(300, 0, 2, 2)), 40,
                                       generate_probes(300, {.nv = 10}));
        CHECK(std::abs(integrate(evaluate_dos_lanczos(data)) - 1.0) <= 0.01);
        CHECK(default_blur(data) > 0.0);
    }
    SUBCASE("noisy low rank shows spike, gap and mass near one") {
        const auto g = hadamard_lowrank(512, 32, 0.001, 1);
        const auto data = collect_ritz(g.op, 50, generate_probes(512, {.nv = 10}));
        const auto c = evaluate_dos_lanczos(data);
        auto at = [&](double t) {
            const auto it = std::lower_bound(c.t.begin(), c.t.end(), t);
            return c.phi[static_cast<std::size_t>(it - c.t.begin())];
        };
        const double peak = *std::max_element(c.phi.begin(), c.phi.end());
        CHECK(at(0.0) > 0.5 * peak);
        CHECK(at(0.5) < 1e-3 * peak);
        CHECK(at(1.0) > 0.01 * peak);
    }
}

TEST_CASE("rank_lanczos pipeline") {
    std::vector<double> e = testing::uniform_values(700, 0.0, 0.05, 1);
    const auto hi = testing::uniform_values(300, 0.4, 1.0, 2);
    e.insert(e.end(), hi.begin(), hi.end());
    const auto op = LinearOperator::diagonal(e);
    const auto r = rank_lanczos(op);
    CHECK(r.method == "lanczos");
    CHECK(r.eps > 0.05);
    CHECK(r.eps < 0.4);
    CHECK(std::abs(r.mean() - 300.0) <= 0.05 * 300.0);

    LanczosRankOptions o;
    o.strategy = ThresholdStrategy::Tau;
    const auto t = rank_lanczos(op, o);
    CHECK(t.threshold.method == ThresholdMethod::TauGap);
    // the pick is the lightest node of the gap, which may be the lowest signal node
    CHECK(t.eps > 0.05);
    CHECK(t.eps < 0.41);
    CHECK(std::abs(t.mean() - 300.0) <= 0.05 * 300.0);

    o.strategy = ThresholdStrategy::Valley;
    o.eps = 0.2;
    CHECK(rank_lanczos(op, o).eps == 0.2);

    LanczosRankOptions one, four;
    one.threads = 1;
    four.threads = 4;
    CHECK(rank_lanczos(op, one).series.per_probe == rank_lanczos(op, four).series.per_probe);
}
