#include "specrank/error.hpp"
#include "specrank/gen.hpp"
#include "specrank/kpm.hpp"
#include "specrank/oracle.hpp"
#include "support.hpp"

#include <doctest.h>

#include <numbers>

using namespace specrank;

namespace {

double cheb_sum(const std::vector<double>& c, const std::vector<double>& g, double x) {
    double s = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) s += g[k] * c[k] * std::cos(static_cast<double>(k) * std::acos(x));
    return s;
}

}  // namespace

TEST_CASE("damping factors") {
    // mpmath reference values, m = 10
    const std::vector<double> jackson = {1.0,
                                         0.96592582628906828675,
                                         0.87718995346906875953,
                                         0.75024328870363431813,
                                         0.60267090063073977446,
                                         0.45138479798094981009,
                                         0.31100423396407310779,
                                         0.19256575287842904774,
                                         0.10267090063073977446,
                                         0.043136507517086793725,
                                         0.01116454968463011277};
    const std::vector<double> sigma = {1.0,
                                       0.98646083912710205269,
                                       0.94650224388831548428,
                                       0.88206272365255806559,
                                       0.79624835650368565609,
                                       0.69315389111626959647,
                                       0.57762824259689133039,
                                       0.45499906085924894633,
                                       0.3307735213697092746,
                                       0.21033383197518121873,
                                       0.098646083912710205269};
    const auto gj = damping_factors(DampingKind::Jackson, 10);
    const auto gs = damping_factors(DampingKind::LanczosSigma, 10);
    for (int k = 0; k <= 10; ++k) {
        CHECK(std::abs(gj[k] - jackson[k]) < 1e-14);
        CHECK(std::abs(gs[k] - sigma[k]) < 1e-14);
    }
    CHECK(damping_factors(DampingKind::None, 4) == std::vector<double>(5, 1.0));

    const auto g50 = damping_factors(DampingKind::Jackson, 50);
    CHECK(g50[0] == doctest::Approx(1.0).epsilon(1e-15));
    for (std::size_t k = 1; k < g50.size(); ++k) CHECK(g50[k] < g50[k - 1]);
    CHECK(g50.back() < 0.01);
}

TEST_CASE("step coefficients") {
    const auto full = step_coeffs(-1.0, 1.0, 20);
    CHECK(full[0] == 1.0);
    for (std::size_t k = 1; k < full.size(); ++k) CHECK(full[k] == 0.0);

    CHECK(step_coeffs(0.0, 1.0, 3)[0] == doctest::Approx(0.5).epsilon(1e-15));

    // mpmath reference for [0.3, 1]
    const std::vector<double> ref = {0.4030133159793217095,  0.60729655725856826897, 0.18218896717757048069,
                                     -0.12955659888182789738, -0.14939495308560779417, 0.0060243818480049972282};
    const auto g = step_coeffs(0.3, 1.0, 5);
    for (int k = 0; k <= 5; ++k) CHECK(std::abs(g[k] - ref[k]) < 1e-14);

    const auto c = step_coeffs(0.3, 1.0, 100);
    const auto jd = damping_factors(DampingKind::Jackson, 100);
    CHECK(std::abs(cheb_sum(c, jd, 0.7) - 1.0) <= 0.05);
    CHECK(std::abs(cheb_sum(c, jd, -0.5)) <= 0.05);

    CHECK_THROWS_AS(step_coeffs(0.5, 0.5, 4), InvalidArgument);
    CHECK_THROWS_AS(step_coeffs(-1.5, 0.5, 4), InvalidArgument);
}

TEST_CASE("step coefficients equal the Chebyshev projection of the indicator") {
    // Independent route: gamma_k = (2 - delta_k0)/pi * integral over [acos b, acos a] of cos(k u) du,
    // evaluated with composite Simpson on a fine grid.
    const double a = -0.2, b = 0.6;
    const auto g = step_coeffs(a, b, 30);
    const double lo = std::acos(b), hi = std::acos(a);
    const int panels = 20000;
    for (int k = 0; k <= 30; ++k) {
        double s = 0.0;
        const double h = (hi - lo) / panels;
        for (int i = 0; i <= panels; ++i) {
            const double w = (i == 0 || i == panels) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            s += w * std::cos(k * (lo + i * h));
        }
        s *= h / 3.0;
        const double proj = (k == 0 ? 1.0 : 2.0) / std::numbers::pi * s;
        CHECK(std::abs(proj - g[static_cast<std::size_t>(k)]) < 1e-10);
    }
}

TEST_CASE("chebyshev_moments trivial operators") {
    SUBCASE("zero operator") {
        const auto b = LinearOperator::diagonal(std::vector<double>(6, 0.0));
        const auto probes = generate_probes(6, {.nv = 3});
        const auto mom = chebyshev_moments(b, 8, probes);
        for (std::size_t l = 0; l < 3; ++l) {
            CHECK(mom.Y(0, l) == doctest::Approx(1.0).epsilon(1e-14));
            for (std::size_t k = 1; k <= 8; k += 2) CHECK(mom.Y(k, l) == 0.0);
            for (std::size_t k = 2; k <= 8; k += 2)
                CHECK(mom.Y(k, l) == doctest::Approx(k % 4 == 0 ? 1.0 : -1.0).epsilon(1e-14));
        }
        CHECK(mom.mu[0] == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-10));
    }
    SUBCASE("one by one at t = 1") {
        const auto b = LinearOperator::diagonal({1.0});
        const std::vector<Vector> probes = {{1.0}};
        const auto mom = chebyshev_moments(b, 12, probes);
        for (std::size_t k = 0; k <= 12; ++k) CHECK(mom.Y(k, 0) == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("blow-up is detected") {
        const auto b = LinearOperator::diagonal({3.0, 0.0});
        const auto probes = generate_probes(2, {.nv = 1});
        CHECK_THROWS_AS(chebyshev_moments(b, 40, probes), BlowUpError);
    }
}

TEST_CASE("stochastic moments agree with exact moments") {
    const std::size_t n = 1000;
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = -0.9 + 1.8 * static_cast<double>(i) / (n - 1);
    const auto b = LinearOperator::diagonal(d);
    const auto probes = generate_probes(n, {.nv = 30, .seed = 5});
    const auto mom = chebyshev_moments(b, 50, probes);
    const auto ex = exact_moments(d, 50, {});
    for (std::size_t k = 0; k <= 50; ++k) {
        std::vector<double> per(30);
        for (std::size_t l = 0; l < 30; ++l) per[l] = (k == 0 ? 1.0 : 2.0) / std::numbers::pi * mom.Y(k, l);
        const auto s = running_average(per);
        CHECK(std::abs(mom.mu[k] - ex.mu[k]) <= 3.0 * s.standard_error() + 1e-12);
    }
}

TEST_CASE("exact moments") {
    SUBCASE("frozen reference") {
        // mpmath reference for eigenvalues {0.1, 0.4, 0.4, 0.9} on the window [0, 1]
        const std::vector<double> ref = {0.31830988618379067154, -0.063661977236758120172, -0.20371832715762599586,
                                         0.18080001535239306581, -0.047873806882042024721};
        const auto mom = exact_moments(std::vector<double>{0.1, 0.4, 0.4, 0.9}, 4, {0.0, 1.0});
        for (int k = 0; k <= 4; ++k) CHECK(std::abs(mom.mu[k] - ref[k]) < 1e-15);
    }
    SUBCASE("all at the window centre") {
        const auto mom = exact_moments(std::vector<double>(5, 2.0), 6, {1.0, 3.0});
        for (std::size_t k = 0; k <= 6; ++k) {
            const double tk = (k % 2) ? 0.0 : (k % 4 == 0 ? 1.0 : -1.0);
            CHECK(std::abs(mom.mu[k] - (k == 0 ? 1.0 : 2.0) / std::numbers::pi * tk) < 1e-15);
        }
    }
    SUBCASE("single eigenvalue at the window top") {
        const std::vector<double> e = {1.0, -0.3, 0.2};
        const auto mom = exact_moments(std::vector<double>{1.0}, 5, {});
        for (std::size_t k = 0; k <= 5; ++k)
            CHECK(mom.mu[k] == doctest::Approx((k == 0 ? 1.0 : 2.0) / std::numbers::pi).epsilon(1e-14));
    }
    CHECK_THROWS_AS(exact_moments(std::vector<double>{2.0}, 5, {}), InvalidArgument);
}

TEST_CASE("evaluate_dos") {
    SUBCASE("only mu_0: arcsine shape") {
        ChebyshevMoments mom;
        mom.mu = {1.0 / std::numbers::pi, 0.0, 0.0, 0.0};
        mom.degree = 3;
        mom.n = 1;
        const auto c = evaluate_dos(mom, DampingKind::None, 64);
        for (std::size_t i = 0; i < c.size(); ++i) {
            const double expect = 1.0 / (std::numbers::pi * std::sqrt(1.0 - c.t[i] * c.t[i]));
            CHECK(c.phi[i] == doctest::Approx(expect).epsilon(1e-12));
        }
        CHECK(std::is_sorted(c.t.begin(), c.t.end()));
    }
    SUBCASE("zeros plus uniform plateau") {
        std::vector<double> e(300, 0.0);
        const auto plateau = testing::uniform_values(700, 0.2, 2.5, 3);
        e.insert(e.end(), plateau.begin(), plateau.end());
        const SpectralWindow w{-0.025, 2.525};
        const auto c = evaluate_dos(exact_moments(e, 100, w), DampingKind::Jackson, 400);
        CHECK(std::abs(integrate(c) - 1.0) <= 0.05);
        auto at = [&](double t) {
            const auto it = std::lower_bound(c.t.begin(), c.t.end(), t);
            return c.phi[static_cast<std::size_t>(it - c.t.begin())];
        };
        const double peak = *std::max_element(c.phi.begin(), c.phi.end());
        CHECK(at(0.0) > 0.9 * peak);
        CHECK(at(0.12) < 0.02 * peak);
        CHECK(at(1.3) > 0.2);
        CHECK(at(1.3) < 0.45);
        for (double v : c.phi) CHECK(v >= 0.0);
    }
}

TEST_CASE("count_eigs_kpm") {
    const std::size_t n = 1000;
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = static_cast<double>(i) / (n - 1);  // 100 values in (0.45, 0.55]
    const auto op = LinearOperator::diagonal(d);
    const auto bounds = spectrum_bounds(op, {.assume_psd = true});
    const auto b = shift_scale(op, bounds.lambda_min, bounds.lambda_max);
    const auto probes = generate_probes(n, {.nv = 30});
    const auto mom = chebyshev_moments(b, 100, probes);

    SUBCASE("full window gives n for every probe") {
        const auto s = count_eigs_kpm(mom, bounds.lambda_min, bounds.lambda_max, DampingKind::None);
        for (double x : s.per_probe) CHECK(std::abs(x - static_cast<double>(n)) <= 1e-6 * n);
    }
    SUBCASE("interval count near the oracle") {
        const double a = 0.45, bb = 0.55;
        const auto exact = exact_count(dense_eigs(op), a, bb);
        CHECK(exact == 100);
        const auto s = count_eigs_kpm(mom, a, bb, DampingKind::Jackson);
        CHECK(s.mean() >= 90.0);
        CHECK(s.mean() <= 110.0);
    }
    SUBCASE("additivity per probe") {
        for (auto damping : {DampingKind::None, DampingKind::Jackson, DampingKind::LanczosSigma}) {
            const auto x = count_eigs_kpm(mom, 0.1, 0.4, damping);
            const auto y = count_eigs_kpm(mom, 0.4, 0.8, damping);
            const auto z = count_eigs_kpm(mom, 0.1, 0.8, damping);
            for (std::size_t l = 0; l < 30; ++l)
                CHECK(std::abs(x.per_probe[l] + y.per_probe[l] - z.per_probe[l]) <= 1e-10 * n);
        }
    }
}

TEST_CASE("rank_kpm") {
    SUBCASE("noiseless low rank with eps supplied") {
        const auto g = hadamard_lowrank(512, 32, 0.0, 0);
        KpmRankOptions o;
        o.eps = 0.5;
        const auto r = rank_kpm(g.op, o);
        CHECK(r.threshold.method == ThresholdMethod::Manual);
        CHECK(std::abs(r.mean() - 32.0) <= 4.0 * r.series.standard_error() + 0.5);
    }
    SUBCASE("automatic threshold inside the gap of a planted spectrum") {
        std::vector<double> e = testing::uniform_values(700, 0.0, 0.05, 1);
        const auto hi = testing::uniform_values(300, 0.4, 1.0, 2);
        e.insert(e.end(), hi.begin(), hi.end());
        const auto r = rank_kpm(LinearOperator::diagonal(e));
        CHECK(r.eps > 0.05);
        CHECK(r.eps < 0.4);
        CHECK(std::abs(r.mean() - 300.0) <= 0.05 * 300.0);
        CHECK(r.dos.size() == kDefaultGridPoints);
        CHECK(r.series.per_probe.size() == 30);
    }
    SUBCASE("tau strategy needs Lanczos data") {
        KpmRankOptions o;
        o.strategy = ThresholdStrategy::Tau;
        CHECK_THROWS_AS(rank_kpm(LinearOperator::diagonal({1, 2, 3}), o), InvalidArgument);
    }
    SUBCASE("zero matrix with eps supplied counts nothing") {
        KpmRankOptions o;
        o.eps = 0.5;
        const auto r = rank_kpm(LinearOperator::diagonal(std::vector<double>(50, 0.0)), o);
        CHECK(std::abs(r.mean()) <= 1e-9);
    }
    SUBCASE("no gap raises with the curve attached") {
        std::vector<double> e(400);
        for (std::size_t i = 0; i < e.size(); ++i) e[i] = static_cast<double>(i) / 399.0;
        try {
            rank_kpm(LinearOperator::diagonal(e));
            FAIL("expected NoGapError");
        } catch (const NoGapError& err) {
            REQUIRE(err.curve().has_value());
            CHECK(err.curve()->size() == kDefaultGridPoints);
        }
    }
    SUBCASE("thread count never changes results") {
        const auto g = hadamard_lowrank(256, 16, 0.002, 3);
        KpmRankOptions o;
        o.threads = 1;
        const auto a = rank_kpm(g.op, o);
        o.threads = 4;
        const auto b = rank_kpm(g.op, o);
        CHECK(a.series.per_probe == b.series.per_probe);
        CHECK(a.eps == b.eps);
        CHECK(a.dos.phi == b.dos.phi);
    }
}
