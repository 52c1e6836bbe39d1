#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "handuse/error.hpp"
#include "handuse/stats.hpp"
#include "oracles.hpp"

using namespace handuse;
using namespace handuse::stats;

TEST_CASE("survival functions against quadrature") {
    for (double z : {-3.0, -1.0, 0.0, 0.5, 1.0, 1.96, 2.5, 4.0, 6.0})
        CHECK(std::abs(normal_sf(z) - oracle::normal_sf(z)) < 1e-10);
    for (double df : {1.0, 2.0, 3.0, 8.0, 15.0})
        for (double x : {0.5, 1.0, 3.0, 7.8, 15.0, 30.0})
            CHECK(std::abs(chi2_sf(x, df) - oracle::chi2_sf(x, df)) < 1e-10);
    CHECK(normal_sf(0) == doctest::Approx(0.5));
    CHECK(student_t_sf(0, 5) == doctest::Approx(0.5));
    CHECK(student_t_sf(2.015048, 5) == doctest::Approx(0.05).epsilon(1e-5));
}

TEST_CASE("average ranks share ties") {
    const std::vector<double> v{3, 1, 3, 2, 3};
    CHECK(average_ranks(v) == std::vector<double>{4, 1, 4, 2, 4});
}

TEST_CASE("signed-rank test examples") {
    const std::vector<double> x{1.83, 0.50, 1.62, 2.48, 1.68, 1.88, 1.55, 3.06, 1.30};
    const std::vector<double> y{0.878, 0.647, 0.598, 2.05, 1.06, 1.29, 1.06, 3.14, 1.29};
    const auto r = wilcoxon_signed_rank(x, y);
    CHECK(r.exact_p);
    CHECK(r.n_effective == 9);
    CHECK(r.p == doctest::Approx(0.0390625).epsilon(1e-12));
    CHECK(r.statistic > 0);
    const auto flipped = wilcoxon_signed_rank(y, x);
    CHECK(flipped.statistic == doctest::Approx(-r.statistic));
    CHECK(flipped.p == doctest::Approx(r.p));

    const auto normal = wilcoxon_signed_rank(x, y, PValueMethod::Normal);
    CHECK_FALSE(normal.exact_p);
    CHECK(normal.p == doctest::Approx(2 * normal_sf(std::abs(normal.statistic))));

    CHECK_THROWS_AS(wilcoxon_signed_rank(std::vector<double>{1, 2}, std::vector<double>{1, 2}), DegenerateSampleError);
    CHECK_THROWS_AS(wilcoxon_signed_rank(std::vector<double>{1, 2}, std::vector<double>{1}), ArgumentError);
}

TEST_CASE("signed-rank p matches full enumeration, ties and zeros included") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 120; ++t) {
        const std::size_t n = 2 + rng() % 11;
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = static_cast<double>(rng() % 7);
            y[i] = static_cast<double>(rng() % 7);
        }
        bool any = false;
        for (std::size_t i = 0; i < n; ++i) any |= x[i] != y[i];
        if (!any) continue;
        CHECK(std::abs(wilcoxon_signed_rank(x, y).p - oracle::wilcoxon_enumerated_p(x, y)) < 1e-12);
    }
}

TEST_CASE("large samples use the normal approximation") {
    std::vector<double> x(30), y(30);
    for (int i = 0; i < 30; ++i) {
        x[static_cast<std::size_t>(i)] = i;
        y[static_cast<std::size_t>(i)] = i % 2 ? i - 1.5 : i + 0.25 * i;
    }
    const auto r = wilcoxon_signed_rank(x, y);
    CHECK_FALSE(r.exact_p);
    CHECK(r.n_effective == 29);
}

TEST_CASE("spearman matches the rank oracle and handles edge cases") {
    std::mt19937_64 rng(9);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 3 + rng() % 20;
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = static_cast<double>(rng() % 6);
            y[i] = static_cast<double>(rng() % 9);
        }
        try {
            const double expected = oracle::spearman_rho(x, y);
            CHECK(std::abs(spearman(x, y).rho - expected) < 1e-12);
        } catch (const UndefinedCorrelationError&) {
            CHECK(!std::isfinite(oracle::spearman_rho(x, y)));
        }
    }
    const std::vector<double> a{1, 2, 3, 4, 5}, b{5, 6, 7, 8, 7.5};
    const auto c = spearman(a, b);
    CHECK(c.rho == doctest::Approx(0.9));
    CHECK(c.n == 5);
    CHECK(c.strength == Strength::VeryStrong);
    CHECK(spearman(a, std::vector<double>{1, 2, 3, 4, 5}).p == 0.0);

    const double nan = std::numeric_limits<double>::quiet_NaN();
    const auto d = spearman(std::vector<double>{1, 2, nan, 4, 5}, std::vector<double>{2, 1, 3, nan, 9});
    CHECK(d.n == 3);
    CHECK_THROWS_AS(spearman(std::vector<double>{1, 2}, std::vector<double>{3, 4}), ArgumentError);
    CHECK_THROWS_AS(spearman(std::vector<double>{1, 1, 1}, std::vector<double>{3, 4, 5}), UndefinedCorrelationError);
}

TEST_CASE("strength bands and stars") {
    CHECK(strength_label(0.05) == Strength::Negligible);
    CHECK(strength_label(-0.10) == Strength::VeryWeak);
    CHECK(strength_label(0.39) == Strength::Weak);
    CHECK(strength_label(0.40) == Strength::Moderate);
    CHECK(strength_label(-0.7) == Strength::Strong);
    CHECK(strength_label(0.8) == Strength::VeryStrong);
    CHECK_THROWS_AS(strength_label(1.01), ArgumentError);
    CHECK(stars_for(0.05) == Stars::None);
    CHECK(stars_for(0.0499) == Stars::One);
    CHECK(stars_for(0.01) == Stars::One);
    CHECK(stars_for(0.0099) == Stars::Two);
    CHECK(stars_for(0.001) == Stars::Two);
    CHECK(stars_for(0.00099) == Stars::Three);
    CHECK(to_string(Stars::Three) == "***");
}

TEST_CASE("friedman against the rank-variance oracle") {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 2 + rng() % 9, k = 2 + rng() % 5;
        ScoreMatrix m(n, std::vector<double>(k));
        for (auto& row : m)
            for (auto& v : row) v = static_cast<double>(rng() % 4);
        double spread = 0;
        for (const auto& row : m)
            for (double v : row) spread += v != row[0];
        const auto r = friedman(m);
        CHECK(r.df == static_cast<int>(k - 1));
        if (spread == 0) {
            CHECK(r.statistic == 0);
            CHECK(r.p == 1);
        } else {
            CHECK(std::abs(r.statistic - oracle::friedman_statistic(m)) < 1e-10);
            CHECK(r.p == doctest::Approx(chi2_sf(r.statistic, static_cast<double>(k - 1))));
        }
    }
    CHECK_THROWS_AS(friedman(ScoreMatrix{{1, 2}}), ArgumentError);
    CHECK_THROWS_AS(friedman(ScoreMatrix{{1}, {2}}), ArgumentError);
    CHECK_THROWS_AS(friedman(ScoreMatrix{{1, 2}, {1}}), ArgumentError);
}

TEST_CASE("dunn-sidak comparisons") {
    const ScoreMatrix m{{0.9, 0.8, 0.5}, {0.95, 0.7, 0.6}, {0.85, 0.75, 0.4}, {0.92, 0.81, 0.55},
                        {0.88, 0.65, 0.6}, {0.91, 0.77, 0.5}};
    const auto rep = dunn_sidak(m);
    REQUIRE(rep.comparisons.size() == 3);
    CHECK(rep.omnibus_significant);
    const auto& c02 = rep.comparisons[1];
    CHECK(c02.method_i == 0);
    CHECK(c02.method_j == 2);
    CHECK(c02.mean_rank_difference == doctest::Approx(3.0 - 1.0));
    const double se = std::sqrt(3.0 * 4.0 / (6.0 * 6.0));
    CHECK(c02.z == doctest::Approx(2.0 / se));
    CHECK(c02.p_raw == doctest::Approx(2 * normal_sf(2.0 / se)));
    CHECK(c02.p_adjusted == doctest::Approx(1 - std::pow(1 - c02.p_raw, 3)));
    CHECK(c02.significant);
}

TEST_CASE("sidak adjustment") {
    for (double p : {1e-9, 1e-4, 0.01, 0.2, 0.5, 0.99})
        for (std::size_t m : {1U, 2U, 6U, 36U})
            CHECK(std::abs(sidak_adjust(p, m) - (1 - std::pow(1 - p, static_cast<double>(m)))) < 1e-12);
    CHECK(sidak_adjust(0.3, 1) == 0.3);
}

TEST_CASE("quartiles interpolate linearly") {
    const std::vector<double> v{4, 1, 3, 2};
    const auto q = quartiles(v);
    CHECK(q.median == doctest::Approx(2.5));
    CHECK(q.q1 == doctest::Approx(1.75));
    CHECK(q.q3 == doctest::Approx(3.25));
    const std::vector<double> one{7};
    CHECK(quartiles(one).q1 == 7);
}
