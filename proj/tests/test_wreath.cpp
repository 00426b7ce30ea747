#include "oracles.hpp"

#include "groupnoise/errors.hpp"
#include "groupnoise/wreath.hpp"

#include <doctest.h>

#include <map>
#include <random>

using namespace groupnoise;

namespace {

constexpr GrigLetter kGens[] = {GrigLetter::a, GrigLetter::b, GrigLetter::c, GrigLetter::d};

char letter_char(GrigLetter g) { return "eabcd"[static_cast<int>(g)]; }

BoundaryPoint random_point(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> len(0, 20), bit(0, 1);
    BoundaryPoint p;
    p.prefix.resize(static_cast<std::size_t>(len(rng)));
    for (auto& b : p.prefix) b = static_cast<std::uint8_t>(bit(rng));
    p.canonicalize();
    return p;
}

// Explicit prefix padded with the 1-tail to `len` letters.
std::vector<int> as_word(const BoundaryPoint& p, std::size_t len) {
    std::vector<int> w(len, 1);
    for (std::size_t i = 0; i < p.prefix.size(); ++i) w[i] = p.prefix[i];
    return w;
}

}  // namespace

TEST_CASE("sws measure") {
    auto mu = sws_measure();
    CHECK(mu.total_mass() == doctest::Approx(1.0));
    CHECK(mu.size() == 8);
    for (const auto& [e, m] : mu.atoms()) CHECK(m == doctest::Approx(0.125));
    CHECK(mu.mass(lamplighter_element({0, 1}, 1)) == doctest::Approx(0.125));
    CHECK(mu.mass(lamplighter_element({-1}, -1)) == doctest::Approx(0.125));
    CHECK(mu.mass(lamplighter_element({}, 1)) == doctest::Approx(0.125));
    double right = 0.0;
    for (const auto& [e, m] : mu.atoms()) {
        CHECK(std::abs(lamplighter_position(e)) == 1);
        if (lamplighter_position(e) == 1) right += m;
    }
    CHECK(right == doctest::Approx(0.5));
}

TEST_CASE("lamplighter range examples") {
    const auto zero = lamplighter_range_stats(0.0, 100, 200, 1);
    CHECK(zero.refreshed_range.mean == 0.0);
    const auto empty = lamplighter_range_stats(0.5, 0, 200, 1);
    CHECK(empty.range.mean == 1.0);
    CHECK(entropy_ns_ratio_lamplighter(1.0, 500, 200, 3).ratio.mean == 1.0);
    CHECK(entropy_ns_ratio_lamplighter(0.0, 500, 200, 3).ratio.mean == 0.0);
    CHECK_THROWS_AS(lamplighter_range_stats(0.5, 10, 50, 1), ConfigError);
}

TEST_CASE("lamplighter traces") {
    for (std::uint64_t r = 0; r < 200; ++r) {
        const auto tr = lamplighter_trace(0.3, 60, 5, r);
        CHECK(tr.positions.size() == 61);
        CHECK(tr.range.size() <= 61);
        CHECK(tr.range.size() == tr.local_times.size());
        CHECK(std::includes(tr.range.begin(), tr.range.end(), tr.refreshed_range.begin(), tr.refreshed_range.end()));
        for (std::size_t t = 1; t < tr.positions.size(); ++t)
            CHECK(std::abs(tr.positions[t] - tr.positions[t - 1]) == 1);
    }
    // The trace and the batch estimator draw the same streams.
    double range = 0.0, refreshed = 0.0;
    for (std::uint64_t r = 0; r < 100; ++r) {
        const auto tr = lamplighter_trace(0.2, 80, 9, r);
        range += static_cast<double>(tr.range.size());
        refreshed += static_cast<double>(tr.refreshed_range.size());
    }
    const auto stats = lamplighter_range_stats(0.2, 80, 100, 9);
    CHECK(stats.range.mean == doctest::Approx(range / 100));
    CHECK(stats.refreshed_range.mean == doctest::Approx(refreshed / 100));
}

TEST_CASE("refreshed ranges are nested in rho") {
    for (std::uint64_t r = 0; r < 100; ++r) {
        std::vector<std::int64_t> prev;
        for (double rho : {0.0, 0.1, 0.3, 0.6, 1.0}) {
            const auto tr = lamplighter_trace(rho, 50, 13, r);
            CHECK(std::includes(tr.refreshed_range.begin(), tr.refreshed_range.end(), prev.begin(), prev.end()));
            prev = tr.refreshed_range;
        }
    }
    double prev = -1.0;
    for (double rho : {0.0, 0.05, 0.2, 0.5, 1.0}) {
        const double v = lamplighter_range_stats(rho, 400, 500, 21).refreshed_range.mean;
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("per-site refresh probability given the path") {
    const double rho = 0.15;
    const int n = 50, reps = 100000;
    std::map<std::size_t, std::pair<double, double>> bucket;  // L -> (sites, refreshed)
    for (int r = 0; r < reps; ++r) {
        const auto tr = lamplighter_trace(rho, n, 31, r);
        for (const auto& [site, times] : tr.local_times) {
            auto& b = bucket[times.size()];
            b.first += 1.0;
            if (std::binary_search(tr.refreshed_range.begin(), tr.refreshed_range.end(), site)) b.second += 1.0;
        }
    }
    int tested = 0;
    for (const auto& [L, b] : bucket) {
        if (b.first < 1000) continue;
        const double p = 1.0 - std::pow(1.0 - rho, static_cast<double>(L));
        const double se = std::sqrt(p * (1 - p) / b.first);
        CAPTURE(L);
        CHECK(std::abs(b.second / b.first - p) <= 3.5 * se);
        ++tested;
    }
    CHECK(tested >= 5);
}

TEST_CASE("grigorchuk action examples") {
    BoundaryPoint o;
    for (auto g : {GrigLetter::b, GrigLetter::c, GrigLetter::d, GrigLetter::e}) CHECK(grig_apply(o, g) == o);
    CHECK(grig_apply(o, GrigLetter::a).prefix == std::vector<std::uint8_t>{0});
}

TEST_CASE("grigorchuk action matches the recursive automaton") {
    std::mt19937_64 rng(41);
    for (int rep = 0; rep < 10000; ++rep) {
        const BoundaryPoint p = random_point(rng);
        for (auto g : kGens) {
            const BoundaryPoint q = grig_apply(p, g);
            CHECK(q.prefix.size() <= p.prefix.size() + 2);
            BoundaryPoint c = q;
            c.canonicalize();
            CHECK(c == q);
            const std::size_t len = std::max(p.prefix.size(), q.prefix.size()) + 4;
            if (rep % 10 == 0) CHECK(as_word(q, len) == oracle::grig_word_action(letter_char(g), as_word(p, len)));
            CHECK(grig_apply(q, g) == p);
        }
        const auto bc = grig_apply(grig_apply(p, GrigLetter::b), GrigLetter::c);
        const auto cb = grig_apply(grig_apply(p, GrigLetter::c), GrigLetter::b);
        const auto d = grig_apply(p, GrigLetter::d);
        CHECK(bc == d);
        CHECK(cb == d);
    }
}

TEST_CASE("inverted orbit examples") {
    CHECK(inverted_orbit({}).points.size() == 1);
    const std::vector<GrigIncrement> a{{0, GrigLetter::e, GrigLetter::a}};
    const auto o = inverted_orbit(a);
    REQUIRE(o.points.size() == 2);
    CHECK(o.points[0].prefix.empty());
    CHECK(o.points[1].prefix == std::vector<std::uint8_t>{0});
    CHECK_THROWS_AS(inverted_orbit(a, std::vector<bool>{}), ConfigError);
}

TEST_CASE("inverted orbit matches naive suffix evaluation") {
    Engine rng = replicate_engine(12, 0);
    std::mt19937_64 mrng(3);
    std::bernoulli_distribution coin(0.2);
    for (int rep = 0; rep < 40; ++rep) {
        const int n = 1 + rep * 5;
        const auto word = sample_grig_word(n, rng);
        std::vector<bool> mask(static_cast<std::size_t>(n));
        for (std::size_t k = 0; k < mask.size(); ++k) mask[k] = coin(mrng);
        const auto fast = inverted_orbit(word, mask);
        const auto [points, refreshed] = oracle::inverted_orbit_naive(word, mask);
        CHECK(fast.points == std::vector<BoundaryPoint>(points.begin(), points.end()));
        CHECK(fast.refreshed == std::vector<BoundaryPoint>(refreshed.begin(), refreshed.end()));
        CHECK(fast.points.size() <= static_cast<std::size_t>(n) + 1);
    }
}

TEST_CASE("orbit statistics") {
    for (double rho : {0.05, 0.2}) {
        const auto s = grigorchuk_orbit_stats(rho, 512, 300, 5);
        CHECK(s.mean_refreshed <= s.mean_orbit);
        CHECK(s.mean_orbit <= 513);
        CHECK(s.mean_refreshed >= rho * s.mean_orbit - 3 * std::hypot(s.se_refreshed, rho * s.se_orbit));
        CHECK(s.lambda_entropy == 1.0);
    }
}

TEST_CASE("lemma bound") {
    CHECK(lemma_entropy_lower_bound(0.0, 1.0, 100) == 0.0);
    CHECK(lemma_entropy_lower_bound(0.5, 1.0, 100) == 50.0);
    const auto s = grigorchuk_orbit_stats(0.3, 256, 200, 1);
    CHECK(lemma_entropy_lower_bound(0.3, 1.0, s.mean_orbit) <= 1.0 * 257);
    CHECK_THROWS_AS(lemma_entropy_lower_bound(1.5, 1.0, 1.0), ConfigError);
}

TEST_CASE("refresh recursion") {
    CHECK(refresh_recursion(0.5, 2).rho1 == doctest::Approx(2.0 / 3.0));
    CHECK(refresh_recursion(0.5, 2).iterations == 0);
    CHECK(refresh_recursion(1e-9, 3).rho1 < 1e-8);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> r(1e-4, 0.999);
    std::uniform_int_distribution<int> d(2, 12);
    for (int i = 0; i < 100; ++i) {
        const double rho = r(rng);
        const auto out = refresh_recursion(rho, d(rng));
        CHECK(out.rho1 > rho);
        CHECK(out.iterations >= 0);
    }
    CHECK_THROWS_AS(refresh_recursion(0.0, 2), ConfigError);
    CHECK_THROWS_AS(refresh_recursion(0.5, 1), ConfigError);
}
