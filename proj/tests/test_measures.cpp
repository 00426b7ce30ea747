#include "oracles.hpp"

#include "groupnoise/errors.hpp"
#include "groupnoise/experiment.hpp"
#include "groupnoise/measure.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace groupnoise;

namespace {

SparseMeasure simple_z() { return make_measure(Group::lattice(1), "simple"); }

SparseMeasure random_measure(const GroupPtr& g, const std::vector<Element>& pool, std::mt19937_64& rng,
                             std::size_t max_atoms) {
    std::uniform_int_distribution<std::size_t> count(1, max_atoms), pick(0, pool.size() - 1);
    std::uniform_real_distribution<double> w(0.05, 1.0);
    std::vector<SparseMeasure::Atom> atoms;
    const std::size_t k = count(rng);
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        atoms.emplace_back(pool[pick(rng)], w(rng));
        total += atoms.back().second;
    }
    for (auto& a : atoms) a.second /= total;
    return SparseMeasure::from_atoms(g, std::move(atoms));
}

double sum_min(const SparseMeasure& a, const SparseMeasure& b) {
    double s = 0.0;
    for (const auto& [e, m] : a.atoms()) s += std::min(m, b.mass(e));
    return s;
}

}  // namespace

TEST_CASE("from_atoms merges and validates") {
    auto Z = Group::lattice(1);
    auto m = SparseMeasure::from_atoms(Z, {{Element{1}, 0.25}, {Element{1}, 0.25}, {Element{-1}, 0.5}, {Element{3}, 0.0}});
    CHECK(m.size() == 2);
    CHECK(m.mass(Element{1}) == doctest::Approx(0.5));
    CHECK(m.mass(Element{3}) == 0.0);
    CHECK_THROWS_AS(SparseMeasure::from_atoms(Z, {{Element{0}, 0.5}}), ConfigError);
}

TEST_CASE("noise step measure examples") {
    auto F = Group::free(2);
    const Element a{1}, b{2};
    auto mu = SparseMeasure::uniform(F, std::vector<Element>{a, b});
    auto pi = noise_step_measure(mu, 0.5);
    auto P = pi.group();
    CHECK(pi.mass(P->pair(a, a)) == doctest::Approx(0.375));
    CHECK(pi.mass(P->pair(a, b)) == doctest::Approx(0.125));
    auto diag = noise_step_measure(mu, 0.0);
    CHECK(diag.size() == 2);
    CHECK(l1_distance(noise_step_measure(mu, 1.0), product_measure(mu, mu)) < 1e-15);
    CHECK_THROWS_AS(noise_step_measure(mu, 1.5), ConfigError);
    CHECK_THROWS_AS(noise_step_measure(mu, -0.1), ConfigError);
}

TEST_CASE("nth_convolution examples") {
    auto mu = simple_z();
    CHECK(nth_convolution(mu, 0).atoms() == SparseMeasure::dirac(mu.group(), Element{0}).atoms());
    CHECK(l1_distance(nth_convolution(mu, 1), mu) == 0.0);
    auto m4 = nth_convolution(mu, 4);
    CHECK(m4.mass(Element{0}) == doctest::Approx(6.0 / 16.0).epsilon(1e-15));
    CHECK(m4.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("budget exhaustion reports the step reached") {
    auto mu = make_measure(Group::free(2), "simple");
    try {
        nth_convolution(mu, 10, 100);
        FAIL("expected BudgetExceeded");
    } catch (const BudgetExceeded& e) {
        CHECK(e.step_reached() == 3);
    }
}

TEST_CASE("entropy examples") {
    auto Z = Group::lattice(1);
    CHECK(entropy(SparseMeasure::dirac(Z, Element{5})) == 0.0);
    const std::vector<Element> four{Element{0}, Element{1}, Element{2}, Element{3}};
    CHECK(entropy(SparseMeasure::uniform(Z, four)) == doctest::Approx(2.0));
    auto m = SparseMeasure::from_atoms(Z, {{Element{0}, 0.25}, {Element{1}, 0.5}, {Element{2}, 0.25}});
    CHECK(entropy(m) == doctest::Approx(1.5));
}

TEST_CASE("l1 examples and identity") {
    auto Z = Group::lattice(1);
    auto a = SparseMeasure::from_atoms(Z, {{Element{0}, 0.5}, {Element{1}, 0.5}});
    auto b = SparseMeasure::from_atoms(Z, {{Element{0}, 0.25}, {Element{1}, 0.75}});
    CHECK(l1_distance(a, a) == 0.0);
    CHECK(l1_distance(a, b) == doctest::Approx(0.5));
    CHECK(l1_distance(a, SparseMeasure::dirac(Z, Element{7})) == doctest::Approx(2.0));

    std::mt19937_64 rng(9);
    std::vector<Element> pool;
    for (int i = -5; i <= 5; ++i) pool.push_back(Element{i});
    for (int rep = 0; rep < 200; ++rep) {
        auto x = random_measure(Z, pool, rng, 6), y = random_measure(Z, pool, rng, 6);
        CHECK(l1_distance(x, y) == doctest::Approx(2.0 * (1.0 - sum_min(x, y))).epsilon(1e-12));
    }
}

TEST_CASE("conditional entropy examples") {
    auto mu = simple_z();
    for (int n : {1, 3, 5}) {
        CHECK(std::abs(conditional_entropy_exact(mu, 0.0, n)) < 1e-9);
        CHECK(conditional_entropy_exact(mu, 1.0, n) == doctest::Approx(entropy(nth_convolution(mu, n))).epsilon(1e-12));
    }
}

TEST_CASE("conditional entropy matches enumeration on Z, n=4, rho=0.5") {
    auto mu = simple_z();
    const auto law = oracle::enumerate_pair_law(mu, 0.5, 4);
    std::vector<double> joint;
    for (const auto& [k, p] : law) joint.push_back(p);
    const double expected = oracle::entropy_bits(joint) - entropy(nth_convolution(mu, 4));
    CHECK(std::abs(conditional_entropy_exact(mu, 0.5, 4) - expected) <= 1e-9);
}

TEST_CASE("chain rule against enumeration for small supports") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const std::vector<GroupPtr> groups{Group::lattice(1), Group::dihedral(), Group::free(2), Group::cyclic(5)};
    for (const auto& g : groups) {
        std::vector<Element> pool{g->identity()};
        for (const auto& gen : g->generators()) pool.push_back(gen.element);
        for (int rep = 0; rep < 4; ++rep) {
            auto mu = random_measure(g, pool, rng, 3);
            const double rho = unif(rng);
            for (int n = 1; n <= 5; ++n) {
                const auto law = oracle::enumerate_pair_law(mu, rho, n);
                std::vector<double> joint;
                for (const auto& [k, p] : law) joint.push_back(p);
                const double hx = entropy(nth_convolution(mu, n));
                const double expected = oracle::entropy_bits(joint) - hx;
                const double got = conditional_entropy_exact(mu, rho, n);
                CAPTURE(g->name());
                CAPTURE(n);
                CHECK(got >= -1e-9);
                CHECK(std::abs(got - expected) <= 1e-9);
            }
        }
    }
}

TEST_CASE("pair law marginals and swap symmetry") {
    auto mu = simple_z();
    auto pi8 = nth_convolution(noise_step_measure(mu, 0.3), 8);
    auto mu8 = nth_convolution(mu, 8);
    for (Side side : {Side::First, Side::Second}) {
        auto m = marginal(pi8, side);
        for (const auto& [e, p] : mu8.atoms()) CHECK(std::abs(m.mass(e) - p) <= 1e-12);
        CHECK(m.size() == mu8.size());
    }
    auto P = pi8.group();
    for (const auto& [e, p] : pi8.atoms()) {
        auto [x, y] = P->split(e);
        CHECK(std::abs(p - pi8.mass(P->pair(y, x))) <= 1e-12);
    }
    auto diag = noise_step_measure(mu, 0.0);
    CHECK(l1_distance(marginal(diag, Side::First), mu) == 0.0);
    CHECK(l1_distance(marginal(diag, Side::Second), mu) == 0.0);
    auto lazy = make_measure(Group::lattice(1), "lazy");
    CHECK(l1_distance(marginal(product_measure(mu, lazy), Side::First), mu) < 1e-15);
}

TEST_CASE("quotient contraction") {
    std::mt19937_64 rng(33);
    auto D = Group::dihedral();
    auto C2 = Group::cyclic(2);
    auto Z = Group::lattice(1);
    auto C3 = Group::cyclic(3);
    std::vector<Element> dpool, zpool;
    for (int p = -6; p <= 6; ++p) dpool.push_back(dihedral_from_position(*D, p));
    for (int p = -6; p <= 6; ++p) zpool.push_back(Element{p});
    auto parity = [&](const Element& e) { return Element{((dihedral_position(*D, e) % 2) + 2) % 2}; };
    auto mod3 = [](const Element& e) { return Element{((e.code[0] % 3) + 3) % 3}; };
    for (int rep = 0; rep < 100; ++rep) {
        auto a = random_measure(D, dpool, rng, 6), b = random_measure(D, dpool, rng, 6);
        CHECK(l1_distance(pushforward(a, C2, parity), pushforward(b, C2, parity)) <= l1_distance(a, b) + 1e-15);
        auto x = random_measure(Z, zpool, rng, 6), y = random_measure(Z, zpool, rng, 6);
        CHECK(l1_distance(pushforward(x, C3, mod3), pushforward(y, C3, mod3)) <= l1_distance(x, y) + 1e-15);
    }
}

TEST_CASE("entropy homogeneity") {
    auto Z = Group::lattice(1);
    const std::vector<Element> four{Element{0}, Element{1}, Element{2}, Element{3}};
    auto u4 = SparseMeasure::uniform(Z, four);
    CHECK(entropy_homogeneity(u4, 0.0).value == 0.0);
    CHECK(entropy_homogeneity(u4, 1.0).value == doctest::Approx(1.0));
    CHECK(entropy_homogeneity(u4, 0.25).value == doctest::Approx(0.25));
    CHECK_THROWS_AS(entropy_homogeneity(SparseMeasure::dirac(Z, Element{0}), 0.5), ConfigError);

    auto m = nth_convolution(simple_z(), 20);
    double prev = -1.0;
    for (double eps = 0.0; eps <= 1.0; eps += 0.05) {
        const auto h = entropy_homogeneity(m, eps);
        CHECK(h.value >= prev - 1e-15);
        CHECK(h.value <= 1.0 + 1e-12);
        CHECK(h.gap >= 0.0);
        prev = h.value;
    }
}

TEST_CASE("spread homogeneity") {
    auto Z = Group::lattice(1);
    auto P = product_group(Z, Z);
    auto two = SparseMeasure::from_atoms(P, {{P->pair(Element{0}, Element{0}), 0.5}, {P->pair(Element{0}, Element{1}), 0.5}});
    CHECK(spread_homogeneity(two, 0.0).value == 0.0);
    CHECK(spread_homogeneity(two, 0.5).value == doctest::Approx(1.0));
    CHECK(spread_homogeneity(two, 1.0).value == doctest::Approx(1.0));
    CHECK_THROWS_AS(spread_homogeneity(SparseMeasure::dirac(P, P->identity()), 0.5), ConfigError);
}

TEST_CASE("asymptotic entropy profile") {
    const std::vector<int> ns{16, 64, 256};
    auto prof = asymptotic_entropy_profile(simple_z(), ns);
    REQUIRE(prof.size() == 3);
    CHECK(prof[0].entropy_rate > prof[1].entropy_rate);
    CHECK(prof[1].entropy_rate > prof[2].entropy_rate);
    auto Z = Group::lattice(1);
    for (const auto& p : asymptotic_entropy_profile(SparseMeasure::dirac(Z, Element{0}), ns)) CHECK(p.entropy_rate == 0.0);
    auto fin = asymptotic_entropy_profile(make_measure(Group::cyclic(5), "lazy"), ns);
    CHECK(fin.back().entropy_rate <= std::log2(5.0) / 256 + 1e-12);
    const std::vector<int> bad{4, 4};
    CHECK_THROWS_AS(asymptotic_entropy_profile(simple_z(), bad), ConfigError);
}

TEST_CASE("atom list serialization round trip") {
    auto pi = nth_convolution(noise_step_measure(make_measure(Group::dihedral(), "lazy"), 0.3), 5);
    std::stringstream ss;
    write_atoms(ss, pi);
    auto back = read_atoms(ss, pi.group());
    REQUIRE(back.size() == pi.size());
    for (std::size_t i = 0; i < pi.size(); ++i) {
        CHECK(back.atoms()[i].first == pi.atoms()[i].first);
        CHECK(back.atoms()[i].second == doctest::Approx(pi.atoms()[i].second).epsilon(1e-15));
    }
}

TEST_CASE("mismatched groups are rejected") {
    auto a = simple_z();
    auto b = make_measure(Group::lattice(2), "simple");
    CHECK_THROWS_AS(l1_distance(a, b), SpecMismatch);
}

TEST_CASE("mass conservation") {
    for (const auto& g : {Group::dihedral(), Group::lamplighter(), Group::free(2)}) {
        auto pi = nth_convolution(noise_step_measure(make_measure(g, "simple"), 0.4), 4);
        CHECK(std::abs(pi.total_mass() - 1.0) <= 1e-12);
    }
}
