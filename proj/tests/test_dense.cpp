#include "groupnoise/dense_measure.hpp"
#include "groupnoise/errors.hpp"
#include "groupnoise/experiment.hpp"

#include <doctest.h>

#include <cstdlib>
#include <string>

using namespace groupnoise;

namespace {

struct ThreadsEnv {
    explicit ThreadsEnv(int n) { setenv("GROUPNOISE_THREADS", std::to_string(n).c_str(), 1); }
    ~ThreadsEnv() { unsetenv("GROUPNOISE_THREADS"); }
};

void check_same(const DenseMeasure& dense, const SparseMeasure& sparse, double tol) {
    const auto back = dense.to_sparse();
    CHECK(l1_distance(back, sparse) <= tol);
    CHECK(dense.atom_count() == sparse.size());
}

}  // namespace

TEST_CASE("dense powers match sparse convolution") {
    const std::vector<std::pair<std::string, std::string>> cases{
        {"Z", "simple"}, {"Z^2", "lazy"}, {"Z/5", "lazy"}, {"D_inf", "simple"}, {"D_inf", "lazy"},
        {"D_inf x D_inf", "simple"}, {"Z/2 x Z/3", "simple"}};
    for (const auto& [spec, preset] : cases) {
        CAPTURE(spec);
        auto mu = make_measure(parse_group_spec(spec), preset);
        for (double rho : {0.0, 0.3, 1.0}) {
            auto step = noise_step_measure(mu, rho);
            ConvolutionPower power(step);
            for (int n : {0, 1, 2, 7, 12}) {
                const auto& d = power.advance_to(n);
                check_same(d, nth_convolution(step, n), 1e-13);
            }
        }
    }
}

TEST_CASE("dense convolve, marginals, entropy and l1") {
    auto mu = make_measure(parse_group_spec("D_inf"), "lazy");
    auto pi = nth_convolution(noise_step_measure(mu, 0.4), 6);
    auto mu6 = nth_convolution(mu, 6);
    auto dpi = DenseMeasure::from_sparse(pi);
    auto dmu = DenseMeasure::from_sparse(mu6);
    CHECK(entropy(dpi) == doctest::Approx(entropy(pi)).epsilon(1e-13));
    CHECK(l1_distance(marginal(dpi, Side::First).to_sparse(), mu6) <= 1e-13);
    CHECK(l1_distance(marginal(dpi, Side::Second).to_sparse(), mu6) <= 1e-13);
    const double expected = l1_distance(pi, product_measure(mu6, mu6));
    CHECK(l1_to_product(dpi, dmu, dmu) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(l1_distance(dmu, dmu) == 0.0);
    auto stepped = convolve(dmu, mu);
    CHECK(l1_distance(stepped.to_sparse(), nth_convolution(mu, 7)) <= 1e-13);
    CHECK(dpi.mass(pi.atoms().front().first) == pi.atoms().front().second);
}

TEST_CASE("l1 to uniform on a finite group") {
    auto mu = make_measure(Group::cyclic(5), "lazy");
    ConvolutionPower power(mu);
    const double d1 = l1_to_uniform(power.advance_to(1));
    CHECK(d1 == doctest::Approx(2.0 * (1.0 - 3.0 / 5.0)));
    const double d50 = l1_to_uniform(power.advance_to(50));
    CHECK(d50 < d1);
    CHECK_THROWS_AS(l1_to_uniform(DenseMeasure::dirac_identity(Group::lattice(1))), SpecMismatch);
}

TEST_CASE("dense results do not depend on the thread count") {
    auto mu = make_measure(parse_group_spec("D_inf"), "lazy");
    auto step = noise_step_measure(mu, 0.3);
    std::vector<double> l1s, hs;
    for (int threads : {1, 3, 8}) {
        ThreadsEnv env(threads);
        ConvolutionPower pair(step), single(mu);
        const auto& p = pair.advance_to(200);
        const auto& m = single.advance_to(200);
        l1s.push_back(l1_to_product(p, m, m));
        hs.push_back(entropy(p));
    }
    CHECK(l1s[0] == l1s[1]);
    CHECK(l1s[0] == l1s[2]);
    CHECK(hs[0] == hs[1]);
    CHECK(hs[0] == hs[2]);
}

TEST_CASE("dense budget") {
    auto mu = make_measure(parse_group_spec("Z"), "simple");
    ConvolutionPower power(noise_step_measure(mu, 0.5), 100);
    try {
        power.advance_to(50);
        FAIL("expected BudgetExceeded");
    } catch (const BudgetExceeded& e) {
        CHECK(e.step_reached() < 50);
        CHECK(e.step_reached() >= 4);
    }
    CHECK_THROWS_AS(ConvolutionPower(make_measure(Group::free(2), "simple")), SpecMismatch);
}
