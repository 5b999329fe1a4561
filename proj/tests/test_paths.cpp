#include <doctest.h>

#include <cmath>

#include "aklab/brownian.hpp"
#include "aklab/rng.hpp"
#include "aklab/stats.hpp"

using namespace aklab;

TEST_CASE("make_grid basics") {
    const Grid g1 = make_grid(1, 1.0);
    CHECK(g1.nodes() == std::vector<double>{0.0, 1.0});
    CHECK(g1.mesh() == 1.0);

    const Grid g4 = make_grid(4, 1.0);
    CHECK(g4.nodes() == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});

    const Grid gh = make_grid(2, 0.5);
    CHECK(gh.nodes() == std::vector<double>{0.0, 0.25, 0.5});
    CHECK(gh.mesh() == doctest::Approx(0.25));

    CHECK_THROWS_AS(make_grid(0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(4, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(4, 1.5), std::invalid_argument);
}

TEST_CASE("grid refinement keeps node times bit-identical") {
    for (int n : {1, 3, 4, 10, 12}) {
        const Grid g(n, 1.0);
        const Grid r = g.refined(2);
        for (std::size_t j = 0; j < g.num_nodes(); ++j)
            CHECK(g.node(j) == r.node(2 * j));
    }
}

TEST_CASE("normal quantile round-trips the cdf") {
    for (double p : {1e-12, 1e-6, 0.01, 0.3, 0.5, 0.9, 0.999, 1 - 1e-9}) {
        const double z = normal_quantile(p);
        CHECK(normal_cdf(z) == doctest::Approx(p).epsilon(1e-10));
    }
    CHECK(normal_quantile(0.5) == 0.0);
}

TEST_CASE("philox stream decorrelates counters") {
    // Different indices must give different outputs; identical keys identical.
    CHECK(Philox::block(1, 2, 3, 4) == Philox::block(1, 2, 3, 4));
    CHECK(Philox::block(1, 2, 3, 4) != Philox::block(1, 2, 3, 5));
    CHECK(Philox::block(1, 2, 3, 4) != Philox::block(2, 2, 3, 4));
}

TEST_CASE("sampling is reproducible and starts at zero") {
    const Grid g(64, 1.0);
    const BrownianPath a = sample_brownian(g, 7, 11);
    const BrownianPath b = sample_brownian(g, 7, 11);
    CHECK(a.values == b.values);
    CHECK(a.values[0] == 0.0);

    const BrownianPath c = sample_brownian(g, 7, 12);
    CHECK(a.values != c.values);
}

TEST_CASE("bridge refinement extends the same trajectory") {
    for (int n : {1, 2, 5, 6, 64}) {
        const Grid g(n, 1.0);
        const Grid r = g.refined(2);
        const BrownianPath coarse = sample_brownian(g, 123, 5);
        const BrownianPath fine = sample_brownian(r, 123, 5);
        for (std::size_t j = 0; j < coarse.values.size(); ++j)
            CHECK(coarse.values[j] == fine.values[2 * j]);
    }
}

TEST_CASE("terminal variance matches the Monte Carlo band") {
    const Grid g(1, 1.0);
    std::vector<double> w1(100000);
    for (std::size_t p = 0; p < w1.size(); ++p)
        w1[p] = sample_brownian(g, 2024, p).terminal();
    const double var = sample_variance(w1);
    CHECK(var > 0.97);
    CHECK(var < 1.03);
}

TEST_CASE("disjoint increments are uncorrelated") {
    const Grid g(2, 1.0);
    RunningStat prod, a2, b2;
    for (std::size_t p = 0; p < 100000; ++p) {
        const BrownianPath w = sample_brownian(g, 99, p);
        const double da = w.increment(0);
        const double db = w.increment(1);
        prod.add(da * db);
        a2.add(da * da);
        b2.add(db * db);
    }
    const double corr = prod.mean() / std::sqrt(a2.mean() * b2.mean());
    CHECK(std::fabs(corr) < 0.01);
}

TEST_CASE("wiener integral of indicator and constants") {
    const Grid g(8, 1.0);
    const BrownianPath w = sample_brownian(g, 1, 0);

    // Indicator of [0, 1/2): with left-endpoint sums the full-range integral
    // telescopes to W_{1/2} exactly on a grid containing 0.5.
    const DetFn ind =
        DetFn::piecewise_linear({0.0, 1.0, 0.5 - 1e-9, 1.0, 0.5, 0.0});
    CHECK(wiener_integral(ind, w) ==
          doctest::Approx(w.values[g.index_of(0.5)]).epsilon(1e-12));

    CHECK(wiener_integral(DetFn::zero(), w) == 0.0);
    CHECK(wiener_integral(DetFn::one(), w) ==
          doctest::Approx(w.terminal()).epsilon(1e-14));
}

TEST_CASE("wiener integral is linear") {
    const Grid g(32, 1.0);
    const BrownianPath w = sample_brownian(g, 5, 3);
    const DetFn g1 = DetFn::polynomial({0.3, 1.2});
    const DetFn g2 = DetFn::sine(0.7, 3.0, 0.2, 0.1);
    const double a = 2.5, b = -1.25;
    // a*g1 + b*g2 evaluated termwise via the sum of integrals
    const double lhs = a * wiener_integral(g1, w) + b * wiener_integral(g2, w);
    double rhs = 0.0;
    for (std::size_t j = 0; j + 1 < w.values.size(); ++j)
        rhs += (a * g1(g.node(j)) + b * g2(g.node(j))) * w.increment(j);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("shift with zero sigma and empty interval are identities") {
    const Grid g(16, 1.0);
    const BrownianPath w = sample_brownian(g, 8, 1);
    const BrownianPath s0 = shift_path(w, DetFn::zero(), 0.0, 1.0);
    CHECK(s0.values == w.values);
    const BrownianPath s1 = shift_path(w, DetFn::one(), 0.25, 0.25);
    CHECK(s1.values == w.values);
    CHECK_THROWS_AS(shift_path(w, DetFn::one(), 0.5, 0.25), std::invalid_argument);
}

TEST_CASE("shift composition equals the combined shift") {
    const Grid g(32, 1.0);
    const BrownianPath w = sample_brownian(g, 21, 2);
    const DetFn sigma = DetFn::polynomial({0.5, 0.25});
    const BrownianPath two_step =
        shift_path(shift_path(w, sigma, 0.25, 0.5), sigma, 0.5, 0.75);
    const BrownianPath one_step = shift_path(w, sigma, 0.25, 0.75);
    for (std::size_t j = 0; j < w.values.size(); ++j)
        CHECK(two_step.values[j] ==
              doctest::Approx(one_step.values[j]).epsilon(1e-13));
}

TEST_CASE("stochastic exponential multiplies over adjacent intervals") {
    const Grid g(64, 1.0);
    const BrownianPath w = sample_brownian(g, 33, 4);
    const DetFn sigma = DetFn::sine(0.8, 2.0, 0.3, 0.5);
    CHECK(stochastic_exponential(w, sigma, 0.25, 0.25) == 1.0);
    const double piece = stochastic_exponential(w, sigma, 0.0, 0.5) *
                         stochastic_exponential(w, sigma, 0.5, 1.0);
    const double whole = stochastic_exponential(w, sigma, 0.0, 1.0);
    CHECK(piece == doctest::Approx(whole).epsilon(1e-12));
}

TEST_CASE("constant sigma exponential has the textbook form") {
    const Grid g(1, 1.0);
    const BrownianPath w = sample_brownian(g, 77, 0);
    CHECK(stochastic_exponential(w, DetFn::one(), 0.0, 1.0) ==
          doctest::Approx(std::exp(w.terminal() - 0.5)).epsilon(1e-14));
}
