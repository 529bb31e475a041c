#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "sobnn/optim.hpp"
#include "sobnn/rng.hpp"
#include "support.hpp"

using namespace sobnn;

TEST_SUITE("optim") {

TEST_CASE("zero gradient from a fresh state gives a zero update") {
    AdamState st(3);
    const Vector update = adam_step(st, {0.0, 0.0, 0.0}, AdamConfig{});
    CHECK(update == Vector{0.0, 0.0, 0.0});
    CHECK(st.t == 1);
}

TEST_CASE("first scalar step matches the hand recursion") {
    // g = 3: m = 0.3, v = 0.009, m_hat = 3, v_hat = 9,
    // update = -lr * 3 / (3 + eps)
    AdamState st(1);
    const AdamConfig cfg{};
    const Vector update = adam_step(st, {3.0}, cfg);
    CHECK(st.m[0] == doctest::Approx(0.3));
    CHECK(st.v[0] == doctest::Approx(0.009));
    CHECK(update[0] < 0.0);
    CHECK(std::abs(std::abs(update[0]) - cfg.learn_rate) <= 1e-6);
}

TEST_CASE("first step opposes the gradient componentwise") {
    Rng rng(71);
    AdamState st(16);
    Vector g = testsupport::random_vector(rng, 16, -4.0, 4.0);
    for (double& v : g)
        if (v == 0.0) v = 1.0;
    const Vector update = adam_step(st, g, AdamConfig{});
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(std::signbit(update[i]) != std::signbit(g[i]));
    }
}

TEST_CASE("early update magnitudes stay near the learning rate bound") {
    Rng rng(72);
    const AdamConfig cfg{};
    // first step: m_hat/sqrt(v_hat) = g/|g| exactly
    for (int rep = 0; rep < 50; ++rep) {
        AdamState st(1);
        const Vector update = adam_step(st, {rng.uniform(-5.0, 5.0)}, cfg);
        CHECK(std::abs(update[0]) <= cfg.learn_rate * (1.0 + 1e-6));
    }
    // steady gradient: the normalized step stays at the learning rate
    AdamState st(8);
    const Vector g = testsupport::random_vector(rng, 8, 0.5, 2.0);
    for (int step = 0; step < 50; ++step) {
        const Vector update = adam_step(st, g, cfg);
        for (double u : update) CHECK(std::abs(u) <= cfg.learn_rate * (1.0 + 1e-6));
    }
}

TEST_CASE("adam_step is deterministic") {
    const Vector g{0.5, -1.5, 2.5};
    AdamState a(3), b(3);
    for (int i = 0; i < 10; ++i) {
        const Vector ua = adam_step(a, g, AdamConfig{});
        const Vector ub = adam_step(b, g, AdamConfig{});
        CHECK(ua == ub);
    }
}

TEST_CASE("shape and config validation") {
    AdamState st(2);
    CHECK_THROWS_AS(adam_step(st, {1.0}, AdamConfig{}), std::invalid_argument);
    CHECK_THROWS_AS((AdamConfig{-1.0, 0.9, 0.999, 1e-8}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((AdamConfig{0.001, 1.0, 0.999, 1e-8}.validate()), std::invalid_argument);
}

}  // TEST_SUITE
