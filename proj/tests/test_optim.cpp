// Copyright 2026 rfbsr authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "rfbsr/optim.hpp"

using namespace rfbsr;
using oracles::random_tensor;

TEST_CASE("adam with zero gradients is a no-op") {
    Rng rng(1);
    Parameter<float> p("p", random_tensor<float>(rng, Shape(1, 2, 3, 3)));
    const Tensor<float> before = p.value;
    AdamState<float> adam({&p});
    for (int i = 0; i < 5; ++i) adam.step(0.1);
    CHECK(oracles::bitwise_equal(p.value, before));
}

TEST_CASE("first bias-corrected step moves by about -lr") {
    Parameter<float> p("p", Tensor<float>::scalar_of(0.0f));
    p.grad.data[0] = 1.0f;
    AdamState<float> adam({&p});
    adam.step(0.1);
    CHECK(p.value.data[0] == doctest::Approx(-0.1).epsilon(1e-6));
    CHECK(p.grad.data[0] == 0.0f);  // grads zeroed after the step

    // hand-evaluated second step: constant gradient keeps the step ~ -lr
    p.grad.data[0] = 1.0f;
    adam.step(0.1);
    CHECK(p.value.data[0] == doctest::Approx(-0.2).epsilon(1e-5));
}

TEST_CASE("adam trajectories are deterministic for a fixed seed") {
    auto run = [](uint64_t seed) {
        Rng rng(seed);
        Parameter<float> p("p", random_tensor<float>(rng, Shape(1, 1, 4, 4)));
        AdamState<float> adam({&p});
        for (int i = 0; i < 10; ++i) {
            for (size_t k = 0; k < p.grad.data.size(); ++k)
                p.grad.data[k] = static_cast<float>(rng.uniform(-1.0, 1.0));
            adam.step(0.01);
        }
        return p.value;
    };
    CHECK(oracles::bitwise_equal(run(5), run(5)));
    CHECK_FALSE(oracles::bitwise_equal(run(5), run(6)));
}

TEST_CASE("non-finite gradients abort with the parameter named") {
    Parameter<float> p("trunk.conv.weight", Tensor<float>::scalar_of(0.0f));
    p.grad.data[0] = std::numeric_limits<float>::quiet_NaN();
    AdamState<float> adam({&p});
    try {
        adam.step(0.1);
        FAIL("expected DivergenceError");
    } catch (const DivergenceError& e) {
        CHECK(std::string(e.what()).find("trunk.conv.weight") != std::string::npos);
    }
}

TEST_CASE("optimizers on disjoint parameter sets never touch each other") {
    Rng rng(2);
    Parameter<float> g("g", random_tensor<float>(rng, Shape(1, 1, 2, 2)));
    Parameter<float> d("d", random_tensor<float>(rng, Shape(1, 1, 2, 2)));
    AdamState<float> adam_g({&g});
    AdamState<float> adam_d({&d});
    const Tensor<float> d_before = d.value;
    for (auto& v : g.grad.data) v = 0.5f;
    adam_g.step(0.1);
    CHECK(oracles::bitwise_equal(d.value, d_before));
    const Tensor<float> g_after = g.value;
    for (auto& v : d.grad.data) v = 0.5f;
    adam_d.step(0.1);
    CHECK(oracles::bitwise_equal(g.value, g_after));
}

TEST_CASE("psnr schedule: 2e-4 halved every 250k steps, without bound") {
    const LrSchedule s = LrSchedule::psnr_stage();
    CHECK(lr_at(s, 0) == 2e-4);
    CHECK(lr_at(s, 249999) == 2e-4);
    CHECK(lr_at(s, 250000) == 1e-4);
    CHECK(lr_at(s, 499999) == 1e-4);
    CHECK(lr_at(s, 500000) == 5e-5);
    CHECK(lr_at(s, 2500000) == 2e-4 / 1024.0);
    CHECK_THROWS_AS(lr_at(s, -1), Error);
}

TEST_CASE("gan schedule: 1e-4 halved at 50k/100k/200k/300k") {
    const LrSchedule s = LrSchedule::gan_stage();
    CHECK(lr_at(s, 0) == 1e-4);
    CHECK(lr_at(s, 49999) == 1e-4);
    CHECK(lr_at(s, 50000) == 5e-5);
    CHECK(lr_at(s, 99999) == 5e-5);
    CHECK(lr_at(s, 100000) == 2.5e-5);
    CHECK(lr_at(s, 199999) == 2.5e-5);
    CHECK(lr_at(s, 200000) == 1.25e-5);
    CHECK(lr_at(s, 300000) == 6.25e-6);
    CHECK(lr_at(s, 1000000) == 6.25e-6);  // no further milestones
}

TEST_CASE("both schedules are non-increasing in step") {
    for (const LrSchedule& s : {LrSchedule::psnr_stage(), LrSchedule::gan_stage()}) {
        double prev = lr_at(s, 0);
        for (int64_t step = 0; step <= 600000; step += 12500) {
            const double cur = lr_at(s, step);
            CHECK(cur <= prev);
            prev = cur;
        }
    }
}
