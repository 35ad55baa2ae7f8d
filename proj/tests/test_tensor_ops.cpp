// Copyright 2026 rfbsr authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "rfbsr/tape.hpp"

using namespace rfbsr;
using oracles::random_tensor;

TEST_CASE("tensor shape and data invariants") {
    CHECK_THROWS_AS(Tensor<float>(Shape(0, 1, 1, 1)), ShapeError);
    CHECK_THROWS_AS(Tensor<float>(Shape(1, 1, 2, 2), std::vector<float>{1.0f}), ShapeError);
    Tensor<float> t(Shape(2, 3, 4, 5));
    CHECK(t.numel() == 120);
    CHECK(t.data.size() == 120);
}

TEST_CASE("conv2d identity kernel reproduces the input") {
    Rng rng(1);
    Tensor<double> x = random_tensor<double>(rng, Shape(1, 1, 3, 3));
    Tensor<double> w(Shape(1, 1, 1, 1), std::vector<double>{1.0});
    Tensor<double> y = conv2d(x, w, ConvSpec{});
    CHECK(oracles::max_abs_diff(x, y) == 0.0);
}

TEST_CASE("conv2d all-ones 4x4 with 3x3 kernel and pad 1") {
    Tensor<double> x(Shape(1, 1, 4, 4), 1.0);
    Tensor<double> w(Shape(1, 1, 3, 3), 1.0);
    Tensor<double> y = conv2d(x, w, same_pad_spec(3, 3));
    CHECK(y.at(0, 0, 1, 1) == doctest::Approx(9.0));  // center
    CHECK(y.at(0, 0, 2, 2) == doctest::Approx(9.0));
    CHECK(y.at(0, 0, 0, 0) == doctest::Approx(4.0));  // corner
    CHECK(y.at(0, 0, 3, 3) == doctest::Approx(4.0));
    CHECK(y.at(0, 0, 0, 1) == doctest::Approx(6.0));  // edge
    CHECK(y.at(0, 0, 2, 0) == doctest::Approx(6.0));
}

TEST_CASE("conv2d asymmetric dilated kernel matches the direct oracle") {
    Rng rng(2);
    Tensor<double> x = random_tensor<double>(rng, Shape(2, 3, 8, 8));
    Tensor<double> w = random_tensor<double>(rng, Shape(4, 3, 1, 3));
    Tensor<double> b = random_tensor<double>(rng, Shape(1, 4, 1, 1));
    ConvSpec spec{1, 0, 1, 1, 2};
    Tensor<double> got = conv2d(x, w, &b, spec);
    Tensor<double> want = oracles::conv2d_direct(x, w, &b, spec);
    CHECK(oracles::max_rel_diff(got, want) <= 1e-6);
}

TEST_CASE("conv2d oracle matrix across kernels, strides and dilations") {
    Rng rng(3);
    const int64_t kernels[][2] = {{1, 1}, {1, 3}, {3, 1}, {3, 3}};
    for (auto [kh, kw] : kernels) {
        for (int64_t stride : {1, 2}) {
            for (int64_t dil : {1, 2, 3, 5}) {
                ConvSpec spec{stride, dil * (kh - 1) / 2, dil * (kw - 1) / 2, dil, dil};
                Tensor<double> x = random_tensor<double>(rng, Shape(2, 3, 11, 12));
                Tensor<double> w = random_tensor<double>(rng, Shape(2, 3, kh, kw));
                Tensor<double> b = random_tensor<double>(rng, Shape(1, 2, 1, 1));
                Tensor<double> got = conv2d(x, w, &b, spec);
                Tensor<double> want = oracles::conv2d_direct(x, w, &b, spec);
                CHECK(oracles::max_rel_diff(got, want) <= 1e-6);
            }
        }
    }
}

TEST_CASE("conv2d rejects bad operands") {
    Tensor<double> x(Shape(1, 2, 4, 4));
    Tensor<double> w(Shape(1, 3, 3, 3));
    CHECK_THROWS_AS(conv2d(x, w, ConvSpec{}), ShapeError);  // channel mismatch
    Tensor<double> w2(Shape(1, 2, 3, 3));
    Tensor<double> tiny(Shape(1, 2, 2, 2));
    CHECK_THROWS_AS(conv2d(tiny, w2, ConvSpec{}), ShapeError);  // output dim < 1
}

TEST_CASE("activation definitions") {
    Tensor<double> x(Shape(1, 1, 1, 3), std::vector<double>{-1.0, 0.0, 2.0});
    Tensor<double> lr = leaky_relu(x, 0.2);
    CHECK(lr.data[0] == doctest::Approx(-0.2));
    CHECK(lr.data[1] == 0.0);
    CHECK(lr.data[2] == doctest::Approx(2.0));
    CHECK(sigmoid(Tensor<double>::scalar_of(0.0)).scalar() == doctest::Approx(0.5));
    Tensor<double> r = relu(x);
    CHECK(r.data[0] == 0.0);
    CHECK(r.data[2] == 2.0);
}

TEST_CASE("l1 and elementwise op examples") {
    Rng rng(4);
    Tensor<double> x = random_tensor<double>(rng, Shape(1, 2, 3, 3));
    CHECK(l1(x, x).scalar() == 0.0);
    Tensor<double> a(Shape(1, 1, 1, 2), std::vector<double>{0.0, 0.0});
    Tensor<double> b(Shape(1, 1, 1, 2), std::vector<double>{1.0, 3.0});
    CHECK(l1(a, b).scalar() == doctest::Approx(2.0));
    CHECK_THROWS_AS(l1(a, x), ShapeError);

    Tensor<double> s = scale(b, 2.0);
    CHECK(s.data[1] == doctest::Approx(6.0));
    CHECK(add(a, b).data[1] == doctest::Approx(3.0));
}

TEST_CASE("concat_channels keeps order and validates shapes") {
    Rng rng(5);
    Tensor<double> a = random_tensor<double>(rng, Shape(1, 2, 4, 4));
    Tensor<double> c = random_tensor<double>(rng, Shape(1, 3, 4, 4));
    std::vector<const Tensor<double>*> xs{&a, &c};
    Tensor<double> y = concat_channels(std::span<const Tensor<double>* const>(xs));
    CHECK(y.shape == Shape(1, 5, 4, 4));
    CHECK(y.at(0, 0, 2, 2) == a.at(0, 0, 2, 2));
    CHECK(y.at(0, 4, 1, 3) == c.at(0, 2, 1, 3));

    Tensor<double> bad = random_tensor<double>(rng, Shape(1, 1, 3, 4));
    std::vector<const Tensor<double>*> mixed{&a, &bad};
    CHECK_THROWS_AS(concat_channels(std::span<const Tensor<double>* const>(mixed)), ShapeError);
    std::vector<const Tensor<double>*> empty;
    CHECK_THROWS_AS(concat_channels(std::span<const Tensor<double>* const>(empty)), ShapeError);
}

TEST_CASE("nearest_upsample definition and block-mean inverse") {
    Tensor<double> one(Shape(1, 1, 1, 1), std::vector<double>{5.0});
    Tensor<double> up1 = nearest_upsample(one, 2);
    for (double v : up1.data) CHECK(v == 5.0);

    Tensor<double> x(Shape(1, 1, 2, 2), std::vector<double>{1, 2, 3, 4});
    Tensor<double> up = nearest_upsample(x, 2);
    const std::vector<double> want{1, 1, 2, 2, 1, 1, 2, 2, 3, 3, 4, 4, 3, 3, 4, 4};
    CHECK(up.data == want);

    Rng rng(6);
    Tensor<double> r = random_tensor<double>(rng, Shape(2, 3, 4, 5));
    Tensor<double> back = oracles::block_mean_pool(nearest_upsample(r, 3), 3);
    CHECK(oracles::max_abs_diff(r, back) <= 1e-12);
}

TEST_CASE("pixel_shuffle index law, bijection and element count") {
    Tensor<double> x(Shape(1, 4, 1, 1), std::vector<double>{1, 2, 3, 4});  // a,b,c,d
    Tensor<double> y = pixel_shuffle(x, 2);
    CHECK(y.shape == Shape(1, 1, 2, 2));
    CHECK(y.data == std::vector<double>{1, 2, 3, 4});

    Rng rng(7);
    Tensor<double> r = random_tensor<double>(rng, Shape(2, 8, 3, 3));
    CHECK(oracles::bitwise_equal(pixel_unshuffle(pixel_shuffle(r, 2), 2), r));

    Tensor<double> big(Shape(1, 16, 5, 7));
    CHECK(pixel_shuffle(big, 2).shape == Shape(1, 4, 10, 14));
    CHECK(pixel_shuffle(big, 2).numel() == big.numel());
    CHECK_THROWS_AS(pixel_shuffle(Tensor<double>(Shape(1, 3, 2, 2)), 2), ShapeError);
}

TEST_CASE("log clamps at 1e-12 instead of reaching -inf") {
    Tensor<double> x(Shape(1, 1, 1, 2), std::vector<double>{0.0, 1.0});
    Tensor<double> y = log_clamped(x);
    CHECK(y.data[0] == doctest::Approx(std::log(1e-12)));
    CHECK(y.data[1] == 0.0);
}

TEST_CASE("ops do not mutate their inputs") {
    Rng rng(8);
    Tensor<double> x = random_tensor<double>(rng, Shape(1, 4, 4, 4));
    const Tensor<double> snapshot = x;
    (void)relu(x);
    (void)leaky_relu(x, 0.2);
    (void)scale(x, 3.0);
    (void)nearest_upsample(x, 2);
    (void)pixel_shuffle(x, 2);
    (void)mean_all(x);
    CHECK(oracles::bitwise_equal(x, snapshot));
}
