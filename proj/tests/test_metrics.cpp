// Copyright 2026 rfbsr authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "oracles.hpp"
#include "rfbsr/image_io.hpp"
#include "rfbsr/metrics.hpp"
#include "rfbsr/tape.hpp"
#include "synthetic.hpp"

using namespace rfbsr;
namespace fs = std::filesystem;

TEST_CASE("psnr identity cap and closed forms") {
    Tensor<double> a = cast_tensor<double>(synthetic::smooth_image(16, 16));
    CHECK(psnr(a, a) == 100.0);

    Tensor<double> b = affine(a, 1.0, 0.1);  // constant offset 0.1 -> mse 0.01
    CHECK(psnr(a, b) == doctest::Approx(20.0).epsilon(1e-12));
    CHECK(psnr(b, a) == psnr(a, b));  // symmetric
    // identical crops of a uniform-error pair score identically
    CHECK(psnr(center_crop(a, 8, 8), center_crop(b, 8, 8)) == doctest::Approx(psnr(a, b)).epsilon(1e-12));

    CHECK_THROWS_AS(psnr(a, Tensor<double>(Shape(1, 3, 8, 8))), ShapeError);
}

TEST_CASE("psnr equals the hand-computed 10*log10(1/mse) and decreases with mse") {
    Rng rng(1);
    Tensor<double> a = oracles::random_tensor<double>(rng, Shape(1, 3, 12, 12), 0.0, 1.0);
    Tensor<double> b = oracles::random_tensor<double>(rng, Shape(1, 3, 12, 12), 0.0, 1.0);
    double mse = 0.0;
    for (size_t i = 0; i < a.data.size(); ++i) mse += (a.data[i] - b.data[i]) * (a.data[i] - b.data[i]);
    mse /= static_cast<double>(a.numel());
    CHECK(std::abs(psnr(a, b) - 10.0 * std::log10(1.0 / mse)) <= 1e-9);

    double prev = psnr(a, a);
    for (double noise : {0.01, 0.05, 0.2}) {
        const double cur = psnr(a, affine(a, 1.0, noise));
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("ssim identity, symmetry and the direct windowed oracle") {
    Tensor<double> a = cast_tensor<double>(synthetic::smooth_image(24, 24, 0.2));
    CHECK(ssim(a, a) == doctest::Approx(1.0).epsilon(1e-8));

    Rng rng(2);
    Tensor<double> noise = oracles::random_tensor<double>(rng, a.shape, -0.1, 0.1);
    Tensor<double> b = add(a, noise);
    const double got = ssim(a, b);
    CHECK(got < 1.0);
    CHECK(got == doctest::Approx(ssim(b, a)).epsilon(1e-12));
    CHECK(std::abs(got - oracles::ssim_direct(a, b)) <= 1e-8);
}

TEST_CASE("ssim is nearly invariant to a small shared constant shift") {
    // The shift only touches the stabilized luminance term; for images whose
    // window means differ by O(1e-3) the effect stays below 1e-6.
    Tensor<double> a = cast_tensor<double>(synthetic::smooth_image(20, 20, 0.4));
    Rng rng(3);
    Tensor<double> b = add(a, oracles::random_tensor<double>(rng, a.shape, -0.002, 0.002));
    const double base = ssim(a, b);
    const double shifted = ssim(affine(a, 1.0, 0.1), affine(b, 1.0, 0.1));
    CHECK(std::abs(base - shifted) < 1e-6);
    CHECK_THROWS_AS(ssim(Tensor<double>(Shape(1, 1, 8, 8)), Tensor<double>(Shape(1, 1, 8, 8))),
                    ShapeError);  // smaller than the window
}

TEST_CASE("center crop takes the central window") {
    Tensor<double> x(Shape(1, 1, 6, 6));
    for (int64_t i = 0; i < 6; ++i)
        for (int64_t j = 0; j < 6; ++j) x.at(0, 0, i, j) = static_cast<double>(10 * i + j);
    Tensor<double> c = center_crop(x, 2, 2);
    CHECK(c.at(0, 0, 0, 0) == 22.0);
    CHECK(c.at(0, 0, 1, 1) == 33.0);
    CHECK_THROWS_AS(center_crop(x, 7, 7), ShapeError);
}

TEST_CASE("directory evaluation: identical dirs hit the cap, rows sorted, csv stable") {
    const fs::path base = fs::temp_directory_path() / "rfbsr_test_eval";
    fs::remove_all(base);
    fs::create_directories(base / "sr");
    fs::create_directories(base / "hr");

    const Tensor<float> img_a = synthetic::smooth_image(32, 32, 0.0);
    const Tensor<float> img_b = synthetic::smooth_image(32, 32, 0.7);
    save_image(img_a, base / "sr" / "b.png");
    save_image(img_a, base / "hr" / "b.png");
    save_image(img_b, base / "sr" / "a.png");
    save_image(img_b, base / "hr" / "a.png");

    EvalProtocol protocol;
    protocol.crop = 20;
    EvalTable table = evaluate(base / "sr", base / "hr", protocol);
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[0].name == "a.png");  // sorted by filename
    CHECK(table.rows[1].name == "b.png");
    for (const auto& r : table.rows) {
        CHECK(r.psnr_db == 100.0);
        CHECK(r.ssim == doctest::Approx(1.0).epsilon(1e-8));
    }
    CHECK(table.mean_psnr == 100.0);

    const std::string csv = table.csv();
    CHECK(csv.find("filename,psnr_db,ssim\n") == 0);
    CHECK(csv.find("a.png,100.000000,") != std::string::npos);
    CHECK(csv.find("mean,100.000000,") != std::string::npos);
    CHECK(csv == evaluate(base / "sr", base / "hr", protocol).csv());  // deterministic rerun

    // single-image directory: one row plus the mean row
    fs::remove(base / "sr" / "a.png");
    fs::remove(base / "hr" / "a.png");
    EvalTable single = evaluate(base / "sr", base / "hr", protocol);
    CHECK(single.rows.size() == 1);

    // missing counterpart is an error
    save_image(img_b, base / "sr" / "only_in_sr.png");
    CHECK_THROWS_AS(evaluate(base / "sr", base / "hr", protocol), IoError);
}

TEST_CASE("quantized scoring path differs from the float path") {
    const fs::path base = fs::temp_directory_path() / "rfbsr_test_eval_q";
    fs::remove_all(base);
    fs::create_directories(base / "sr");
    fs::create_directories(base / "hr");
    // Use ppm (exact 8-bit storage); difference of half a quantization level
    Tensor<float> a = synthetic::smooth_image(24, 24, 0.1);
    save_image(a, base / "sr" / "x.ppm");
    save_image(a, base / "hr" / "x.ppm");
    EvalProtocol p;
    p.crop = 0;
    p.on_quantized = true;
    EvalTable t = evaluate(base / "sr", base / "hr", p);
    CHECK(t.rows[0].psnr_db == 100.0);  // files identical either way
}
