#include <gtest/gtest.h>

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "check.hpp"
#include "oracles.hpp"
#include "palim/error.hpp"
#include "palim/image.hpp"
#include "palim/image_io.hpp"

using namespace palim;

namespace {

std::vector<std::uint8_t> bytes_of(const std::string& s) { return {s.begin(), s.end()}; }

// 3x2 grayscale PNG holding [0,128,255,10,20,30].
const std::vector<std::uint8_t> kGrayPng = {
    0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a, 0x00, 0x00, 0x00, 0x0d, 0x49, 0x48, 0x44, 0x52, 0x00, 0x00, 0x00,
    0x03, 0x00, 0x00, 0x00, 0x02, 0x08, 0x00, 0x00, 0x00, 0x00, 0xb8, 0x1f, 0x39, 0xc6, 0x00, 0x00, 0x00, 0x10, 0x49,
    0x44, 0x41, 0x54, 0x78, 0x9c, 0x63, 0x60, 0x68, 0xf8, 0xcf, 0xc8, 0xc5, 0xc5, 0x05, 0x00, 0x08, 0x43, 0x01, 0x9f,
    0xb2, 0x83, 0x14, 0x05, 0x00, 0x00, 0x00, 0x00, 0x49, 0x45, 0x4e, 0x44, 0xae, 0x42, 0x60, 0x82};

// 1x1 RGB PNG, pure red.
const std::vector<std::uint8_t> kRedPng = {
    0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a, 0x00, 0x00, 0x00, 0x0d, 0x49, 0x48, 0x44, 0x52, 0x00, 0x00,
    0x00, 0x01, 0x00, 0x00, 0x00, 0x01, 0x08, 0x02, 0x00, 0x00, 0x00, 0x90, 0x77, 0x53, 0xde, 0x00, 0x00, 0x00,
    0x0c, 0x49, 0x44, 0x41, 0x54, 0x78, 0x9c, 0x63, 0xf8, 0xcf, 0xc0, 0x00, 0x00, 0x03, 0x01, 0x01, 0x00, 0xc9,
    0xfe, 0x92, 0xef, 0x00, 0x00, 0x00, 0x00, 0x49, 0x45, 0x4e, 0x44, 0xae, 0x42, 0x60, 0x82};

}  // namespace

TEST(Decode, P5ThreeByTwo) {
  auto bytes = bytes_of("P5\n3 2\n255\n");
  for (int v : {0, 128, 255, 10, 20, 30}) bytes.push_back(static_cast<std::uint8_t>(v));
  const auto g = decode_image(bytes);
  EXPECT_EQ(g, GrayImage(3, 2, {0, 128, 255, 10, 20, 30}));
}

TEST(Decode, SinglePixel) {
  auto bytes = bytes_of("P5 1 1 255\n");
  bytes.push_back(255);
  EXPECT_EQ(decode_image(bytes), GrayImage(1, 1, {255}));
}

TEST(Decode, EmptyIsUnsupported) {
  try {
    decode_image({});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::format);
    EXPECT_NE(std::string(e.what()).find("unsupported format"), std::string::npos);
  }
}

TEST(Decode, ZeroDimension) {
  EXPECT_EQ(test::error_code([] { decode_image(bytes_of("P5\n0 4\n255\n")); }), ErrorCode::format);
}

TEST(Decode, Truncated) {
  auto bytes = bytes_of("P5\n4 4\n255\n");
  bytes.resize(bytes.size() + 7, 0);
  EXPECT_EQ(test::error_code([&] { decode_image(bytes); }), ErrorCode::format);
}

TEST(Decode, CommentsAndAsciiVariant) {
  const auto g = decode_image(bytes_of("P2\n# made by hand\n2 2\n# another\n15\n0 15\n5 10\n"));
  EXPECT_EQ(g, GrayImage(2, 2, {0, 255, 85, 170}));
}

TEST(Decode, ColorIsLuminanceConverted) {
  auto bytes = bytes_of("P6\n2 1\n255\n");
  for (int v : {255, 0, 0, 10, 200, 30}) bytes.push_back(static_cast<std::uint8_t>(v));
  const auto g = decode_image(bytes);
  EXPECT_EQ(g.at(0, 0), 76);
  EXPECT_EQ(g.at(1, 0), luminance(10, 200, 30));
  EXPECT_EQ(luminance(255, 255, 255), 255);
  EXPECT_EQ(luminance(0, 0, 0), 0);
}

TEST(Decode, Png) {
  if (!png_supported()) {
    EXPECT_EQ(test::error_code([] { decode_image(kGrayPng); }), ErrorCode::format);
    return;
  }
  EXPECT_EQ(decode_image(kGrayPng), GrayImage(3, 2, {0, 128, 255, 10, 20, 30}));
  EXPECT_EQ(decode_image(kRedPng), GrayImage(1, 1, {76}));
  auto broken = kGrayPng;
  broken.resize(40);
  EXPECT_EQ(test::error_code([&] { decode_image(broken); }), ErrorCode::format);
}

TEST(Decode, RoundTripIsBitExact) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 50; ++i) {
    const int w = 1 + static_cast<int>(test::pick(rng, 40));
    const int h = 1 + static_cast<int>(test::pick(rng, 40));
    const auto g = test::random_gray(rng, w, h);
    EXPECT_EQ(decode_image(encode_pgm(g)), g);
  }
}

TEST(Decode, FileRoundTripAndMissingFile) {
  const auto dir = std::filesystem::temp_directory_path() / "palim_test_image";
  std::filesystem::create_directories(dir);
  const GrayImage g(4, 3, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12});
  save_pgm(dir / "a.pgm", g);
  EXPECT_EQ(load_image(dir / "a.pgm"), g);
  EXPECT_EQ(test::error_code([&] { load_image(dir / "missing.pgm"); }), ErrorCode::io);
  std::filesystem::remove_all(dir);
}

TEST(Binarize, Fixed) {
  const auto b = binarize(GrayImage(2, 1, {0, 255}), FixedThreshold{128});
  EXPECT_TRUE(b.get(0, 0));
  EXPECT_FALSE(b.get(1, 0));
  EXPECT_EQ(b.count(), 1u);
}

TEST(Binarize, OtsuOnWhiteIsEmpty) {
  const GrayImage white(16, 16, 255);
  EXPECT_EQ(otsu_threshold(white), 0);
  EXPECT_EQ(binarize(white).count(), 0u);
}

TEST(Binarize, OtsuSeparatesBimodalExactly) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    GrayImage g(37, 23);
    for (auto& v : g.pixels()) v = test::uniform01(rng) < 0.3 ? 10 : 240;
    g.at(0, 0) = 10;
    g.at(1, 0) = 240;
    const int t = otsu_threshold(g);
    double best = 0.0;
    for (int s = 0; s <= 256; ++s) best = std::max(best, test::between_class_variance(g, s));
    EXPECT_DOUBLE_EQ(test::between_class_variance(g, t), best);
    const auto b = binarize(g);
    for (int y = 0; y < g.height(); ++y)
      for (int x = 0; x < g.width(); ++x) ASSERT_EQ(b.get(x, y), g.at(x, y) == 10);
  }
}

TEST(Binarize, OtsuMaximizesBetweenClassVariance) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const auto g = test::random_gray(rng, 20, 20);
    const int t = otsu_threshold(g);
    double best = 0.0;
    for (int s = 0; s <= 256; ++s) best = std::max(best, test::between_class_variance(g, s));
    EXPECT_NEAR(test::between_class_variance(g, t), best, best * 1e-12);
  }
}

TEST(Binarize, MonotoneInThreshold) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = test::random_gray(rng, 16, 16);
    BinaryImage prev = binarize(g, FixedThreshold{0});
    EXPECT_EQ(prev.count(), 0u);
    for (int t = 1; t <= 256; t += 5) {
      const auto cur = binarize(g, FixedThreshold{t});
      for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 16; ++x)
          if (prev.get(x, y)) {
            ASSERT_TRUE(cur.get(x, y));
          }
      prev = cur;
    }
  }
}

TEST(BinaryImage, CountTracksWrites) {
  std::mt19937_64 rng(9);
  BinaryImage b(13, 7);
  for (int i = 0; i < 500; ++i) {
    b.set(static_cast<int>(test::pick(rng, 13)), static_cast<int>(test::pick(rng, 7)), test::pick(rng, 2) == 1);
    std::size_t n = 0;
    for (auto v : b.bits()) n += v;
    ASSERT_EQ(b.count(), n);
  }
}

TEST(Normalize, IdentityAtTargetSize) {
  std::mt19937_64 rng(1);
  const auto g = test::random_gray(rng, 512, 512);
  EXPECT_EQ(normalize(g), g);
}

TEST(Normalize, Downscale) {
  const GrayImage g(1024, 1024, 0);
  const auto n = normalize(g);
  EXPECT_EQ(n.width(), 512);
  EXPECT_EQ(n.height(), 512);
  for (auto v : n.pixels()) ASSERT_EQ(v, 0);
}

TEST(Normalize, PadsShortAxisSymmetrically) {
  const GrayImage g(300, 600, 0);
  const auto n = normalize(g);
  ASSERT_EQ(n.width(), 512);
  ASSERT_EQ(n.height(), 512);
  // The 300-wide page occupies source columns [150, 450) of the 600 square,
  // i.e. output columns [128, 384). Columns clear of the bilinear taps are paper.
  for (int y = 0; y < 512; ++y) {
    for (int x = 0; x < 127; ++x) {
      ASSERT_EQ(n.at(x, y), 255) << x;
      ASSERT_EQ(n.at(511 - x, y), 255) << x;
    }
    for (int x = 129; x < 383; ++x) ASSERT_EQ(n.at(x, y), 0) << x;
  }
}

TEST(Normalize, Idempotent) {
  std::mt19937_64 rng(2);
  const auto n = normalize(test::random_gray(rng, 200, 90));
  EXPECT_EQ(normalize(n), n);
}

TEST(Normalize, RejectsTinyTarget) {
  EXPECT_EQ(test::error_code([] { normalize(GrayImage(4, 4), NormalizationParams{4, 4, 300}); }),
            ErrorCode::invalid_argument);
}

TEST(Invert, Examples) {
  BinaryImage b(2, 1);
  b.set(0, 0, true);
  const auto i = invert(b);
  EXPECT_FALSE(i.get(0, 0));
  EXPECT_TRUE(i.get(1, 0));
  EXPECT_EQ(invert(BinaryImage(5, 5)).count(), 25u);
}

TEST(Invert, Involution) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 200; ++i) {
    const auto b = test::random_binary(rng, 1 + static_cast<int>(test::pick(rng, 30)),
                                       1 + static_cast<int>(test::pick(rng, 30)), test::uniform01(rng));
    ASSERT_EQ(invert(invert(b)), b);
    ASSERT_EQ(invert(b).count(), b.bits().size() - b.count());
  }
}

TEST(Geometry, BoxHelpers) {
  const Box a{0, 0, 10, 10}, b{5, 5, 10, 10}, c{20, 20, 2, 2};
  EXPECT_EQ(unite(a, b), (Box{0, 0, 15, 15}));
  EXPECT_TRUE(intersects(a, b));
  EXPECT_FALSE(intersects(a, c));
  EXPECT_DOUBLE_EQ(iou(a, b), 25.0 / 175.0);
  EXPECT_DOUBLE_EQ(iou(a, a), 1.0);
  EXPECT_DOUBLE_EQ(iou(a, c), 0.0);
}

TEST(Geometry, RotateFourTimesIsIdentity) {
  std::mt19937_64 rng(8);
  const auto g = test::random_gray(rng, 7, 4);
  const auto r = rotate90(g);
  EXPECT_EQ(r.width(), 4);
  EXPECT_EQ(r.height(), 7);
  EXPECT_EQ(r.at(3, 0), g.at(0, 0));
  EXPECT_EQ(rotate90(rotate90(rotate90(r))), g);
}

TEST(Geometry, CropPlaceTightBox) {
  BinaryImage b(10, 8);
  b.set(3, 2, true);
  b.set(6, 5, true);
  EXPECT_EQ(tight_box(b), (Box{3, 2, 4, 4}));
  EXPECT_TRUE(tight_box(BinaryImage(4, 4)).empty());
  const auto c = crop(b, tight_box(b));
  EXPECT_EQ(c.count(), 2u);
  EXPECT_TRUE(c.get(0, 0));
  EXPECT_TRUE(c.get(3, 3));
  const auto p = place(c, 10, 8, 3, 2);
  EXPECT_EQ(p, b);
  EXPECT_EQ(test::error_code([&] { crop(b, Box{8, 0, 5, 1}); }), ErrorCode::invalid_argument);
}

TEST(Geometry, RenderPolarity) {
  BinaryImage b(2, 1);
  b.set(0, 0, true);
  EXPECT_EQ(render(b), GrayImage(2, 1, {0, 255}));
  EXPECT_EQ(render(b, true), GrayImage(2, 1, {255, 0}));
  EXPECT_EQ(binarize(render(b), FixedThreshold{128}), b);
}
