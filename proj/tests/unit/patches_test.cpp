#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "patchprior/errors.hpp"
#include "patchprior/image.hpp"
#include "patchprior/patches.hpp"
#include "patchprior/pgm.hpp"
#include "test_support.hpp"

namespace pp = patchprior;

namespace {

pp::ImageBuffer random_image(std::size_t w, std::size_t h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 255.0);
  pp::ImageBuffer img(w, h);
  for (auto& v : img.pixels()) v = u(rng);
  return img;
}

}  // namespace

TEST(ExtractPatches, PatchCoveringWholeImage) {
  const auto img = random_image(8, 8, 1);
  const auto p = pp::extract_patches(img, 8, 1);
  ASSERT_EQ(p.count(), 1u);
  ASSERT_EQ(p.dim(), 64u);
  for (std::size_t i = 0; i < 64; ++i) EXPECT_EQ(p.patch(0)[static_cast<Eigen::Index>(i)], img[i]);
}

TEST(ExtractPatches, CountForStrideOne) {
  EXPECT_EQ(pp::extract_patches(random_image(10, 10, 2), 8, 1).count(), 9u);
  EXPECT_EQ(pp::extract_patches(random_image(64, 64, 2), 8, 1).count(), 57u * 57u);
}

TEST(ExtractPatches, ConstantImageGivesConstantPatches) {
  const pp::ImageBuffer img(12, 9, 7.0);
  const auto p = pp::extract_patches(img, 4, 2);
  EXPECT_TRUE((p.data().array() == 7.0).all());
}

TEST(ExtractPatches, RowMajorPixelOrderWithinPatch) {
  const auto img = random_image(10, 7, 3);
  const auto p = pp::extract_patches(img, 3, 1);
  const auto& origins = p.grid().origins;
  for (std::size_t i = 0; i < p.count(); ++i) {
    for (std::size_t r = 0; r < 3; ++r) {
      for (std::size_t c = 0; c < 3; ++c) {
        EXPECT_EQ(p.patch(i)[static_cast<Eigen::Index>(r * 3 + c)],
                  img.at(origins[i].row + r, origins[i].col + c));
      }
    }
  }
}

TEST(ExtractPatches, TrailingOriginsCoverBorder) {
  const auto origins = pp::patch_origins(11, 10, 4, 3);
  // Columns 0, 3, 6 plus trailing 7; rows 0, 3, 6 (6 + 4 == 10 already).
  std::vector<std::size_t> rows, cols;
  for (const auto& o : origins) {
    if (o.row == 0) cols.push_back(o.col);
    if (o.col == 0) rows.push_back(o.row);
  }
  EXPECT_EQ(cols, (std::vector<std::size_t>{0, 3, 6, 7}));
  EXPECT_EQ(rows, (std::vector<std::size_t>{0, 3, 6}));
}

TEST(ExtractPatches, RejectsOversizedPatchAndZeroStride) {
  const auto img = random_image(6, 9, 4);
  EXPECT_THROW(pp::extract_patches(img, 7, 1), pp::InvalidArgument);
  EXPECT_THROW(pp::extract_patches(img, 3, 0), pp::InvalidArgument);
  EXPECT_THROW(pp::extract_patches(img, 3, 4), pp::InvalidArgument);
}

TEST(AccumulatePatches, SingleFullPatch) {
  const auto img = random_image(5, 5, 5);
  const auto acc = pp::accumulate_patches(pp::extract_patches(img, 5, 1), 5, 5);
  EXPECT_EQ(acc.sum, img);
  EXPECT_TRUE(std::all_of(acc.count.pixels().begin(), acc.count.pixels().end(),
                          [](double c) { return c == 1.0; }));
}

TEST(AccumulatePatches, InteriorCountIsPatchArea) {
  const auto acc = pp::accumulate_patches(pp::extract_patches(random_image(20, 20, 6), 5, 1), 20, 20);
  EXPECT_EQ(acc.count.at(10, 10), 25.0);
  EXPECT_EQ(acc.count.at(0, 0), 1.0);
}

TEST(AccumulatePatches, RoundTripAllSizesAndStrides) {
  for (std::size_t w : {8u, 13u, 31u}) {
    for (std::size_t h : {8u, 17u}) {
      for (std::size_t s : {1u, 4u, 8u}) {
        for (std::size_t stride : {1u, 2u, 3u, 7u}) {
          if (stride > s) continue;
          const auto img = random_image(w, h, w * 131 + h * 17 + s + stride);
          const auto patches = pp::extract_patches(img, s, stride);
          const auto acc = pp::accumulate_patches(patches, w, h);
          const auto back = pp::average_patches(patches, w, h);
          for (std::size_t i = 0; i < img.size(); ++i) {
            EXPECT_GE(acc.count[i], 1.0);
            EXPECT_NEAR(back[i], img[i], 1e-12);
          }
        }
      }
    }
  }
}

TEST(AccumulatePatches, GeometryMismatchThrows) {
  const auto patches = pp::extract_patches(random_image(10, 10, 7), 4, 1);
  EXPECT_THROW(pp::accumulate_patches(patches, 11, 10), pp::DimensionMismatch);
  EXPECT_THROW(pp::accumulate_patches(pp::PatchSet(Eigen::MatrixXd::Zero(16, 3)), 10, 10),
               pp::InvalidArgument);
}

TEST(GaussianNoise, ZeroSigmaIsIdentity) {
  const auto img = random_image(9, 9, 8);
  EXPECT_EQ(pp::add_gaussian_noise(img, 0.0, 3), img);
}

TEST(GaussianNoise, MomentsOnLargeImage) {
  const pp::ImageBuffer img(1000, 1000, 100.0);
  const auto noisy = pp::add_gaussian_noise(img, 20.0, 42);
  double sum = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < noisy.size(); ++i) {
    const double e = noisy[i] - 100.0;
    sum += e;
    sq += e * e;
  }
  const double n = static_cast<double>(noisy.size());
  const double mean = sum / n;
  EXPECT_NEAR(mean, 0.0, 0.1);
  EXPECT_NEAR(std::sqrt(sq / n - mean * mean), 20.0, 0.2);
}

TEST(GaussianNoise, DeterministicPerSeedNoClipping) {
  const pp::ImageBuffer img(50, 50, 250.0);
  const auto a = pp::add_gaussian_noise(img, 30.0, 5);
  EXPECT_EQ(a, pp::add_gaussian_noise(img, 30.0, 5));
  EXPECT_NE(a, pp::add_gaussian_noise(img, 30.0, 6));
  EXPECT_TRUE(std::any_of(a.pixels().begin(), a.pixels().end(), [](double v) { return v > 255.0; }));
}

TEST(Psnr, IdenticalImagesSentinel) {
  const auto img = random_image(7, 7, 9);
  EXPECT_EQ(pp::psnr(img, img), 99.0);
}

TEST(Psnr, UnitErrorEverywhere) {
  const pp::ImageBuffer a(16, 16, 100.0);
  const pp::ImageBuffer b(16, 16, 101.0);
  EXPECT_NEAR(pp::psnr(a, b), 48.1308, 5e-5);
  EXPECT_NEAR(pp::psnr(a, b), 20.0 * std::log10(255.0), 1e-12);
}

TEST(Psnr, FullScaleErrorIsZeroDecibels) {
  EXPECT_NEAR(pp::psnr(pp::ImageBuffer(4, 4, 0.0), pp::ImageBuffer(4, 4, 255.0)), 0.0, 1e-12);
}

TEST(Psnr, ShapeMismatchThrows) {
  EXPECT_THROW(pp::psnr(pp::ImageBuffer(4, 4), pp::ImageBuffer(4, 5)), pp::DimensionMismatch);
}

TEST(Pgm, BinaryRoundTripOfQuantizedImage) {
  const auto img = pp::quantize(random_image(13, 6, 10));
  std::stringstream s;
  pp::write_pgm(img, s);
  EXPECT_EQ(pp::read_pgm(s), img);
}

TEST(Pgm, ReadsAsciiWithComments) {
  std::istringstream s("P2\n# a comment\n3 2\n# another\n255\n0 10 20\n30 40 255\n");
  const auto img = pp::read_pgm(s);
  ASSERT_EQ(img.width(), 3u);
  ASSERT_EQ(img.height(), 2u);
  EXPECT_EQ(img.at(1, 2), 255.0);
  EXPECT_EQ(img.at(0, 1), 10.0);
}

TEST(Pgm, WriteClampsAndRounds) {
  pp::ImageBuffer img(3, 1);
  img[0] = -12.0;
  img[1] = 127.5;
  img[2] = 300.0;
  std::stringstream s;
  pp::write_pgm(img, s);
  const auto back = pp::read_pgm(s);
  EXPECT_EQ(back[0], 0.0);
  EXPECT_EQ(back[1], 128.0);
  EXPECT_EQ(back[2], 255.0);
}

TEST(Pgm, RejectsUnsupportedInput) {
  std::istringstream wide("P5\n2 2\n65535\n");
  EXPECT_THROW(pp::read_pgm(wide), pp::IoError);
  std::istringstream magic("P6\n2 2\n255\n");
  EXPECT_THROW(pp::read_pgm(magic), pp::IoError);
  std::istringstream short_data("P5\n4 4\n255\nab");
  EXPECT_THROW(pp::read_pgm(short_data), pp::IoError);
}

TEST(Pgm, FileRoundTrip) {
  pp::testing::TempDir dir("pgm");
  const auto img = pp::quantize(random_image(20, 11, 11));
  pp::write_pgm(img, dir / "a.pgm");
  EXPECT_EQ(pp::read_pgm(dir / "a.pgm"), img);
  EXPECT_FALSE(std::filesystem::exists(dir / "a.pgm.tmp"));
}
