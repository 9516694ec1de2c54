#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "test_support.hpp"

namespace fractool {
namespace {

using testing::kPhi;

constexpr double kDeg = std::numbers::pi / 180.0;

FractalSystem koch_system() {
  FractalSystem s;
  s.name = "koch";
  s.types = {{"S", 1.0}};
  s.generators = {{0, {{0, 0.0}, {0, 60 * kDeg}, {0, -60 * kDeg}, {0, 0.0}}, 0.0}};
  return s;
}

FractalSystem pentagon_system(double a_angle_deg = 36.0) {
  FractalSystem s;
  s.name = "pentagon";
  s.types = {{"A", kPhi}, {"B", 1.0}, {"C", 1.0}};
  s.generators = {
      {0, {{0, a_angle_deg * kDeg, true}, {2, -72 * kDeg, true}, {1, 0.0}}, 0.0},
      {1, {{0, 36 * kDeg, true}, {0, -36 * kDeg, true}}, 0.0},
      {2, {{1, 36 * kDeg, true}, {1, -36 * kDeg, true}}, 0.0},
  };
  return s;
}

TEST(ChainDisplacement, KochSumsToThree) {
  const auto s = koch_system();
  const Vec2 d = chain_displacement(s.generators[0], s);
  EXPECT_NEAR(d.x, 3.0, 1e-15);
  EXPECT_NEAR(d.y, 0.0, 1e-15);
}

TEST(ChainDisplacement, PentagonGeneratorBIsPhiSquared) {
  const auto s = pentagon_system();
  const Vec2 d = chain_displacement(s.generators[1], s);
  // 2 phi cos 36 = phi^2
  EXPECT_NEAR(d.x, kPhi * kPhi, 1e-12);
  EXPECT_NEAR(d.x, 2.618034, 1e-6);
  EXPECT_NEAR(d.y, 0.0, 1e-15);
}

TEST(ChainDisplacement, SingleStepIsIdentity) {
  FractalSystem s;
  s.types = {{"S", 1.0}};
  s.generators = {{0, {{0, 0.0}}, 0.0}};
  const Vec2 d = chain_displacement(s.generators[0], s);
  EXPECT_EQ(d.x, 1.0);
  EXPECT_EQ(d.y, 0.0);
}

TEST(ChainDisplacement, BadIndexIsStructuralError) {
  FractalSystem s;
  s.types = {{"S", 1.0}};
  s.generators = {{0, {{3, 0.0}}, 0.0}};
  try {
    chain_displacement(s.generators[0], s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::structural);
  }
}

TEST(DeriveScale, KochIsOneThird) {
  const auto s = koch_system();
  EXPECT_NEAR(derive_scale(s.generators[0], s), 1.0 / 3.0, 1e-15);
}

TEST(DeriveScale, PentagonScales) {
  const auto s = pentagon_system();
  EXPECT_NEAR(derive_scale(s.generators[0], s), 1.0 / kPhi, 1e-12);
  EXPECT_NEAR(derive_scale(s.generators[1], s), 1.0 / (kPhi * kPhi), 1e-12);
  EXPECT_NEAR(derive_scale(s.generators[2], s), 1.0 / kPhi, 1e-12);
  EXPECT_NEAR(derive_scale(s.generators[0], s), 0.618034, 1e-6);
  EXPECT_NEAR(derive_scale(s.generators[1], s), 0.381966, 1e-6);
}

TEST(DeriveScale, DegenerateAndNonContracting) {
  FractalSystem s;
  s.types = {{"S", 1.0}};
  s.generators = {{0, {{0, 0.0}, {0, std::numbers::pi}}, 0.0}};
  try {
    derive_scale(s.generators[0], s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::degenerate_generator);
  }
  s.generators = {{0, {{0, 0.0}}, 0.0}};
  try {
    derive_scale(s.generators[0], s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::non_contracting_generator);
  }
}

bool has_code(const ValidationReport& r, const std::string& code) {
  for (const auto& f : r.findings)
    if (f.code == code) return true;
  return false;
}

TEST(ValidateSystem, FixturesAreValid) {
  EXPECT_TRUE(validate_system(koch_system(), 1e-9).valid);
  EXPECT_TRUE(validate_system(pentagon_system(), 1e-9).valid);
}

TEST(ValidateSystem, PentagonGeneratorAClosesAnalytically) {
  // phi (cos 36, sin 36) + (1, 0) + (cos 72, -sin 72) = (phi^2, 0)
  const double x = kPhi * std::cos(36 * kDeg) + 1.0 + std::cos(72 * kDeg);
  const double y = kPhi * std::sin(36 * kDeg) - std::sin(72 * kDeg);
  EXPECT_NEAR(x, kPhi * kPhi, 1e-14);
  EXPECT_NEAR(y, 0.0, 1e-15);
  const auto s = pentagon_system();
  const Vec2 d = chain_displacement(s.generators[0], s);
  EXPECT_NEAR(d.x, x, 1e-14);
}

TEST(ValidateSystem, PerturbedAngleBreaksClosure) {
  const auto s = pentagon_system(37.0);
  const auto report = validate_system(s, 1e-9);
  EXPECT_FALSE(report.valid);
  EXPECT_TRUE(has_code(report, "closure-error"));
  // Independent residual: rotate the A step by 1 degree and measure.
  const double x = kPhi * std::cos(37 * kDeg) + 1.0 + std::cos(72 * kDeg);
  const double y = kPhi * std::sin(37 * kDeg) - std::sin(72 * kDeg);
  const double r = kPhi / std::hypot(x, y);
  const double residual = std::hypot(r * x - kPhi, r * y) / kPhi;
  EXPECT_GT(residual, 1e-3);
}

TEST(ValidateSystem, StructuralProblemsAreReported) {
  FractalSystem s;
  s.types = {{"A", 1.0}, {"A", -1.0}};
  s.generators = {{0, {{5, 0.0}}, 0.0}};
  s.initiator_type = 7;
  const auto r = validate_system(s);
  EXPECT_FALSE(r.valid);
  EXPECT_TRUE(has_code(r, "duplicate-name"));
  EXPECT_TRUE(has_code(r, "non-positive-length"));
  EXPECT_TRUE(has_code(r, "missing-generator"));
  EXPECT_TRUE(has_code(r, "bad-index"));
}

TEST(ValidateSystem, DuplicateGeneratorAndNonContracting) {
  FractalSystem s;
  s.types = {{"A", 1.0}};
  s.generators = {{0, {{0, 0.0}}, 0.0}, {0, {{0, 0.0}, {0, 0.0}}, 0.0}};
  const auto r = validate_system(s);
  EXPECT_TRUE(has_code(r, "duplicate-generator"));
  EXPECT_TRUE(has_code(r, "non-contracting-generator"));
}

TEST(ValidateSystem, FindingValidityMatchesSeverity) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 20; ++i) {
    auto s = testing::random_system(rng, 1 + i % 4, false);
    const auto r = validate_system(s);
    EXPECT_EQ(r.valid, r.first_error() == nullptr);
    EXPECT_TRUE(r.valid);
  }
}

TEST(ModelProperties, ScaleInvarianceOfDerivedFactors) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> c(0.01, 100.0);
  for (int i = 0; i < 50; ++i) {
    auto s = testing::random_system(rng, 1 + i % 4, false);
    auto scaled = s;
    const double factor = c(rng);
    for (auto& t : scaled.types) t.length *= factor;
    EXPECT_EQ(validate_system(s).valid, validate_system(scaled).valid);
    for (std::size_t g = 0; g < s.generators.size(); ++g)
      EXPECT_NEAR(derive_scale(s.generators[g], s), derive_scale(scaled.generators[g], scaled), 1e-14);
  }
}

TEST(ModelProperties, DerivationIsDeterministic) {
  const auto a = pentagon_system();
  const auto b = pentagon_system();
  for (std::size_t g = 0; g < 3; ++g) EXPECT_EQ(derive_scale(a.generators[g], a), derive_scale(b.generators[g], b));
}

TEST(ModelProperties, AngleCanonicalization) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> a(-10.0, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const double theta = a(rng);
    const GeneratorStep s1(0, theta), s2(0, theta + 2 * std::numbers::pi);
    EXPECT_NEAR(s1.angle(), s2.angle(), 1e-12);
    EXPECT_GT(s1.angle(), -std::numbers::pi);
    EXPECT_LE(s1.angle(), std::numbers::pi);
  }
  EXPECT_EQ(GeneratorStep(0, -std::numbers::pi).angle(), std::numbers::pi);
  EXPECT_NEAR(GeneratorStep(0, 396 * kDeg).angle(), 36 * kDeg, 1e-15);
}

TEST(BuildSystem, DerivesScalesOrThrows) {
  const auto s = build_system(pentagon_system());
  EXPECT_NEAR(s.generators[1].scale, 1.0 / (kPhi * kPhi), 1e-12);
  EXPECT_THROW(build_system(pentagon_system(37.0)), ValidationError);
}

}  // namespace
}  // namespace fractool
