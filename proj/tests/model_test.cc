#include <cmath>
#include <sstream>
#include <stdexcept>

#include <gtest/gtest.h>

#include "maxlin/csv_io.h"
#include "maxlin/model.h"
#include "maxlin/rng.h"

namespace maxlin {
namespace {

ParamBlocks RandomBlocks(Rng& rng, std::size_t k, std::size_t p) {
  std::vector<double> flat(k * p);
  for (double& v : flat) v = rng.Normal();
  return ParamBlocks(k, p, flat);
}

std::vector<double> RandomVector(Rng& rng, std::size_t p) {
  std::vector<double> v(p);
  for (double& e : v) e = rng.Normal();
  return v;
}

TEST(ParamBlocksTest, RejectsBadShapes) {
  EXPECT_THROW(ParamBlocks(0, 2, {}), std::invalid_argument);
  EXPECT_THROW(ParamBlocks(2, 0, {}), std::invalid_argument);
  EXPECT_THROW(ParamBlocks(2, 2, {1, 2, 3}), std::invalid_argument);
  EXPECT_THROW(ParamBlocks(1, 2, {1, NAN}), std::invalid_argument);
  EXPECT_THROW(ParamBlocks(1, 1, {INFINITY}), std::invalid_argument);
}

TEST(ParamBlocksTest, BlocksViewTheFlatLayout) {
  const ParamBlocks b = ParamBlocks::FromBlocks({{1, 2}, {3, 4}, {5, 6}});
  EXPECT_EQ(b.k(), 3u);
  EXPECT_EQ(b.p(), 2u);
  EXPECT_EQ(b.block(1)[0], 3.0);
  EXPECT_EQ(b.flat()[5], 6.0);
}

TEST(DatasetTest, ValidateChecksSizesAndFiniteness) {
  Dataset d{DenseMatrix::FromRows({{1, 2}, {3, 4}}), {1, 2}, std::nullopt};
  EXPECT_NO_THROW(d.Validate());
  d.y.push_back(3);
  EXPECT_THROW(d.Validate(), std::invalid_argument);
  d.y = {1, NAN};
  EXPECT_THROW(d.Validate(), std::invalid_argument);
  d.y = {1, 2};
  d.w = std::vector<double>{0.0};
  EXPECT_THROW(d.Validate(), std::invalid_argument);
}

TEST(EvalMaxLinearTest, PicksTheLargestComponent) {
  const ParamBlocks b = ParamBlocks::FromBlocks({{1, 0}, {0, 1}});
  const std::vector<double> x = {2, 1};
  const MaxLinearValue v = EvalMaxLinear(x, b);
  EXPECT_EQ(v.value, 2.0);
  EXPECT_EQ(v.argmax, 0u);
}

TEST(EvalMaxLinearTest, ZeroInputGivesZeroAtFirstComponent) {
  Rng rng(3);
  const ParamBlocks b = RandomBlocks(rng, 4, 3);
  const std::vector<double> x = {0, 0, 0};
  const MaxLinearValue v = EvalMaxLinear(x, b);
  EXPECT_EQ(v.value, 0.0);
  EXPECT_EQ(v.argmax, 0u);
}

TEST(EvalMaxLinearTest, TiesGoToTheLowestIndex) {
  const ParamBlocks b = ParamBlocks::FromBlocks({{1, 1}, {1, 1}});
  const std::vector<double> x = {1, 1};
  const MaxLinearValue v = EvalMaxLinear(x, b);
  EXPECT_EQ(v.value, 2.0);
  EXPECT_EQ(v.argmax, 0u);
}

TEST(SubgradientTest, CarriesXInTheArgmaxBlock) {
  const ParamBlocks b = ParamBlocks::FromBlocks({{1, 0}, {0, 1}});
  EXPECT_EQ(Subgradient(std::vector<double>{2, 1}, b), (std::vector<double>{2, 1, 0, 0}));
  EXPECT_EQ(Subgradient(std::vector<double>{0, 3}, b), (std::vector<double>{0, 0, 0, 3}));
  const ParamBlocks tie = ParamBlocks::FromBlocks({{1, 2}, {1, 2}});
  EXPECT_EQ(Subgradient(std::vector<double>{1, 1}, tie), (std::vector<double>{1, 1, 0, 0}));
}

TEST(ConeIndexTest, HalfPlanes) {
  const ParamBlocks b = ParamBlocks::FromBlocks({{1, 0}, {-1, 0}});
  EXPECT_EQ(ConeIndex(std::vector<double>{1, 5}, b), 0u);
  EXPECT_EQ(ConeIndex(std::vector<double>{-1, 5}, b), 1u);
  EXPECT_EQ(ConeIndex(std::vector<double>{0, 5}, b), 0u);
}

TEST(Norm12Test, SumsBlockNorms) {
  EXPECT_DOUBLE_EQ(Norm12(ParamBlocks::FromBlocks({{3, 4}, {0, 0}})), 5.0);
  EXPECT_EQ(Norm12(ParamBlocks(3, 2)), 0.0);
  EXPECT_DOUBLE_EQ(Norm12(ParamBlocks::FromBlocks({{1, 0}, {0, 1}})), 2.0);
}

TEST(ObjectiveTest, LadAndPositiveResidual) {
  const ParamBlocks b = ParamBlocks::FromBlocks({{1.0}});
  Dataset one{DenseMatrix::FromRows({{3}}), {1}, std::nullopt};
  EXPECT_DOUBLE_EQ(LadObjective(b, one), 2.0);
  // Residuals f - y = (1, -3).
  Dataset two{DenseMatrix::FromRows({{2}, {1}}), {1, 4}, std::nullopt};
  EXPECT_DOUBLE_EQ(LadObjective(b, two), 2.0);
  EXPECT_DOUBLE_EQ(PositiveResidualObjective(b, two), 0.5);
  Dataset below{DenseMatrix::FromRows({{1}, {1}}), {2, 5}, std::nullopt};
  EXPECT_EQ(PositiveResidualObjective(b, below), 0.0);
}

TEST(ObjectiveTest, TruthWithNonnegativeNoiseHasNoPositiveResidual) {
  Rng rng(11);
  const ParamBlocks star = RandomBlocks(rng, 3, 4);
  Dataset d;
  d.X = DenseMatrix(20, 4);
  for (std::size_t i = 0; i < 20; ++i) {
    for (std::size_t c = 0; c < 4; ++c) d.X(i, c) = rng.Normal();
    d.y.push_back(EvalMaxLinear(d.X.row(i), star).value + std::abs(rng.Normal()));
  }
  EXPECT_EQ(PositiveResidualObjective(star, d), 0.0);
  for (std::size_t i = 0; i < 20; ++i) d.y[i] = EvalMaxLinear(d.X.row(i), star).value;
  EXPECT_EQ(LadObjective(star, d), 0.0);
}

TEST(NormalizedErrorTest, Examples) {
  const ParamBlocks star = ParamBlocks::FromBlocks({{1, 2}, {3, 4}});
  EXPECT_EQ(NormalizedError(star, star), 0.0);
  const ParamBlocks twice = ParamBlocks::FromBlocks({{2, 4}, {6, 8}});
  EXPECT_DOUBLE_EQ(NormalizedError(twice, star), 1.0);
  EXPECT_DOUBLE_EQ(NormalizedError(ParamBlocks::FromBlocks({{1, 1}}),
                                   ParamBlocks::FromBlocks({{1, 0}})),
                   1.0);
  EXPECT_THROW(NormalizedError(star, ParamBlocks(2, 2)), std::invalid_argument);
  EXPECT_THROW(NormalizedError(ParamBlocks(1, 2), star), std::invalid_argument);
}

TEST(ModelPropertyTest, RandomInputs) {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 1 + trial % 5, p = 1 + trial % 4;
    const ParamBlocks b = RandomBlocks(rng, k, p);
    const ParamBlocks b2 = RandomBlocks(rng, k, p);
    const std::vector<double> x = RandomVector(rng, p);
    const MaxLinearValue v = EvalMaxLinear(x, b);
    EXPECT_EQ(v.value, Dot(x, b.block(v.argmax)));
    for (std::size_t j = 0; j < k; ++j) EXPECT_GE(v.value, Dot(x, b.block(j)));
    EXPECT_EQ(ConeIndex(x, b), v.argmax);

    // One nonzero block and the Euler identity <g, beta> = f(beta).
    const std::vector<double> g = Subgradient(x, b);
    std::size_t nonzero_blocks = 0;
    for (std::size_t j = 0; j < k; ++j) {
      bool any = false;
      for (std::size_t c = 0; c < p; ++c) any |= g[j * p + c] != 0.0;
      nonzero_blocks += any;
    }
    EXPECT_LE(nonzero_blocks, 1u);
    EXPECT_NEAR(Dot(g, b.flat()), v.value, 1e-12 * (1 + std::abs(v.value)));

    // Norm12: triangle inequality and homogeneity.
    std::vector<double> sum(k * p);
    for (std::size_t i = 0; i < k * p; ++i) sum[i] = b.flat()[i] + b2.flat()[i];
    EXPECT_LE(Norm12(ParamBlocks(k, p, sum)), Norm12(b) + Norm12(b2) + 1e-12);
    std::vector<double> scaled(k * p);
    for (std::size_t i = 0; i < k * p; ++i) scaled[i] = -2.5 * b.flat()[i];
    EXPECT_NEAR(Norm12(ParamBlocks(k, p, scaled)), 2.5 * Norm12(b), 1e-12);

    // Convexity of f_i in beta.
    const double t = rng.Uniform();
    std::vector<double> mix(k * p);
    for (std::size_t i = 0; i < k * p; ++i) mix[i] = t * b.flat()[i] + (1 - t) * b2.flat()[i];
    EXPECT_LE(EvalMaxLinear(x, ParamBlocks(k, p, mix)).value,
              t * v.value + (1 - t) * EvalMaxLinear(x, b2).value + 1e-12);

    // Positive-residual objective never exceeds LAD.
    Dataset d;
    d.X = DenseMatrix(5, p);
    for (std::size_t i = 0; i < 5; ++i) {
      for (std::size_t c = 0; c < p; ++c) d.X(i, c) = rng.Normal();
      d.y.push_back(rng.Normal());
    }
    EXPECT_LE(PositiveResidualObjective(b, d), LadObjective(b, d));
  }
}

TEST(CsvTest, DoublesRoundTrip) {
  for (double v : {0.1, -1e-300, 12345.678, 1.0 / 3.0, 5e-324}) {
    EXPECT_EQ(ParseDouble(FormatDouble(v)), v);
  }
  EXPECT_EQ(FormatDouble(INFINITY), "inf");
  EXPECT_TRUE(std::isinf(ParseDouble("inf")));
  EXPECT_THROW(ParseDouble("1.5x"), CsvError);
  EXPECT_THROW(ParseDouble(""), CsvError);
}

TEST(CsvTest, DatasetRoundTripIsExact) {
  Rng rng(5);
  Dataset d;
  d.X = DenseMatrix(7, 3);
  d.w = std::vector<double>();
  for (std::size_t i = 0; i < 7; ++i) {
    for (std::size_t c = 0; c < 3; ++c) d.X(i, c) = rng.Normal();
    d.y.push_back(rng.Normal());
    d.w->push_back(rng.Normal());
  }
  std::stringstream s;
  WriteDatasetCsv(s, d);
  EXPECT_EQ(s.str().substr(0, s.str().find('\n')), "x1,x2,x3,y,w");
  const Dataset back = ReadDatasetCsv(s);
  EXPECT_EQ(back.X, d.X);
  EXPECT_EQ(back.y, d.y);
  EXPECT_EQ(back.w, d.w);
}

TEST(CsvTest, DatasetWithoutNoiseColumn) {
  std::stringstream s("x1,x2,y\n1,2,3\n4,5,6\n");
  const Dataset d = ReadDatasetCsv(s);
  EXPECT_EQ(d.n(), 2u);
  EXPECT_EQ(d.p(), 2u);
  EXPECT_FALSE(d.w.has_value());
  EXPECT_EQ(d.y[1], 6.0);
}

TEST(CsvTest, MalformedDatasetsAreRejected) {
  for (const char* text : {"", "x1,y\n1\n", "x1,z\n1,2\n", "x1,y\n1,abc\n", "x2,y\n1,2\n"}) {
    std::stringstream s(text);
    EXPECT_THROW(ReadDatasetCsv(s), CsvError) << text;
  }
}

TEST(CsvTest, ParamBlocksRoundTrip) {
  const ParamBlocks b = ParamBlocks::FromBlocks({{0.1, -2}, {3e-17, 4}, {5, 6}});
  std::stringstream s;
  WriteParamBlocksCsv(s, b);
  EXPECT_EQ(s.str().substr(0, s.str().find('\n')), "component,coord1,coord2");
  EXPECT_EQ(ReadParamBlocksCsv(s), b);
  std::stringstream bad("component,coord1\n2,1.0\n");
  EXPECT_THROW(ReadParamBlocksCsv(bad), CsvError);
}

}  // namespace
}  // namespace maxlin
