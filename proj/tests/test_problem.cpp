#include "helpers.hpp"
#include "oracles.hpp"

#include "sparselab/io.hpp"
#include "sparselab/serialize.hpp"

#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <fstream>

using namespace sparselab;
using namespace testing_helpers;

TEST(Normalize, AlreadyNormalizedColumnIsUnchanged)
{
    Matrix x(4, 2);
    x << 1, 2, 1, 0, 1, 0, 1, 0;
    const auto out = normalize_columns(RegressionProblem(x, Vector::Zero(4)));
    EXPECT_TRUE(out.design().isApprox(x, 1e-15));
    EXPECT_TRUE(out.normalized());
    EXPECT_NEAR(out.column_scales()(0), 1.0, 1e-15);
}

TEST(Normalize, ScalesToSqrtN)
{
    Matrix x(4, 1);
    x << 1, 0, 0, 0;
    const auto out = normalize_columns(RegressionProblem(x, Vector::Zero(4)));
    EXPECT_DOUBLE_EQ(out.design()(0, 0), 2.0);
    EXPECT_DOUBLE_EQ(out.column_scales()(0), 2.0);
    EXPECT_LE(normalization_defect(out.design()), 1e-9);
}

TEST(Normalize, ZeroColumnThrowsWithIndex)
{
    Matrix x = Matrix::Ones(5, 3);
    x.col(1).setZero();
    try {
        normalize_columns(RegressionProblem(x, Vector::Zero(5)));
        FAIL() << "expected ZeroColumn";
    } catch (const ZeroColumn& e) {
        EXPECT_EQ(e.column(), 1);
    }
}

TEST(Normalize, RandomDesignsMeetTolerance)
{
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Matrix x = 3.0 * random_matrix(37, 9, seed);
        const auto out = normalize_columns(RegressionProblem(x, Vector::Zero(37)));
        EXPECT_LE(normalization_defect(out.design()), 1e-9);
        // original columns are recovered by the recorded scales
        EXPECT_TRUE((out.design().array().rowwise() / out.column_scales().transpose().array())
                        .matrix()
                        .isApprox(x, 1e-12));
    }
}

TEST(Problem, RejectsBadShapes)
{
    EXPECT_THROW(RegressionProblem(Matrix::Ones(3, 2), Vector::Ones(4)), InvalidArgument);
    EXPECT_THROW(RegressionProblem(Matrix(0, 2), Vector(0)), InvalidArgument);
    Matrix x = Matrix::Ones(3, 2);
    x(0, 0) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(RegressionProblem(x, Vector::Ones(3)), InvalidArgument);
}

TEST(Gram, OrthogonalIsIdentity)
{
    const auto prob = orthogonal_problem(20, 6, Vector::Zero(6), 0.0, 1);
    EXPECT_TRUE(gram(prob).isApprox(Matrix::Identity(6, 6), 1e-12));
    EXPECT_TRUE(gram(prob, {1, 4}).isApprox(Matrix::Identity(2, 2), 1e-12));
}

TEST(Gram, CorrelatedPair)
{
    const auto prob = correlated_pair(50, 0.3, 2);
    Matrix expected(2, 2);
    expected << 1, 0.3, 0.3, 1;
    EXPECT_TRUE(gram(prob).isApprox(expected, 1e-12));
}

TEST(Gram, IndexOutOfRange)
{
    const auto prob = random_problem(10, 4, 1);
    EXPECT_THROW(gram(prob, {0, 4}), IndexOutOfRange);
    EXPECT_THROW(gram(prob, {}), InvalidArgument);
}

TEST(Gram, CollinearPopulation)
{
    const auto data = population_collinear(1.0, 1.0);
    const Scalar h = 1.0 / std::sqrt(2.0);
    Matrix expected(3, 3);
    expected << 1, h, 0, h, 1, h, 0, h, 1;
    EXPECT_TRUE(gram(data.problem).isApprox(expected, 1e-12));
    EXPECT_LE((gram(data.problem).diagonal().array() - 1.0).abs().maxCoeff(), 1e-9);
}

TEST(Gram, CollinearSampleApproachesPopulation)
{
    SyntheticSpec spec;
    spec.n = 100000;
    spec.p = 3;
    spec.s = 3;
    spec.design = DesignKind::Collinear;
    spec.sigma = 0.0;
    spec.seed = 5;
    const auto data = simulate(spec);
    const Scalar h = 1.0 / std::sqrt(2.0);
    Matrix expected(3, 3);
    expected << 1, h, 0, h, 1, h, 0, h, 1;
    EXPECT_LE((gram(data.problem) - expected).cwiseAbs().maxCoeff(), 2e-2);
}

TEST(SymEigs, SmallClosedForms)
{
    EXPECT_TRUE(sym_eigs(Matrix::Identity(3, 3)).isApprox(Vector::Ones(3)));
    Matrix a(2, 2);
    a << 1, -0.4, -0.4, 1;
    const Vector e = sym_eigs(a);
    EXPECT_NEAR(e(0), 0.6, 1e-14);
    EXPECT_NEAR(e(1), 1.4, 1e-14);
}

TEST(SymEigs, MatchesCharacteristicPolynomialRoots)
{
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Matrix a = random_symmetric(5, 100 + seed);
        const Vector mine = sym_eigs(a);
        const Vector ref = oracle::real_roots(oracle::char_poly(a));
        ASSERT_EQ(ref.size(), 5);
        EXPECT_LE((mine - ref).cwiseAbs().maxCoeff(), 1e-8) << "seed " << seed;
        for (Index i = 1; i < 5; ++i) {
            EXPECT_LE(mine(i - 1), mine(i));
        }
        EXPECT_NEAR(mine.sum(), a.trace(), 1e-8 * std::max(1.0, std::abs(a.trace())));
    }
}

TEST(SymEigs, ReconstructionResidual)
{
    const Matrix a = random_symmetric(7, 9);
    const auto eig = sym_eigen_decomposition(a);
    const Matrix back = eig.vectors * eig.values.asDiagonal() * eig.vectors.transpose();
    EXPECT_LE((a - back).norm(), 1e-8 * a.norm());
}

TEST(SymEigs, RejectsAsymmetric)
{
    Matrix a(2, 2);
    a << 1, 2, 3, 4;
    EXPECT_THROW(sym_eigs(a), NotSymmetric);
}

TEST(MaxSingularValue, Examples)
{
    EXPECT_EQ(max_singular_value(Matrix::Zero(3, 2)), 0.0);
    Matrix one(1, 1);
    one << -3;
    EXPECT_DOUBLE_EQ(max_singular_value(one), 3.0);
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 2;
    d(1, 1) = 5;
    EXPECT_NEAR(max_singular_value(d), 5.0, 1e-14);
    const Matrix m = random_matrix(4, 7, 3);
    EXPECT_NEAR(max_singular_value(m), oracle::spectral_norm(m), 1e-10);
}

TEST(LeastSquares, ExactSpanHasZeroResidual)
{
    const auto prob = random_problem(30, 5, 4);
    const Vector y = prob.design().col(1) * 2.0 - prob.design().col(3);
    const auto fit = least_squares(prob.with_response(y), {1, 3});
    EXPECT_NEAR(fit.coefficients(0), 2.0, 1e-12);
    EXPECT_NEAR(fit.coefficients(1), -1.0, 1e-12);
    EXPECT_LE(fit.residual.norm(), 1e-10);
}

TEST(LeastSquares, SingleColumn)
{
    Matrix x(3, 1);
    x << 1, 2, 3;
    const RegressionProblem prob(x, 2.0 * x.col(0));
    EXPECT_NEAR(least_squares(prob, {0}).coefficients(0), 2.0, 1e-14);
}

TEST(LeastSquares, CollinearOuterPair)
{
    // alpha = 1, beta = 2 on raw columns: Y = X1 + X2 + X3 = 2 X1 + 3 X3.
    const auto data = population_collinear(1.0, 2.0, 8, false);
    const auto fit = least_squares(data.problem, {0, 2});
    EXPECT_NEAR(fit.coefficients(0), 2.0, 1e-10);
    EXPECT_NEAR(fit.coefficients(1), 3.0, 1e-10);
}

TEST(LeastSquares, ResidualOrthogonalAndMeanSquare)
{
    const auto prob = random_problem(40, 6, 8, 3, 1.0);
    const IndexSet l{0, 2, 5};
    const auto fit = least_squares(prob, l);
    const Vector inner = select_columns(prob.design(), l).transpose() * fit.residual;
    EXPECT_LE(inner.cwiseAbs().maxCoeff(), 1e-8 * prob.n());
    EXPECT_NEAR(fit.residual_mean_square, fit.rss / (40 - 3), 1e-12);
}

TEST(LeastSquares, RankDeficientNamesSubset)
{
    Matrix x = random_matrix(10, 3, 2);
    x.col(2) = x.col(0) + x.col(1);
    const RegressionProblem prob(x, Vector::Ones(10));
    try {
        least_squares(prob, {0, 1, 2});
        FAIL();
    } catch (const RankDeficient& e) {
        EXPECT_EQ(e.subset(), (IndexSet{0, 1, 2}));
    }
}

TEST(Simulate, NoiselessResponseIsExact)
{
    for (auto kind : {DesignKind::IidGaussian, DesignKind::Orthogonal, DesignKind::Correlated}) {
        SyntheticSpec spec;
        spec.n = 30;
        spec.p = 12;
        spec.s = 4;
        spec.sigma = 0.0;
        spec.design = kind;
        spec.correlation = 0.4;
        spec.seed = 11;
        const auto data = simulate(spec);
        EXPECT_LE((data.problem.response() - data.problem.design() * data.beta0.values()).cwiseAbs().maxCoeff(),
                  1e-12);
        EXPECT_EQ(data.beta0.sparsity(), 4);
        EXPECT_LE(normalization_defect(data.problem.design()), 1e-9);
        // +-1 on the raw scale
        const Vector raw = data.problem.to_original_scale(data.beta0.values());
        for (Index j : data.beta0.support()) {
            EXPECT_NEAR(std::abs(raw(j)), 1.0, 1e-12);
        }
    }
}

TEST(Simulate, SameSeedIsBitIdentical)
{
    SyntheticSpec spec;
    spec.n = 25;
    spec.p = 40;
    spec.s = 5;
    spec.seed = 1234;
    const auto a = simulate(spec);
    const auto b = simulate(spec);
    ASSERT_EQ(a.problem.design().size(), b.problem.design().size());
    EXPECT_EQ(std::memcmp(a.problem.design().data(), b.problem.design().data(),
                          sizeof(double) * static_cast<std::size_t>(a.problem.design().size())),
              0);
    EXPECT_EQ(std::memcmp(a.problem.response().data(), b.problem.response().data(), sizeof(double) * 25), 0);
    EXPECT_EQ(std::memcmp(a.beta0.values().data(), b.beta0.values().data(), sizeof(double) * 40), 0);
    spec.seed = 1235;
    EXPECT_FALSE(simulate(spec).problem.design().isApprox(a.problem.design()));
}

TEST(Simulate, CollinearRawIdentity)
{
    SyntheticSpec spec;
    spec.n = 200;
    spec.p = 3;
    spec.s = 3;
    spec.design = DesignKind::Collinear;
    spec.alpha = 0.7;
    spec.beta = -1.8;
    spec.seed = 21;
    const auto data = simulate(spec);
    const Matrix raw = data.problem.design().array().rowwise() / data.problem.column_scales().transpose().array();
    const Vector defect = raw.col(1) - spec.alpha * raw.col(0) - spec.beta * raw.col(2);
    EXPECT_LE(defect.cwiseAbs().maxCoeff(), 1e-12 * raw.cwiseAbs().maxCoeff());
    EXPECT_TRUE(data.problem.to_original_scale(data.beta0.values()).isApprox(Vector::Ones(3), 1e-12));
}

TEST(Simulate, InvalidSpecs)
{
    SyntheticSpec spec;
    spec.s = spec.p + 1;
    EXPECT_THROW(simulate(spec), InvalidSpec);
    spec = {};
    spec.sigma = -1;
    EXPECT_THROW(simulate(spec), InvalidSpec);
    spec = {};
    spec.design = DesignKind::Collinear;
    EXPECT_THROW(simulate(spec), InvalidSpec);  // p = 10
    spec = {};
    spec.design = DesignKind::Orthogonal;
    spec.n = 5;
    EXPECT_THROW(simulate(spec), InvalidSpec);
    spec = {};
    spec.design = DesignKind::Correlated;
    spec.correlation = 1.0;
    EXPECT_THROW(simulate(spec), InvalidSpec);
    EXPECT_THROW(design_kind_from_string("banana"), InvalidSpec);
}

class IoTest : public ::testing::Test {
protected:
    void SetUp() override
    {
        dir_ = std::filesystem::temp_directory_path() /
               ("sparselab_io_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
                ::testing::UnitTest::GetInstance()->current_test_info()->name());
        std::filesystem::create_directories(dir_);
    }
    void TearDown() override { std::filesystem::remove_all(dir_); }
    std::filesystem::path dir_;
};

TEST_F(IoTest, DatasetRoundTripIsExact)
{
    SyntheticSpec spec;
    spec.n = 12;
    spec.p = 5;
    spec.s = 2;
    spec.seed = 3;
    const auto data = simulate(spec);
    io::write_dataset(dir_, data.problem, spec.seed, &data.beta0.values());
    const auto back = io::read_problem(dir_ / "design.csv", dir_ / "response.csv");
    EXPECT_EQ(back.design(), data.problem.design());
    EXPECT_EQ(back.response(), data.problem.response());
    EXPECT_EQ(io::read_csv_vector(dir_ / "beta.csv"), data.beta0.values());
    std::ifstream meta(dir_ / "metadata.json");
    const auto j = Json::parse(meta);
    EXPECT_EQ(j.at("n"), 12);
    EXPECT_EQ(j.at("p"), 5);
    EXPECT_EQ(j.at("seed"), 3);
    EXPECT_EQ(j.at("normalized"), true);
    EXPECT_EQ(j.at("column_scales").size(), 5u);
}

TEST_F(IoTest, MalformedCsvIsRejected)
{
    {
        std::ofstream(dir_ / "ragged.csv") << "1,2\n3\n";
        std::ofstream(dir_ / "text.csv") << "1,x\n";
        std::ofstream(dir_ / "row.csv") << "1,2,3\n";
    }
    EXPECT_THROW(io::read_csv_matrix(dir_ / "ragged.csv"), InvalidArgument);
    EXPECT_THROW(io::read_csv_matrix(dir_ / "text.csv"), InvalidArgument);
    EXPECT_THROW(io::read_csv_matrix(dir_ / "missing.csv"), InvalidArgument);
    EXPECT_EQ(io::read_csv_vector(dir_ / "row.csv").size(), 3);
}
