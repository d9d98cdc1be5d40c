#include "epp/data.hpp"
#include "epp/error.hpp"
#include "epp/preprocess.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace epp;

namespace {

std::filesystem::path temp_file(const std::string& name, const std::string& text)
{
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream(path, std::ios::binary) << text;
    return path;
}

} // namespace

TEST(Csv, ReadsHeaderAndValues)
{
    const DataMatrix d = load_csv(temp_file("epp_pp_ok.csv", "a,b\n1,2\n3,4\n5,6\n"));
    ASSERT_EQ(d.rows(), 3);
    ASSERT_EQ(d.cols(), 2);
    EXPECT_EQ(d.col_names, (std::vector<std::string>{"a", "b"}));
    EXPECT_EQ(d.row_labels.front(), "obs1");
    EXPECT_DOUBLE_EQ(d.values(2, 1), 6.0);
}

TEST(Csv, MissingLabelColumnIsNamed)
{
    CsvOptions opts;
    opts.label_column = "id";
    try {
        parse_csv("a,b\n1,2\n3,4\n", opts);
        FAIL();
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("'id'"), std::string::npos);
    }
}

TEST(Csv, BadCellCitesRow)
{
    try {
        parse_csv("a,b\n1,2\nabc,4\n");
        FAIL();
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos) << e.what();
    }
}

TEST(Csv, LabelsAndQuoting)
{
    CsvOptions opts;
    opts.label_column = "id";
    const DataMatrix d = parse_csv("id,\"x, y\",z\n\"r,1\",1,2\nr2,3,4\n", opts);
    EXPECT_EQ(d.row_labels, (std::vector<std::string>{"r,1", "r2"}));
    EXPECT_EQ(d.col_names, (std::vector<std::string>{"x, y", "z"}));
    EXPECT_THROW(parse_csv("id,a\nr,1\nr,2\n", opts), DataError);
}

TEST(Csv, RejectsEmptyRaggedAndNonFinite)
{
    EXPECT_THROW(parse_csv(""), DataError);
    EXPECT_THROW(parse_csv("a,b\n1,2\n3\n"), DataError);
    EXPECT_THROW(parse_csv("a\n1\nnan\n"), DataError);
    EXPECT_THROW(parse_csv("a\n1\n"), DataError);
    EXPECT_THROW(load_csv("/nonexistent/epp.csv"), DataError);
}

TEST(Standardize, CentersAndScales)
{
    Matrix x(3, 3);
    x << 1, 5, 0, 2, 5, 10, 3, 5, 10;
    const Fitted f = standardize(x.topRows(3));
    EXPECT_NEAR(f.z(0, 0), -1, 1e-12);
    EXPECT_NEAR(f.z(2, 0), 1, 1e-12);
    EXPECT_DOUBLE_EQ(f.preprocessor.center(0), 2);
    EXPECT_DOUBLE_EQ(f.preprocessor.scale(0), 1);
    EXPECT_TRUE(f.z.col(1).isZero());
    EXPECT_FALSE(f.preprocessor.warnings.empty());
    EXPECT_EQ(f.preprocessor.rank, 3);
    EXPECT_FALSE(f.preprocessor.sphered);

    Matrix two(2, 1);
    two << 0, 10;
    EXPECT_NEAR(standardize(two).z(0, 0), -0.70710678, 1e-6);
    EXPECT_NEAR(standardize(two).z(1, 0), 0.70710678, 1e-6);
}

TEST(Standardize, IdempotentAndUnitSd)
{
    const Matrix x = oracle::gaussian(50, 4, 3) * 7.0;
    const Fitted once = standardize(x);
    const Fitted twice = standardize(once.z);
    EXPECT_LT((once.z - twice.z).cwiseAbs().maxCoeff(), 1e-10);
    const Matrix cov = oracle::covariance(once.z);
    EXPECT_LT((cov.diagonal() - Vector::Ones(4)).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LT(once.z.colwise().mean().cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Whiten, IdentityCovariance)
{
    Matrix x = oracle::gaussian(300, 6, 8);
    x.col(1) += 0.8 * x.col(0);
    x.col(5) = 3 * x.col(5) - x.col(2);
    const Fitted f = whiten_svd(x);
    ASSERT_EQ(f.preprocessor.rank, 6);
    EXPECT_TRUE(f.preprocessor.sphered);
    EXPECT_LT((oracle::covariance(f.z) - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LT(f.z.colwise().mean().cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Whiten, AlreadyWhiteDataGivesNearOrthogonalWhitener)
{
    const Matrix x = oracle::gaussian(20000, 3, 1);
    const Fitted f = whiten_svd(x);
    const Matrix& w = f.preprocessor.whitener;
    EXPECT_EQ(f.preprocessor.rank, 3);
    EXPECT_LT((w.transpose() * w - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 0.05);
}

TEST(Whiten, RankDeficiency)
{
    Matrix x = oracle::gaussian(40, 2, 2);
    x.col(1) = 2 * x.col(0);
    EXPECT_EQ(whiten_svd(x).preprocessor.rank, 1);

    // Rank of a centered n x p matrix is min(n - 1, p); check against Eigen's rank-revealing QR.
    const Matrix wide = oracle::gaussian(5, 10, 9);
    const Matrix centered = wide.rowwise() - wide.colwise().mean();
    const Fitted f = whiten_svd(wide);
    EXPECT_EQ(f.preprocessor.rank, 4);
    EXPECT_EQ(f.preprocessor.rank, Eigen::ColPivHouseholderQR<Matrix>(centered).rank());
    EXPECT_LT((oracle::covariance(f.z) - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Whiten, NoVariation)
{
    const Matrix x = Matrix::Constant(5, 3, 2.0);
    try {
        whiten_svd(x);
        FAIL();
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("data has no variation"), std::string::npos);
    }
}

TEST(Whiten, RankInvariantToRowPermutationAndColumnScaling)
{
    Matrix x = oracle::gaussian(30, 5, 12);
    x.col(4) = x.col(0) + x.col(1);
    const int r = whiten_svd(x).preprocessor.rank;
    Matrix y = x.colwise().reverse();
    y.col(2) *= -250.0;
    y.col(3) *= 1e-3;
    EXPECT_EQ(r, 4);
    EXPECT_EQ(whiten_svd(y).preprocessor.rank, r);
}

TEST(Transform, ReproducesTrainingScores)
{
    const Matrix x = oracle::gaussian(60, 4, 5) * 3.0;
    for (bool sphere : {false, true}) {
        const Fitted f = prepare(x, sphere);
        EXPECT_EQ(transform(f.preprocessor, x), f.z);
    }
    Matrix col(3, 1);
    col << 1, 2, 3;
    const Fitted f = standardize(col);
    Matrix row(1, 1);
    row << 4;
    EXPECT_DOUBLE_EQ(transform(f.preprocessor, row)(0, 0), 2.0);
    row << 2;
    EXPECT_DOUBLE_EQ(transform(f.preprocessor, row)(0, 0), 0.0);
    EXPECT_THROW(transform(f.preprocessor, Matrix::Zero(1, 2)), ArgumentError);
}

TEST(OriginalCoords, UnwhitenedUnitScaleIsIdentity)
{
    Preprocessor pp;
    pp.center = Vector::Zero(3);
    pp.scale = Vector::Ones(3);
    pp.rank = 3;
    const Vector u = Vector{{-0.6, 0.0, 0.8}};
    EXPECT_LT((to_original_coords(pp, u) - u).norm(), 1e-15);
    EXPECT_LT((to_original_coords(pp, -u) - u).norm(), 1e-15);
}

TEST(OriginalCoords, HandCheckedTwoByTwo)
{
    Preprocessor pp;
    pp.center = Vector::Zero(2);
    pp.scale = Vector{{2.0, 1.0}};
    pp.whitener = Matrix{{1.0, 1.0}, {0.0, 2.0}};
    pp.rank = 2;
    pp.sphered = true;
    // whitener * e1 = (1, 0); divided by scale = (0.5, 0); normalized = e1.
    EXPECT_LT((to_original_coords(pp, Vector{{1.0, 0.0}}) - Vector{{1.0, 0.0}}).norm(), 1e-15);
    // whitener * e2 = (1, 2); / scale = (0.5, 2) -> normalized.
    const Vector expected = Vector{{0.5, 2.0}}.normalized();
    EXPECT_LT((to_original_coords(pp, Vector{{0.0, 1.0}}) - expected).norm(), 1e-15);
}

TEST(OriginalCoords, ProjectionsPerfectlyCorrelated)
{
    Matrix x = oracle::gaussian(80, 4, 21);
    x.col(0) *= 5.0;
    x.col(2) += x.col(1);
    const Matrix xc = x.rowwise() - x.colwise().mean();
    std::mt19937_64 rng(4);
    std::normal_distribution<double> nd;
    for (bool sphere : {false, true}) {
        const Fitted f = prepare(x, sphere);
        for (int t = 0; t < 5; ++t) {
            Vector u(f.z.cols());
            for (auto& v : u) v = nd(rng);
            u.normalize();
            const Vector a = to_original_coords(f.preprocessor, u);
            EXPECT_NEAR(a.norm(), 1.0, 1e-12);
            const Vector s1 = xc * a;
            const Vector s2 = f.z * u;
            const double corr = s1.dot(s2) / (s1.norm() * s2.norm());
            EXPECT_NEAR(std::abs(corr), 1.0, 1e-8);
        }
    }
}

TEST(DataMatrix, Invariants)
{
    EXPECT_THROW(make_data_matrix(Matrix::Zero(1, 2)), DataError);
    EXPECT_THROW(make_data_matrix(Matrix::Zero(3, 1), {"a", "a", "b"}), DataError);
    Matrix bad = Matrix::Zero(2, 2);
    bad(0, 0) = std::numeric_limits<double>::infinity();
    EXPECT_THROW(make_data_matrix(bad), DataError);
    const DataMatrix d = make_data_matrix(Matrix::Zero(2, 2));
    EXPECT_EQ(d.col_names, (std::vector<std::string>{"V1", "V2"}));
}

TEST(Fingerprint, SensitiveToValuesAndShape)
{
    const Matrix a = oracle::gaussian(4, 3, 1);
    Matrix b = a;
    b(3, 2) += 1e-12;
    EXPECT_EQ(fingerprint(a), fingerprint(Matrix(a)));
    EXPECT_NE(fingerprint(a), fingerprint(b));
    const Matrix reshaped = Eigen::Map<const Matrix>(a.data(), 3, 4);
    EXPECT_NE(fingerprint(a), fingerprint(reshaped));
}
