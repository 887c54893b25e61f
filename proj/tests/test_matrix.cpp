#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "orlx/matrix.hpp"
#include "orlx/matrix_io.hpp"
#include "orlx/random.hpp"

using orlx::MatrixHandle;
using orlx::Triplet;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path);
    f << content;
}

}  // namespace

TEST(MatrixHandle, DenseBasics) {
    Eigen::MatrixXd m(2, 3);
    m << 1, 0, 2, 0, 0, 3;
    const auto h = MatrixHandle::dense(m);
    EXPECT_TRUE(h.is_dense());
    EXPECT_EQ(h.rows(), 2);
    EXPECT_EQ(h.cols(), 3);
    EXPECT_EQ(h.nnz(), 3);
}

TEST(MatrixHandle, SparseValidation) {
    EXPECT_NO_THROW(MatrixHandle::sparse(3, 3, {{0, 0, 1.0}, {2, 1, -2.0}}));
    EXPECT_THROW(MatrixHandle::sparse(3, 3, {{0, 0, 1.0}, {3, 1, 2.0}}), std::invalid_argument);
    EXPECT_THROW(MatrixHandle::sparse(3, 3, {{1, 1, 1.0}, {1, 1, 2.0}}), std::invalid_argument);
}

TEST(MatrixHandle, SparseMultiplyMatchesDense) {
    orlx::RandomEngine rng({1, 0});
    std::vector<Triplet> ts;
    for (Eigen::Index i = 0; i < 10; ++i)
        for (Eigen::Index j = 0; j < 5; ++j)
            if (rng.uniform01() < 0.4) ts.push_back({i, j, rng.gaussian()});
    const auto h = MatrixHandle::sparse(10, 5, ts);
    Eigen::VectorXd x(5);
    for (int j = 0; j < 5; ++j) x[j] = rng.gaussian();
    EXPECT_LT((h.multiply(x) - h.to_dense() * x).norm(), 1e-12);
    EXPECT_EQ(h.nnz(), static_cast<Eigen::Index>(ts.size()));
}

TEST(MatrixIo, DenseRoundTripBitExact) {
    Eigen::MatrixXd m(3, 2);
    m << 1.0 / 3.0, -2.5e-17, M_PI, 1e300, -0.0, 7.25;
    const auto path = temp_path("orlx_dense_rt.csv");
    orlx::save_dense_csv(path, m);
    const Eigen::MatrixXd back = orlx::load_dense_csv(path);
    ASSERT_EQ(back.rows(), 3);
    ASSERT_EQ(back.cols(), 2);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 2; ++j) EXPECT_EQ(back(i, j), m(i, j));
    std::remove(path.c_str());
}

TEST(MatrixIo, SparseRoundTripKeepsDims) {
    const auto h = MatrixHandle::sparse(6, 7, {{0, 0, 1.5}, {4, 2, -1.0 / 3.0}});
    const auto path = temp_path("orlx_sparse_rt.csv");
    orlx::save_sparse_csv(path, h);
    const auto back = orlx::load_sparse_csv(path);
    EXPECT_EQ(back.rows(), 6);
    EXPECT_EQ(back.cols(), 7);
    ASSERT_EQ(back.nnz(), 2);
    EXPECT_EQ(back.to_dense()(4, 2), -1.0 / 3.0);
    std::remove(path.c_str());
}

TEST(MatrixIo, DuplicateTripletRejectedWithLineNumber) {
    const auto path = temp_path("orlx_dup.csv");
    write_file(path, "i,j,value\n0,0,1.0\n1,2,3.0\n0,0,4.0\n");
    try {
        orlx::load_sparse_csv(path);
        FAIL() << "expected IoError";
    } catch (const orlx::IoError& e) {
        EXPECT_NE(std::string(e.what()).find(":4:"), std::string::npos) << e.what();
    }
    std::remove(path.c_str());
}

TEST(MatrixIo, EmptyFileIsError) {
    const auto path = temp_path("orlx_empty.csv");
    write_file(path, "");
    EXPECT_THROW(orlx::load_dense_csv(path), orlx::IoError);
    EXPECT_THROW(orlx::load_sparse_csv(path), orlx::IoError);
    std::remove(path.c_str());
}

TEST(MatrixIo, ParseErrorCarriesLineNumber) {
    const auto path = temp_path("orlx_bad.csv");
    write_file(path, "1.0,2.0\n3.0,oops\n");
    try {
        orlx::load_dense_csv(path);
        FAIL() << "expected IoError";
    } catch (const orlx::IoError& e) {
        EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos) << e.what();
    }
    std::remove(path.c_str());
}

TEST(MatrixIo, RaggedRowsRejected) {
    const auto path = temp_path("orlx_ragged.csv");
    write_file(path, "1,2,3\n4,5\n");
    EXPECT_THROW(orlx::load_dense_csv(path), orlx::IoError);
    std::remove(path.c_str());
}

TEST(MatrixIo, LoadMatrixDispatch) {
    const auto dense_path = temp_path("orlx_disp_dense.csv");
    write_file(dense_path, "1,2\n3,4\n");
    EXPECT_TRUE(orlx::load_matrix(dense_path).is_dense());
    const auto sparse_path = temp_path("orlx_disp_sparse.csv");
    write_file(sparse_path, "# 4 4\ni,j,value\n1,1,5.0\n");
    EXPECT_FALSE(orlx::load_matrix(sparse_path).is_dense());
    std::remove(dense_path.c_str());
    std::remove(sparse_path.c_str());
}
