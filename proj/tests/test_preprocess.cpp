#include <doctest.h>

#include <pbica/preprocess.hpp>
#include <pbica/rng.hpp>

using namespace pbica;

namespace {
Matrix random_matrix(int r, int c, std::uint64_t seed) {
    Rng rng(seed);
    Matrix M(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) M(i, j) = rng.normal();
    return M;
}
}  // namespace

TEST_CASE("center: two-sample symmetric case") {
    Matrix X(2, 2);
    X << 1, 3, 2, 2;
    auto [Xc, mean] = center(DataMatrix{X});
    CHECK(Xc.values(0, 0) == doctest::Approx(-1).epsilon(1e-14));
    CHECK(Xc.values(0, 1) == doctest::Approx(1).epsilon(1e-14));
    CHECK(Xc.values(1, 0) == doctest::Approx(0).epsilon(1e-14));
    CHECK(Xc.values(1, 1) == doctest::Approx(0).epsilon(1e-14));
    CHECK(mean(0) == doctest::Approx(2));
    CHECK(mean(1) == doctest::Approx(2));
}

TEST_CASE("center: zero-mean input is a fixed point") {
    Matrix X(2, 4);
    X << -1, 1, -2, 2, 3, -3, 0.5, -0.5;
    auto [Xc, mean] = center(DataMatrix{X});
    CHECK((Xc.values - X).norm() < 1e-14);
    CHECK(mean.norm() < 1e-14);
}

TEST_CASE("center: random 8x1000 rows sum to ~0") {
    auto [Xc, mean] = center(DataMatrix{random_matrix(8, 1000, 42)});
    for (int i = 0; i < 8; ++i) CHECK(std::abs(Xc.values.row(i).sum()) < 1e-9);
}

TEST_CASE("center: non-finite input rejected") {
    Matrix X = Matrix::Zero(2, 3);
    X(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(center(DataMatrix{X}), input_error);
}

TEST_CASE("whiten: output covariance is the identity") {
    auto [Xc, mean] = center(DataMatrix{random_matrix(8, 1000, 7) * 3.0 +
                                        random_matrix(8, 1000, 8)});
    auto [Xw, model] = whiten(Xc);
    Matrix cov = Xw.values * Xw.values.transpose() / static_cast<double>(Xw.N());
    CHECK((cov - Matrix::Identity(8, 8)).norm() < 1e-6);
    // V * Sigma * V^T = I
    Matrix sigma = Xc.values * Xc.values.transpose() / static_cast<double>(Xc.N());
    CHECK((model.V * sigma * model.V.transpose() - Matrix::Identity(8, 8)).norm() < 1e-8);
}

TEST_CASE("whiten: analytic diagonal case") {
    // rows scaled by (2, 1) from an exactly-white base: V must be diag(1/2, 1)
    Matrix Z = random_matrix(2, 500, 3);
    auto [Zc, zm] = center(DataMatrix{Z});
    auto [Zw, zmodel] = whiten(Zc);  // exactly unit covariance now
    Matrix X = Zw.values;
    X.row(0) *= 2.0;
    auto [Xw, model] = whiten(DataMatrix{X});
    CHECK(model.V(0, 0) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(model.V(1, 1) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(model.V(0, 1)) < 1e-9);
}

TEST_CASE("whiten: duplicated channel is rejected") {
    Matrix X = random_matrix(2, 100, 11);
    X.row(1) = X.row(0);
    auto [Xc, mean] = center(DataMatrix{X});
    CHECK_THROWS_AS(whiten(Xc), degenerate_data_error);
}

TEST_CASE("sym_orth: orthogonal input is a fixed point") {
    Matrix W = sym_orth(random_matrix(5, 5, 1));
    CHECK((sym_orth(W) - W).norm() < 1e-12);
}

TEST_CASE("sym_orth: pure scaling removed") {
    Matrix W = 2.0 * Matrix::Identity(4, 4);
    CHECK((sym_orth(W) - Matrix::Identity(4, 4)).norm() < 1e-12);
}

TEST_CASE("sym_orth: matches the polar factor from the SVD") {
    Matrix W = random_matrix(8, 8, 99);
    Matrix R = sym_orth(W);
    CHECK((R * R.transpose() - Matrix::Identity(8, 8)).norm() < 1e-10);
    Eigen::JacobiSVD<Matrix> svd(W, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Matrix polar = svd.matrixU() * svd.matrixV().transpose();
    CHECK((R - polar).norm() < 1e-10);
}

TEST_CASE("sym_orth: idempotent and commutes with orthogonal left factors") {
    Matrix W = random_matrix(6, 6, 5);
    Matrix R = sym_orth(W);
    CHECK((sym_orth(R) - R).norm() < 1e-10);
    Matrix Q = sym_orth(random_matrix(6, 6, 6));
    CHECK((sym_orth(Q * W) - Q * R).norm() < 1e-10);
}

TEST_CASE("sym_orth: singular input rejected") {
    Matrix W = Matrix::Zero(3, 3);
    W(0, 0) = 1;
    W(1, 1) = 1;  // third row collapsed
    CHECK_THROWS_AS(sym_orth(W), degenerate_data_error);
}

TEST_CASE("whiten(center(X)) pipeline gives unit covariance for scaled data") {
    Matrix X = random_matrix(5, 2000, 21);
    X.row(2) *= 10.0;
    X.array() += 3.0;
    auto [Xc, mean] = center(DataMatrix{X});
    auto [Xw, model] = whiten(Xc);
    Matrix cov = Xw.values * Xw.values.transpose() / static_cast<double>(Xw.N());
    CHECK((cov - Matrix::Identity(5, 5)).norm() < 1e-6);
}
