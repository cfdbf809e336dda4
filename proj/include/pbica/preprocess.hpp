#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>

#include "pbica/errors.hpp"

namespace pbica {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// m x N sample matrix: rows are channels, columns are samples.
struct DataMatrix {
    Matrix values;
    Eigen::Index m() const { return values.rows(); }
    Eigen::Index N() const { return values.cols(); }
};

inline void validate(const DataMatrix& X) {
    if (X.m() < 2) throw input_error("DataMatrix requires m >= 2 channels");
    if (X.N() < X.m()) throw input_error("DataMatrix requires N >= m samples");
    if (!X.values.allFinite()) throw input_error("DataMatrix has non-finite entries");
}

// Whitening map for raw data: x_white = V * (x - mean).
struct WhiteningModel {
    Vector mean;
    Matrix V;
    double eigen_floor = 1e-10;  // relative to the largest covariance eigenvalue
};

inline std::pair<DataMatrix, Vector> center(const DataMatrix& X) {
    validate(X);
    Vector mean = X.values.rowwise().mean();
    DataMatrix Xc{X.values.colwise() - mean};
    return {std::move(Xc), std::move(mean)};
}

// Symmetric-root whitening: V = U diag(lambda^{-1/2}) U^T with the 1/N
// covariance convention. Rejects rank-deficient covariance rather than
// regularizing it.
inline std::pair<DataMatrix, WhiteningModel> whiten(const DataMatrix& Xc,
                                                    double eigen_floor = 1e-10) {
    validate(Xc);
    const double N = static_cast<double>(Xc.N());
    Matrix cov = (Xc.values * Xc.values.transpose()) / N;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
    if (eig.info() != Eigen::Success)
        throw degenerate_data_error("eigendecomposition of sample covariance failed");
    const Vector& lam = eig.eigenvalues();  // ascending
    const double lam_max = lam(lam.size() - 1);
    if (lam(0) <= eigen_floor * lam_max)
        throw degenerate_data_error(
            "rank-deficient sample covariance: eigenvalue " + std::to_string(lam(0)) +
            " below floor " + std::to_string(eigen_floor * lam_max));
    Matrix V = eig.eigenvectors() *
               lam.array().rsqrt().matrix().asDiagonal() *
               eig.eigenvectors().transpose();
    DataMatrix Xw{V * Xc.values};
    WhiteningModel model{Vector::Zero(Xc.m()), std::move(V), eigen_floor};
    return {std::move(Xw), std::move(model)};
}

// Orthogonal polar factor (W W^T)^{-1/2} W via symmetric eigendecomposition.
// For badly conditioned W a single pass can leave a residual of ~sqrt(cond)
// ulps, so the result is re-polished (the second pass acts on an almost
// orthogonal matrix and is therefore well conditioned).
inline Matrix sym_orth(const Matrix& W, double eigen_floor = 1e-12) {
    Matrix R = W;
    const Matrix I = Matrix::Identity(W.rows(), W.rows());
    for (int pass = 0; pass < 3; ++pass) {
        Matrix WWt = R * R.transpose();
        Eigen::SelfAdjointEigenSolver<Matrix> eig(WWt);
        if (eig.info() != Eigen::Success)
            throw degenerate_data_error("eigendecomposition in sym_orth failed");
        const Vector& lam = eig.eigenvalues();
        if (lam(0) <= eigen_floor * std::max(lam(lam.size() - 1), 1e-300))
            throw degenerate_data_error("sym_orth: matrix is numerically singular (row collapse)");
        R = eig.eigenvectors() *
            lam.array().rsqrt().matrix().asDiagonal() *
            eig.eigenvectors().transpose() * R;
        if ((R * R.transpose() - I).norm() < 1e-12) break;
    }
    return R;
}

}  // namespace pbica
