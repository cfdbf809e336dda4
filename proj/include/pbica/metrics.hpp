#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "pbica/errors.hpp"
#include "pbica/preprocess.hpp"

namespace pbica {

// P = W * V * A: the total demixing map (rotation composed with whitening)
// applied to the true mixing. A scaled permutation means perfect separation.
inline Matrix gain_matrix(const Matrix& W, const Matrix& V, const Matrix& A) {
    if (W.cols() != V.rows() || V.cols() != A.rows())
        throw input_error("gain_matrix: dimension mismatch");
    return W * V * A;
}

inline double amari_error(const Matrix& P) {
    const Eigen::Index m = P.rows();
    Matrix Q = P.cwiseAbs();
    // All sums run in a canonical (sorted) order so the result is bitwise
    // invariant under row/column permutations, not just equal up to roundoff.
    std::vector<double> terms;
    for (Eigen::Index i = 0; i < m; ++i) {
        double mx = Q.row(i).maxCoeff();
        if (mx <= 0.0) throw degenerate_data_error("amari_error: all-zero row in gain matrix");
        std::vector<double> v(Q.cols());
        for (Eigen::Index j = 0; j < Q.cols(); ++j) v[j] = Q(i, j);
        std::sort(v.begin(), v.end());
        double s = 0.0;
        for (double x : v) s += x / mx;
        terms.push_back(s - 1.0);
    }
    for (Eigen::Index j = 0; j < P.cols(); ++j) {
        double mx = Q.col(j).maxCoeff();
        if (mx <= 0.0) throw degenerate_data_error("amari_error: all-zero column in gain matrix");
        std::vector<double> v(Q.rows());
        for (Eigen::Index i = 0; i < Q.rows(); ++i) v[i] = Q(i, j);
        std::sort(v.begin(), v.end());
        double s = 0.0;
        for (double x : v) s += x / mx;
        terms.push_back(s - 1.0);
    }
    std::sort(terms.begin(), terms.end());
    double e = 0.0;
    for (double t : terms) e += t;
    return e;
}

}  // namespace pbica
