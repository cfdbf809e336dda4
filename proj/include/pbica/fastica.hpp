#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>

#include "pbica/errors.hpp"
#include "pbica/nonlinearity.hpp"
#include "pbica/preprocess.hpp"
#include "pbica/rng.hpp"

namespace pbica {

struct FasticaConfig {
    int K_max = 300;
    double tau = 1e-6;
    std::uint64_t seed = 0;  // W0 initialization stream
};

struct SeparationResult {
    Matrix W;                        // orthogonal demixer acting on whitened data
    int iterations = 0;
    bool converged = false;
    double elapsed = 0.0;            // wall-clock seconds for the iteration loop
    double max_orth_residual = 0.0;  // max ||W W^T - I||_F observed over iterations
};

// Random orthogonal start: polar factor of an i.i.d. Gaussian matrix.
inline Matrix init_w(int m, Rng& rng) {
    if (m < 2) throw input_error("init_w: m must be >= 2");
    for (int attempt = 0; attempt < 100; ++attempt) {
        Matrix G(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) G(i, j) = rng.normal();
        try {
            return sym_orth(G);
        } catch (const degenerate_data_error&) {
            // numerically singular draw; retry (probability ~0)
        }
    }
    throw degenerate_data_error("init_w: repeated singular Gaussian draws");
}

// One fixed-point sweep: w_k <- E[x g(w_k^T x)] - E[g'(w_k^T x)] w_k for every
// row, then symmetric orthogonalisation of the whole matrix. The nonlinearity
// is a callable y -> GEval so tests can inject degenerate choices.
template <class GFun>
inline Matrix fastica_step_with(const Matrix& W, const DataMatrix& X, GFun&& g_eval,
                                int iteration_index = 0) {
    const Eigen::Index m = X.m(), N = X.N();
    Matrix Y = W * X.values;  // m x N projections
    Matrix G(m, N);
    Vector gprime_mean = Vector::Zero(m);
    for (Eigen::Index k = 0; k < m; ++k) {
        double gp = 0.0;
        for (Eigen::Index n = 0; n < N; ++n) {
            GEval e = g_eval(Y(k, n));
            G(k, n) = e.g;
            gp += e.gprime;
        }
        gprime_mean(k) = gp / static_cast<double>(N);
    }
    Matrix W_new = (G * X.values.transpose()) / static_cast<double>(N) -
                   gprime_mean.asDiagonal() * W;
    try {
        return sym_orth(W_new);
    } catch (const degenerate_data_error& e) {
        throw iteration_failure_error(e.what(), iteration_index);
    }
}

inline Matrix fastica_step(const Matrix& W, const DataMatrix& X, const Nonlinearity& nl,
                           int iteration_index = 0) {
    return fastica_step_with(
        W, X, [&nl](double y) { return nl_eval(nl, y); }, iteration_index);
}

// Relative Frobenius change after aligning row signs (FastICA is invariant to
// per-row sign flips, so raw ||W_new - W_old|| never settles).
inline bool is_converged(const Matrix& W_new, const Matrix& W_old, double tau) {
    double sq = 0.0;
    for (Eigen::Index k = 0; k < W_new.rows(); ++k) {
        double s = W_new.row(k).dot(W_old.row(k)) < 0.0 ? -1.0 : 1.0;
        sq += (s * W_new.row(k) - W_old.row(k)).squaredNorm();
    }
    return std::sqrt(sq) / W_old.norm() < tau;
}

inline SeparationResult run_fastica(const DataMatrix& X, const Nonlinearity& nl,
                                    const FasticaConfig& cfg) {
    if (cfg.K_max < 1) throw input_error("run_fastica: K_max must be >= 1");
    if (!(cfg.tau > 0.0)) throw input_error("run_fastica: tau must be positive");
    Rng rng(derive_seed(cfg.seed, "init_w"));
    const int m = static_cast<int>(X.m());
    Matrix W = init_w(m, rng);
    const Matrix I = Matrix::Identity(m, m);

    SeparationResult res;
    auto t0 = std::chrono::steady_clock::now();
    for (int k = 1; k <= cfg.K_max; ++k) {
        Matrix W_new = fastica_step(W, X, nl, k);
        res.max_orth_residual =
            std::max(res.max_orth_residual, (W_new * W_new.transpose() - I).norm());
        res.iterations = k;
        if (is_converged(W_new, W, cfg.tau)) {
            res.converged = true;
            W = std::move(W_new);
            break;
        }
        W = std::move(W_new);
    }
    res.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    res.W = std::move(W);
    return res;
}

}  // namespace pbica
