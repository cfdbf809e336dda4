#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "pbica/errors.hpp"
#include "pbica/preprocess.hpp"
#include "pbica/rng.hpp"

namespace pbica {

enum class SourceKind { ggd, poisson };

struct SourceFamily {
    SourceKind kind = SourceKind::ggd;
    double beta = 1.6;     // GGD shape
    double lambda = 0.5;   // Poisson rate

    static SourceFamily ggd(double beta) {
        if (!(beta > 0.0)) throw input_error("ggd: beta must be positive");
        return {SourceKind::ggd, beta, 0.0};
    }
    static SourceFamily poisson(double lambda) {
        if (!(lambda > 0.0)) throw input_error("poisson: lambda must be positive");
        return {SourceKind::poisson, 0.0, lambda};
    }
    std::string name() const {
        return kind == SourceKind::ggd ? "ggd(beta=" + std::to_string(beta) + ")"
                                       : "poisson(lambda=" + std::to_string(lambda) + ")";
    }
};

struct Scenario {
    std::string id;
    SourceFamily family;
    int m = 8;
    int N = 1000;
    std::uint64_t seed = 0;
};

// Generalized Gaussian, density ~ exp(-|x/alpha|^beta), scaled to unit
// variance: alpha^2 = Gamma(1/beta)/Gamma(3/beta); draws are
// sign * alpha * gamma(1/beta, 1)^{1/beta}.
inline std::vector<double> sample_ggd(double beta, int n, Rng& rng) {
    if (!(beta > 0.0)) throw input_error("sample_ggd: beta must be positive");
    if (n < 1) throw input_error("sample_ggd: n must be >= 1");
    const double alpha =
        std::sqrt(std::tgamma(1.0 / beta) / std::tgamma(3.0 / beta));
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) {
        double g = rng.gamma(1.0 / beta);
        double sgn = rng.uniform01() < 0.5 ? -1.0 : 1.0;
        out[i] = sgn * alpha * std::pow(g, 1.0 / beta);
    }
    return out;
}

// Centered, unit-variance Poisson: (K - lambda)/sqrt(lambda), K drawn by
// inversion with sequential search (exact; fine for small lambda).
inline std::vector<double> sample_poisson_centered(double lambda, int n, Rng& rng) {
    if (!(lambda > 0.0)) throw input_error("sample_poisson_centered: lambda must be positive");
    const double sq = std::sqrt(lambda);
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) {
        double u = rng.uniform01();
        double p = std::exp(-lambda);
        double cdf = p;
        int k = 0;
        while (u > cdf) {
            ++k;
            p *= lambda / k;
            cdf += p;
            if (k > 1000) break;  // unreachable for sane lambda; guards FP corner cases
        }
        out[i] = (k - lambda) / sq;
    }
    return out;
}

// i.i.d. standard-normal mixing matrix, resampled until cond(A) <= 100.
inline Matrix random_mixing(int m, Rng& rng, double cond_cap = 100.0) {
    if (m < 2) throw input_error("random_mixing: m must be >= 2");
    for (int attempt = 0; attempt < 100; ++attempt) {
        Matrix A(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) A(i, j) = rng.normal();
        Eigen::JacobiSVD<Matrix> svd(A);
        if (svd.singularValues()(m - 1) > 0.0 &&
            svd.singularValues()(0) / svd.singularValues()(m - 1) <= cond_cap)
            return A;
    }
    throw degenerate_data_error("random_mixing: could not draw a well-conditioned matrix");
}

struct Dataset {
    DataMatrix X;  // mixed observations, A * S
    Matrix A;
    Matrix S;      // true sources, m x N
};

inline Dataset make_dataset(const Scenario& sc) {
    if (sc.m < 2 || sc.N < sc.m) throw input_error("make_dataset: need m >= 2, N >= m");
    Rng src_rng(derive_seed(sc.seed, "sources"));
    Matrix S(sc.m, sc.N);
    for (int i = 0; i < sc.m; ++i) {
        std::vector<double> row = sc.family.kind == SourceKind::ggd
                                      ? sample_ggd(sc.family.beta, sc.N, src_rng)
                                      : sample_poisson_centered(sc.family.lambda, sc.N, src_rng);
        for (int j = 0; j < sc.N; ++j) S(i, j) = row[j];
    }
    Rng mix_rng(derive_seed(sc.seed, "mixing"));
    Matrix A = random_mixing(sc.m, mix_rng);
    return Dataset{DataMatrix{A * S}, std::move(A), std::move(S)};
}

}  // namespace pbica
