#include <doctest.h>

#include <cmath>
#include <pbica/fastica.hpp>
#include <pbica/metrics.hpp>
#include <pbica/synth.hpp>

using namespace pbica;

namespace {

// i.i.d. uniform(+-sqrt(3)) rows: unit variance, strongly sub-Gaussian
DataMatrix uniform_sources(int m, int N, std::uint64_t seed) {
    Rng rng(seed);
    Matrix S(m, N);
    const double a = std::sqrt(3.0);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < N; ++j) S(i, j) = rng.uniform(-a, a);
    return DataMatrix{S};
}

}  // namespace

TEST_CASE("init_w: orthogonal, deterministic, unit determinant magnitude") {
    Rng r1(3), r2(3);
    Matrix W1 = init_w(8, r1);
    Matrix W2 = init_w(8, r2);
    CHECK((W1 * W1.transpose() - Matrix::Identity(8, 8)).norm() < 1e-10);
    CHECK((W1 - W2).norm() == 0.0);

    Rng r3(4);
    Matrix W3 = init_w(2, r3);
    CHECK(std::abs(std::abs(W3.determinant()) - 1.0) < 1e-10);
}

TEST_CASE("fastica_step: separating solution is a fixed point for pow3") {
    DataMatrix S = uniform_sources(3, 10000, 11);
    Matrix W = Matrix::Identity(3, 3);
    Matrix W_new = fastica_step(W, S, Nonlinearity::fixed(NlKind::pow3));
    // fixed point up to row signs
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (i != j) CHECK(std::abs(W_new(i, j)) < 0.05);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(W_new(i, i)) > 0.95);
}

TEST_CASE("fastica_step: linear-g degeneracy stays bounded and orthogonal") {
    DataMatrix S = uniform_sources(4, 2000, 21);
    Rng rng(22);
    Matrix W = init_w(4, rng);
    for (int k = 0; k < 5; ++k) {
        W = fastica_step_with(W, S, [](double y) { return GEval{y, 1.0}; });
        CHECK((W * W.transpose() - Matrix::Identity(4, 4)).norm() < 1e-10);
        CHECK(W.allFinite());
    }
}

TEST_CASE("fastica_step: output is always orthogonal") {
    DataMatrix S = uniform_sources(5, 1000, 31);
    Rng rng(32);
    Matrix W = init_w(5, rng);
    for (NlKind kind : {NlKind::tanh, NlKind::pow3, NlKind::skew, NlKind::gauss}) {
        Matrix W_new = fastica_step(W, S, Nonlinearity::fixed(kind));
        CHECK((W_new * W_new.transpose() - Matrix::Identity(5, 5)).norm() < 1e-10);
    }
}

TEST_CASE("is_converged: sign flips count as convergence, rotations do not") {
    Rng rng(41);
    Matrix W = init_w(4, rng);
    CHECK(is_converged(W, W, 1e-6));
    CHECK(is_converged(-W, W, 1e-6));

    double th = 0.1;
    Matrix R(2, 2);
    R << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    Matrix I2 = Matrix::Identity(2, 2);
    // relative Frobenius change of a 0.1-rad rotation is ~0.0999
    CHECK_FALSE(is_converged(R, I2, 1e-6));
    CHECK(is_converged(R, I2, 0.11));
}

TEST_CASE("run_fastica: separates two uniform sources with pow3") {
    Scenario sc{"unif", SourceFamily::ggd(10.0), 2, 5000, 51};  // beta=10 ~ uniform
    Dataset ds = make_dataset(sc);
    auto [Xc, mean] = center(ds.X);
    auto [Xw, model] = whiten(Xc);
    SeparationResult res = run_fastica(Xw, Nonlinearity::fixed(NlKind::pow3),
                                       FasticaConfig{300, 1e-6, 52});
    CHECK(res.converged);
    CHECK(res.max_orth_residual < 1e-8);
    CHECK(amari_error(gain_matrix(res.W, model.V, ds.A)) < 0.3);
}

TEST_CASE("run_fastica: K_max = 1 exhausts the budget") {
    DataMatrix S = uniform_sources(4, 1000, 61);
    SeparationResult res =
        run_fastica(S, Nonlinearity::fixed(NlKind::tanh), FasticaConfig{1, 1e-6, 62});
    CHECK(res.iterations == 1);
    CHECK_FALSE(res.converged);
}

TEST_CASE("run_fastica: deterministic given seed, data, nonlinearity") {
    DataMatrix S = uniform_sources(4, 1000, 71);
    FasticaConfig cfg{50, 1e-6, 72};
    SeparationResult a = run_fastica(S, Nonlinearity::fixed(NlKind::tanh), cfg);
    SeparationResult b = run_fastica(S, Nonlinearity::fixed(NlKind::tanh), cfg);
    CHECK((a.W - b.W).norm() == 0.0);
    CHECK(a.iterations == b.iterations);
    CHECK(a.converged == b.converged);
}

TEST_CASE("fastica_step: equivariance under orthogonal re-mixing") {
    DataMatrix S = uniform_sources(4, 2000, 81);
    Rng rng(82), qrng(83);
    Matrix W = init_w(4, rng);
    Matrix Q = init_w(4, qrng);
    DataMatrix QX{Q * S.values};
    Matrix W1 = W, W2 = W * Q.transpose();
    for (int k = 0; k < 3; ++k) {
        W1 = fastica_step(W1, S, Nonlinearity::fixed(NlKind::tanh));
        W2 = fastica_step(W2, QX, Nonlinearity::fixed(NlKind::tanh));
        CHECK((W2 - W1 * Q.transpose()).norm() < 1e-8);
    }
}
