#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <vector>

#include "pbica/ecf.hpp"
#include "pbica/errors.hpp"
#include "pbica/rng.hpp"

namespace pbica {

struct ScoreParams {
    EcfParams ecf;
    int J = 64;
    double q = 0.995;         // quantile of pooled |Z| defining z_max
    double floor_frac = 0.05; // relative denominator floor (fraction of max |D|)
};

// Tabulated learned nonlinearity g = -psi_bar on a uniform grid over
// [-z_max, z_max], with linear interpolation and clamped extrapolation.
struct ScoreTable {
    std::vector<double> grid;
    std::vector<double> g_vals;
    std::vector<double> gprime_vals;
    double z_max = 0.0;
    // provenance
    int R = 0, B = 0, L = 0;
    double c = 0.0, delta = 0.0;
    std::uint64_t seed = 0;
};

struct NumDen {
    double D = 0.0;       // density-proportional denominator
    double N = 0.0;       // numerator (derivative term); also D'(z)
    double Nprime = 0.0;  // z-derivative of N
};

// Folded CF sums at a point. Conjugate frequencies are folded so all three
// quantities are real; the u = 0 term contributes the constant 1 to D
// (phi(0) = 1, taper 1), which keeps D positive-definite-in-spirit and is what
// makes the ratio stable near density bulk.
inline NumDen score_numden(double z, const EcfProbe& probe) {
    NumDen s;
    s.D = 1.0;
    for (std::size_t l = 0; l < probe.freqs.size(); ++l) {
        const double u = probe.freqs[l];
        const double w = probe.taper[l];
        // e^{-iuz} * phi
        const double re = std::cos(u * z) * probe.phi[l].real() +
                          std::sin(u * z) * probe.phi[l].imag();
        const double im = std::cos(u * z) * probe.phi[l].imag() -
                          std::sin(u * z) * probe.phi[l].real();
        s.D += 2.0 * w * re;
        s.N += 2.0 * u * w * im;
        s.Nprime += -2.0 * u * u * w * re;
    }
    return s;
}

// Scan of |D| over a grid; the per-probe denominator floor is this times
// floor_frac. Relative rather than absolute so it engages only in the tails.
inline double denominator_scale(const EcfProbe& probe, const std::vector<double>& grid) {
    double mx = 0.0;
    for (double z : grid) mx = std::max(mx, std::abs(score_numden(z, probe).D));
    return mx;
}

struct ScoreValue {
    double psi = 0.0;
    double psi_prime = 0.0;
};

// psi = N/D with a signed floor on D; psi' from the exact identity D' = N:
// psi' = (N' D - N^2) / D^2.
inline ScoreValue score_at(double z, const EcfProbe& probe, double floor_abs) {
    NumDen s = score_numden(z, probe);
    double Ds = std::copysign(std::max(std::abs(s.D), floor_abs), s.D == 0.0 ? 1.0 : s.D);
    ScoreValue v;
    v.psi = s.N / Ds;
    v.psi_prime = (s.Nprime * s.D - s.N * s.N) / (Ds * Ds);
    return v;
}

struct AveragedScore {
    std::vector<double> psi_bar;
    std::vector<double> psi_bar_prime;
};

inline AveragedScore average_scores(const std::vector<EcfProbe>& probes,
                                    const std::vector<double>& grid, double floor_frac) {
    if (probes.empty()) throw input_error("average_scores: no probes");
    AveragedScore out;
    out.psi_bar.assign(grid.size(), 0.0);
    out.psi_bar_prime.assign(grid.size(), 0.0);
    for (const EcfProbe& probe : probes) {
        const double fl = floor_frac * denominator_scale(probe, grid);
        for (std::size_t j = 0; j < grid.size(); ++j) {
            ScoreValue v = score_at(grid[j], probe, fl);
            out.psi_bar[j] += v.psi;
            out.psi_bar_prime[j] += v.psi_prime;
        }
    }
    const double R = static_cast<double>(probes.size());
    for (double& v : out.psi_bar) v /= R;
    for (double& v : out.psi_bar_prime) v /= R;
    return out;
}

// Linear-interpolation quantile of pooled |z| (matches the common
// numpy/R type-7 convention).
inline double abs_quantile(std::vector<double> pooled_abs, double q) {
    std::sort(pooled_abs.begin(), pooled_abs.end());
    const std::size_t n = pooled_abs.size();
    double pos = q * static_cast<double>(n - 1);
    std::size_t lo = static_cast<std::size_t>(pos);
    std::size_t hi = std::min(lo + 1, n - 1);
    double frac = pos - static_cast<double>(lo);
    return pooled_abs[lo] * (1 - frac) + pooled_abs[hi] * frac;
}

// Full score tabulation: R random directions, one probe each (dither stream
// derived from (seed, direction index)), pooled z_max quantile, averaged
// score on a J-point grid, negated into the FastICA nonlinearity g.
inline ScoreTable tabulate_score(const DataMatrix& X, const ScoreParams& params,
                                 std::uint64_t seed) {
    if (params.J < 4) throw input_error("tabulate_score: J must be >= 4");
    Rng dir_rng(derive_seed(seed, "directions"));
    std::vector<Vector> dirs =
        sample_directions(static_cast<int>(X.m()), params.ecf.R, dir_rng);

    std::vector<EcfProbe> probes;
    probes.reserve(dirs.size());
    std::vector<double> pooled_abs;
    for (std::size_t r = 0; r < dirs.size(); ++r) {
        Rng dither_rng(derive_seed(seed, "dither", r));
        probes.push_back(make_probe(X, dirs[r], params.ecf, dither_rng));
        for (double z : probes.back().z) pooled_abs.push_back(std::abs(z));
    }

    ScoreTable table;
    table.z_max = abs_quantile(std::move(pooled_abs), params.q);
    table.grid.resize(params.J);
    const double dz = 2.0 * table.z_max / (params.J - 1);
    for (int j = 0; j < params.J; ++j) table.grid[j] = -table.z_max + dz * j;

    AveragedScore avg = average_scores(probes, table.grid, params.floor_frac);
    table.g_vals.resize(params.J);
    table.gprime_vals.resize(params.J);
    for (int j = 0; j < params.J; ++j) {
        table.g_vals[j] = -avg.psi_bar[j];
        table.gprime_vals[j] = -avg.psi_bar_prime[j];
    }
    table.R = params.ecf.R;
    table.B = params.ecf.B;
    table.L = params.ecf.L;
    table.c = params.ecf.c;
    table.delta = params.ecf.delta;
    table.seed = seed;
    return table;
}

struct GEval {
    double g = 0.0;
    double gprime = 0.0;
};

// Linear interpolation between bracketing knots; constant beyond the grid.
inline GEval eval_g(const ScoreTable& t, double y) {
    const std::size_t J = t.grid.size();
    if (y <= t.grid.front()) return {t.g_vals.front(), t.gprime_vals.front()};
    if (y >= t.grid.back()) return {t.g_vals.back(), t.gprime_vals.back()};
    const double dz = (t.grid.back() - t.grid.front()) / static_cast<double>(J - 1);
    std::size_t j = static_cast<std::size_t>((y - t.grid.front()) / dz);
    j = std::min(j, J - 2);
    double frac = (y - t.grid[j]) / (t.grid[j + 1] - t.grid[j]);
    return {t.g_vals[j] * (1 - frac) + t.g_vals[j + 1] * frac,
            t.gprime_vals[j] * (1 - frac) + t.gprime_vals[j + 1] * frac};
}

// Plain CSV dump (z, g, gprime) for inspection/plotting.
inline void dump_score_table(const ScoreTable& t, std::ostream& os) {
    os << "z,g,gprime\n";
    os.precision(17);
    for (std::size_t j = 0; j < t.grid.size(); ++j)
        os << t.grid[j] << ',' << t.g_vals[j] << ',' << t.gprime_vals[j] << '\n';
}

}  // namespace pbica
