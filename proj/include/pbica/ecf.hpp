#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "pbica/errors.hpp"
#include "pbica/preprocess.hpp"
#include "pbica/rng.hpp"

namespace pbica {

enum class BinMode { equal_width, equal_occupancy };

struct BinSpec {
    BinMode mode = BinMode::equal_width;
    int B = 0;
    std::vector<double> edges;    // B+1, strictly increasing
    std::vector<double> centers;  // B, edge midpoints
    double h = 0.0;               // nominal width (equal_occupancy: range/B)
};

// One projection direction's debiased binned ECF on the retained grid.
struct EcfProbe {
    Vector direction;
    std::vector<double> freqs;
    std::vector<std::complex<double>> phi;
    std::vector<double> taper;
    double h = 0.0;
    double proj_mean = 0.0;
    double proj_std = 0.0;
    std::vector<double> z;  // standardized projection, kept for the z_max quantile
};

struct EcfParams {
    int R = 12;
    int B = 128;
    BinMode mode = BinMode::equal_width;
    double c = 0.3;
    double delta = 1e-3;
    int L = 5;
};

// R i.i.d. uniform directions on the unit sphere (normalized Gaussians).
inline std::vector<Vector> sample_directions(int m, int R, Rng& rng) {
    if (m < 1) throw input_error("sample_directions: m must be >= 1");
    if (R < 1) throw input_error("sample_directions: R must be >= 1");
    std::vector<Vector> out;
    out.reserve(R);
    while (static_cast<int>(out.size()) < R) {
        Vector a(m);
        for (int i = 0; i < m; ++i) a(i) = rng.normal();
        double n = a.norm();
        if (n < 1e-12) continue;  // essentially impossible, but keep the contract
        out.push_back(a / n);
    }
    return out;
}

// Z = a^T X standardized to mean 0, std 1 (1/N convention). Returns the
// pre-standardization statistics.
struct Projection {
    std::vector<double> z;
    double mean = 0.0;
    double std = 0.0;
};

inline Projection project_standardize(const DataMatrix& X, const Vector& a) {
    Eigen::RowVectorXd zr = a.transpose() * X.values;
    const double N = static_cast<double>(zr.size());
    double mean = zr.mean();
    double var = (zr.array() - mean).square().sum() / N;
    if (var <= 0.0)
        throw degenerate_data_error("project_standardize: constant projection (zero variance)");
    double sd = std::sqrt(var);
    Projection p;
    p.mean = mean;
    p.std = sd;
    p.z.resize(zr.size());
    for (Eigen::Index i = 0; i < zr.size(); ++i) p.z[i] = (zr(i) - mean) / sd;
    return p;
}

inline BinSpec build_bins(const std::vector<double>& Z, int B, BinMode mode) {
    const int N = static_cast<int>(Z.size());
    if (B < 2) throw input_error("build_bins: B must be >= 2");
    if (B > N) throw input_error("build_bins: B exceeds sample count");
    auto [mn_it, mx_it] = std::minmax_element(Z.begin(), Z.end());
    const double mn = *mn_it, mx = *mx_it;
    if (!(mx > mn)) throw degenerate_data_error("build_bins: zero data range");

    BinSpec spec;
    spec.mode = mode;
    spec.B = B;
    spec.edges.resize(B + 1);
    spec.centers.resize(B);
    if (mode == BinMode::equal_width) {
        // B uniform bins over [min - h/2, max + h/2]; bin centers hit min and max.
        spec.h = (mx - mn) / (B - 1);
        for (int b = 0; b <= B; ++b) spec.edges[b] = mn - spec.h / 2 + spec.h * b;
    } else {
        std::vector<double> sorted(Z);
        std::sort(sorted.begin(), sorted.end());
        for (int k = 0; k <= B; ++k) {
            // linear-interpolation sample quantile at k/B
            double pos = (static_cast<double>(k) / B) * (N - 1);
            int lo = static_cast<int>(pos);
            int hi = std::min(lo + 1, N - 1);
            double frac = pos - lo;
            spec.edges[k] = sorted[lo] * (1 - frac) + sorted[hi] * frac;
        }
        // quantile edges can coincide on discrete data; nudge to keep them increasing
        for (int k = 1; k <= B; ++k)
            if (spec.edges[k] <= spec.edges[k - 1])
                spec.edges[k] = std::nextafter(spec.edges[k - 1],
                                               std::numeric_limits<double>::infinity());
        spec.h = (spec.edges[B] - spec.edges[0]) / B;
    }
    for (int b = 0; b < B; ++b) spec.centers[b] = (spec.edges[b] + spec.edges[b + 1]) / 2;
    return spec;
}

// Subtractive-dither histogram: z_n + d_n with d_n ~ U[-h/2, h/2]; samples
// pushed outside the edge range are clamped into the boundary bins.
// Pass dither_width = 0 to disable the dither (test hook).
inline std::vector<double> dithered_histogram(const std::vector<double>& Z,
                                              const BinSpec& bins, Rng& rng,
                                              double dither_width = -1.0) {
    const double h = dither_width < 0.0 ? bins.h : dither_width;
    std::vector<double> p(bins.B, 0.0);
    for (double z : Z) {
        double zd = h > 0.0 ? z + rng.uniform(-h / 2, h / 2) : z;
        auto it = std::upper_bound(bins.edges.begin(), bins.edges.end(), zd);
        int idx = static_cast<int>(it - bins.edges.begin()) - 1;
        idx = std::clamp(idx, 0, bins.B - 1);
        p[idx] += 1.0;
    }
    const double N = static_cast<double>(Z.size());
    for (double& v : p) v /= N;
    return p;
}

inline std::complex<double> binned_ecf(const std::vector<double>& p,
                                       const std::vector<double>& centers, double u) {
    std::complex<double> s{0.0, 0.0};
    for (std::size_t b = 0; b < p.size(); ++b)
        s += p[b] * std::complex<double>{std::cos(u * centers[b]), std::sin(u * centers[b])};
    return s;
}

inline double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

inline std::complex<double> sinc_debias(std::complex<double> phi_raw, double u, double h,
                                        double c, double delta) {
    if (std::abs(u) * h > c + 1e-12)
        throw frequency_out_of_band_error("sinc_debias: |u|h exceeds safe band c");
    return phi_raw / std::max(sinc(u * h / 2), delta);
}

// Retained frequency grid u_l = 2*pi*l/(B*h), l = 1..L: the natural grid of a
// B-point histogram, whose reconstruction period equals the full data range
// B*h (no wrap-around across the table). All frequencies must sit inside the
// sinc-debias safe band |u|h <= c.
inline std::vector<double> frequency_grid(double h, double c, int L, int B) {
    if (L < 1) throw input_error("frequency_grid: L must be >= 1");
    if (h <= 0.0) throw input_error("frequency_grid: h must be positive");
    if (B < 2) throw input_error("frequency_grid: B must be >= 2");
    if (2.0 * std::numbers::pi * L / B > c + 1e-12)
        throw frequency_out_of_band_error(
            "frequency_grid: 2*pi*L/B exceeds the safe band c; reduce L or increase B");
    std::vector<double> u(L);
    for (int l = 1; l <= L; ++l) u[l - 1] = 2.0 * std::numbers::pi * l / (B * h);
    return u;
}

// Gaussian taper with scale tied to the band edge T = c/h, so attenuation at
// the edge is exactly e^{-1} regardless of how much of the band the grid uses.
inline std::vector<double> taper_weights(const std::vector<double>& freqs, double T) {
    std::vector<double> w(freqs.size());
    for (std::size_t i = 0; i < freqs.size(); ++i)
        w[i] = std::exp(-(freqs[i] / T) * (freqs[i] / T));
    return w;
}

inline EcfProbe make_probe(const DataMatrix& X, const Vector& a, const EcfParams& params,
                           Rng& dither_rng) {
    Projection proj = project_standardize(X, a);
    BinSpec bins = build_bins(proj.z, params.B, params.mode);
    std::vector<double> p = dithered_histogram(proj.z, bins, dither_rng);
    EcfProbe probe;
    probe.direction = a;
    probe.h = bins.h;
    probe.proj_mean = proj.mean;
    probe.proj_std = proj.std;
    probe.freqs = frequency_grid(bins.h, params.c, params.L, params.B);
    probe.taper = taper_weights(probe.freqs, params.c / bins.h);
    probe.phi.reserve(probe.freqs.size());
    for (double u : probe.freqs)
        probe.phi.push_back(
            sinc_debias(binned_ecf(p, bins.centers, u), u, bins.h, params.c, params.delta));
    probe.z = std::move(proj.z);
    return probe;
}

}  // namespace pbica
