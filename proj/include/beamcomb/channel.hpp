#ifndef BEAMCOMB_CHANNEL_HPP
#define BEAMCOMB_CHANNEL_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "beamcomb/core.hpp"
#include "beamcomb/eig.hpp"
#include "beamcomb/rng.hpp"

namespace beamcomb {

struct Ray {
    double aoa = 0.0;         // radians, in (-pi/2, pi/2)
    double mean_power = 1.0;  // linear; per-user powers sum to 1
};

struct UserGeometry {
    std::vector<Ray> rays;
    double sine_min = 0.0;  // angular spread in directional sines
    double sine_max = 0.0;
};

// Multipath geometry for all users over an M-antenna uniform linear array.
struct MpcSet {
    std::vector<UserGeometry> users;
    int antennas = 0;
    double spacing = 0.5;  // d / lambda
};

struct ChannelConfig {
    int users = 2;
    int rays = 6;
    double spread_deg = 45.0;  // total angular spread per user
    double sector_deg = 120.0; // mean AoAs drawn uniformly over this sector
    int antennas = 64;
    double spacing = 0.5;
    double ray_power_decay = 0.0;  // 0 = equal ray powers, else exp(-decay * r)
};

// Unit-norm ULA steering vector: entries (1/sqrt(M)) e^{-j 2 pi m (d/L) sin t},
// m centered on the array.
inline CVec steering(double theta, int M, double spacing = 0.5) {
    if (M < 1) throw InputError("steering: M must be >= 1");
    if (!(std::abs(theta) < std::numbers::pi / 2))
        throw InputError("steering: |theta| must be < pi/2");
    CVec v(M);
    const double scale = 1.0 / std::sqrt(static_cast<double>(M));
    const double step = -2.0 * std::numbers::pi * spacing * std::sin(theta);
    const double m0 = -0.5 * (M - 1);
    for (int s = 0; s < M; ++s) {
        const double phase = step * (m0 + s);
        v[s] = cx(scale * std::cos(phase), scale * std::sin(phase));
    }
    return v;
}

// Kind of correlation matrix and how it was produced.
enum class CcmKind { ensemble, sample, signal_estimate };

// Hermitian PSD channel correlation matrix with provenance.
struct Ccm {
    CMat matrix;
    CcmKind kind = CcmKind::ensemble;
    size_t sample_count = 0;     // 0 for ensemble
    double noise_variance = 0.0;
};

inline void validate_geometry(const MpcSet& geo) {
    if (geo.antennas < 2) throw ConfigError("geometry: antennas must be >= 2");
    if (geo.users.empty()) throw ConfigError("geometry: at least one user required");
    for (const UserGeometry& u : geo.users) {
        if (u.rays.empty()) throw ConfigError("geometry: every user needs at least one ray");
        for (const Ray& r : u.rays) {
            if (!(std::abs(r.aoa) < std::numbers::pi / 2))
                throw ConfigError("geometry: AoA out of (-pi/2, pi/2)");
            if (!(r.mean_power > 0.0)) throw ConfigError("geometry: ray power must be positive");
        }
    }
}

// Draw a random multipath geometry: per user a mean AoA uniform over the
// sector and ray AoAs uniform within the total angular spread around it.
// Ray powers are normalized to sum to 1 per user.
inline MpcSet sample_geometry(const ChannelConfig& cfg, Rng& rng) {
    if (cfg.users < 1 || cfg.rays < 1) throw ConfigError("sample_geometry: users and rays must be >= 1");
    if (cfg.spread_deg < 0.0 || cfg.sector_deg < 0.0)
        throw ConfigError("sample_geometry: spreads must be non-negative");
    if (cfg.antennas < 2) throw ConfigError("sample_geometry: antennas must be >= 2");
    const double deg = std::numbers::pi / 180.0;
    const double half_sector = 0.5 * cfg.sector_deg * deg;
    const double half_spread = 0.5 * cfg.spread_deg * deg;
    const double limit = std::numbers::pi / 2 - 1e-6;
    if (half_sector + half_spread >= limit)
        throw ConfigError("sample_geometry: sector plus spread exceeds the array field of view");

    MpcSet geo;
    geo.antennas = cfg.antennas;
    geo.spacing = cfg.spacing;
    geo.users.resize(cfg.users);
    for (UserGeometry& u : geo.users) {
        const double mean = rng.uniform(-half_sector, half_sector);
        u.rays.resize(cfg.rays);
        double psum = 0.0;
        for (int r = 0; r < cfg.rays; ++r) {
            const double off = (cfg.rays == 1 && cfg.spread_deg == 0.0)
                                   ? 0.0
                                   : rng.uniform(-half_spread, half_spread);
            u.rays[r].aoa = mean + off;
            u.rays[r].mean_power = std::exp(-cfg.ray_power_decay * r);
            psum += u.rays[r].mean_power;
        }
        for (Ray& ray : u.rays) ray.mean_power /= psum;
        double smin = 1.0, smax = -1.0;
        for (const Ray& ray : u.rays) {
            smin = std::min(smin, std::sin(ray.aoa));
            smax = std::max(smax, std::sin(ray.aoa));
        }
        u.sine_min = smin;
        u.sine_max = smax;
    }
    return geo;
}

// One narrowband channel realization, columns are per-user channel vectors
// h_n = sqrt(M) sum_r beta_r alpha(theta_r) with beta_r ~ CN(0, gamma_r).
inline CMat realize_channel(const MpcSet& geo, Rng& rng) {
    validate_geometry(geo);
    const int M = geo.antennas;
    const int A = static_cast<int>(geo.users.size());
    CMat H(M, A);
    const double scale = std::sqrt(static_cast<double>(M));
    for (int n = 0; n < A; ++n) {
        for (const Ray& ray : geo.users[n].rays) {
            const cx beta = rng.cgaussian(ray.mean_power) * scale;
            const CVec a = steering(ray.aoa, M, geo.spacing);
            for (int i = 0; i < M; ++i) H(i, n) += beta * a[i];
        }
    }
    return H;
}

// Ensemble CCM: R = M sum_{n,r} gamma_{n,r} alpha alpha†. Exact rank is at
// most the total ray count.
inline Ccm ensemble_ccm(const MpcSet& geo) {
    validate_geometry(geo);
    const int M = geo.antennas;
    Ccm out;
    out.matrix = CMat(M, M);
    out.kind = CcmKind::ensemble;
    for (const UserGeometry& u : geo.users)
        for (const Ray& ray : u.rays)
            add_outer(out.matrix, steering(ray.aoa, M, geo.spacing), M * ray.mean_power);
    return out;
}

// Noise variance matching a per-antenna received SNR (signal power per
// antenna is trace(R_t)/M = number of users for normalized ray powers).
inline double noise_variance_for_snr(const MpcSet& geo, double snr_db) {
    const double per_antenna_signal = static_cast<double>(geo.users.size());
    return per_antenna_signal * std::pow(10.0, -snr_db / 10.0);
}

// Sample CCM averaged over samples * freq_bins received vectors y = Hx + n
// with fresh fading and unit-power CN(0,1) symbols per sample.
inline Ccm sample_ccm(const MpcSet& geo, size_t samples, size_t freq_bins, double snr_db,
                      Rng& rng) {
    validate_geometry(geo);
    const size_t total = samples * freq_bins;
    if (total < 1) throw ConfigError("sample_ccm: need at least one sample");
    const int M = geo.antennas;
    const int A = static_cast<int>(geo.users.size());
    const double sigma2 = noise_variance_for_snr(geo, snr_db);
    const double sigma = std::sqrt(sigma2);

    Ccm out;
    out.matrix = CMat(M, M);
    out.kind = CcmKind::sample;
    out.sample_count = total;
    out.noise_variance = sigma2;

    CVec y(M);
    CVec x(A);
    for (size_t t = 0; t < total; ++t) {
        const CMat H = realize_channel(geo, rng);
        for (int n = 0; n < A; ++n) x[n] = rng.cgaussian(1.0);
        for (int i = 0; i < M; ++i) {
            cx s{};
            for (int n = 0; n < A; ++n) s += H(i, n) * x[n];
            y[i] = s + sigma * rng.cgaussian(1.0);
        }
        add_outer(out.matrix, y, 1.0);
    }
    const double inv = 1.0 / static_cast<double>(total);
    for (cx& v : out.matrix.a) v *= inv;
    return out;
}

// Signal CCM estimate: subtract the recorded noise floor and clamp negative
// eigenvalues to zero so the result stays PSD.
inline Ccm signal_ccm_estimate(const Ccm& rt) {
    if (rt.kind != CcmKind::sample)
        throw InputError("signal_ccm_estimate: input must be a sample CCM");
    const int M = rt.matrix.rows;
    Ccm out;
    out.kind = CcmKind::signal_estimate;
    out.sample_count = rt.sample_count;
    out.noise_variance = rt.noise_variance;

    CMat shifted = rt.matrix;
    for (int i = 0; i < M; ++i) shifted(i, i) -= rt.noise_variance;
    if (rt.noise_variance == 0.0) {
        out.matrix = shifted;
        return out;
    }
    const HermEig eig = herm_eig(shifted);
    out.matrix = CMat(M, M);
    for (int k = 0; k < M; ++k) {
        if (eig.values[k] <= 0.0) continue;
        CVec v(M);
        for (int i = 0; i < M; ++i) v[i] = eig.vectors(i, k);
        add_outer(out.matrix, v, eig.values[k]);
    }
    return out;
}

}  // namespace beamcomb

#endif
