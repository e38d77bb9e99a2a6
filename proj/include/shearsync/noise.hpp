#pragma once

#include <cstdint>

#include "shearsync/errors.hpp"
#include "shearsync/philox.hpp"

namespace shearsync {

// Channel ids. ext_re/ext_im are the common external forcing shared by all
// oscillators; each oscillator j owns three intrinsic channels.
namespace chan {
inline constexpr std::uint32_t ext_re = 0;
inline constexpr std::uint32_t ext_im = 1;
inline constexpr std::uint32_t e_re(std::uint32_t j) { return 2 + 3 * j; }
inline constexpr std::uint32_t e_im(std::uint32_t j) { return 3 + 3 * j; }
inline constexpr std::uint32_t n(std::uint32_t j) { return 4 + 3 * j; }
}  // namespace chan

struct NoiseSpec {
    double d_ext = 0.0;   // external forcing intensity, per field component
    double d_e = 0.0;     // intrinsic field intensity, per component
    double d_n = 0.0;     // intrinsic inversion intensity (variance 2*d_n*dt)
    std::uint64_t seed = 0;
    double dt_grid = 1e-4;

    void validate() const {
        if (!(d_ext >= 0.0) || !(d_e >= 0.0) || !(d_n >= 0.0))
            throw ConfigError("noise intensities must be >= 0 and finite");
        if (!(dt_grid > 0.0))
            throw ConfigError("noise dt_grid must be > 0");
    }
};

// Intensities divide by g*gamma when simulating in the rescaled time
// t~ = t * g * gamma, keeping the forcing strength comparable between the
// laser and its amplitude-equation reduction.
inline NoiseSpec scale_for_rescaled_time(const NoiseSpec& s, double g_gamma) {
    if (!(g_gamma > 0.0))
        throw DomainError("scale_for_rescaled_time: g_gamma must be > 0");
    NoiseSpec out = s;
    out.d_ext = s.d_ext / g_gamma;
    out.d_e = s.d_e / g_gamma;
    out.d_n = s.d_n / g_gamma;
    return out;
}

// Seed-reproducible Gaussian increments on a fixed time grid, indexed by
// absolute (signed) cell index. Querying a cell never depends on any other
// cell having been queried: pullback windows released at different t0 see
// literally the same forcing on their overlap.
class NoisePath {
public:
    NoisePath() = default;
    explicit NoisePath(const NoiseSpec& spec) : spec_(spec) { spec_.validate(); }

    const NoiseSpec& spec() const { return spec_; }

    // Per-cell variance for a channel (before multiplying by dt).
    double channel_intensity(std::uint32_t channel) const {
        if (channel < 2) return spec_.d_ext;
        switch ((channel - 2) % 3) {
            case 0:
            case 1: return spec_.d_e;
            default: return 2.0 * spec_.d_n;
        }
    }

    // Unit normal for (cell index, channel). `substream` selects the
    // subdivision level: substream k holds the iid sub-increments used when
    // the integrator step is dt_grid/k. Level 1 is the canonical grid.
    double unit_normal(std::int64_t index, std::uint32_t channel,
                       std::uint32_t substream = 1) const {
        return counter_normal(spec_.seed, index, channel, substream);
    }

    // Wiener increment over one cell of substream k (duration dt_grid/k).
    double increment(std::int64_t index, std::uint32_t channel,
                     std::uint32_t substream = 1) const {
        const double v = channel_intensity(channel);
        if (v == 0.0) return 0.0;
        return std::sqrt(v * spec_.dt_grid / double(substream)) *
               unit_normal(index, channel, substream);
    }

    // Spec-facing name: the increment for a channel at a grid cell.
    double sample_increment(std::uint32_t channel, std::int64_t time_index) const {
        return increment(time_index, channel);
    }

private:
    NoiseSpec spec_{};
};

}  // namespace shearsync
