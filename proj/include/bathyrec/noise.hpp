#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace bathyrec {

/// Bounded zero-mean measurement noise: each sample is perturbed uniformly
/// within +- relative_amplitude times the local depth.
struct NoiseSpec {
    double relative_amplitude = 0.02;
    std::uint64_t seed = 0;
};

namespace detail {

/// Uniform double in [-1, 1) with a pinned 53-bit mapping, so corrupted data
/// is bit-identical for a given seed on any platform.
class UniformSigned {
public:
    explicit UniformSigned(std::uint64_t seed) : eng_(seed) {}
    double next() {
        const std::uint64_t bits = eng_() >> 11;
        return 2.0 * (static_cast<double>(bits) * 0x1.0p-53) - 1.0;
    }

private:
    std::mt19937_64 eng_;
};

} // namespace detail

inline std::vector<double> add_noise(const std::vector<double>& values,
                                     const std::vector<double>& depth,
                                     const NoiseSpec& spec) {
    if (spec.relative_amplitude < 0.0)
        throw std::invalid_argument("add_noise: amplitude must be nonnegative");
    if (depth.size() != values.size())
        throw std::invalid_argument("add_noise: depth field size mismatch");
    std::vector<double> out(values);
    if (spec.relative_amplitude == 0.0) return out;
    detail::UniformSigned rng(spec.seed);
    for (std::size_t j = 0; j < out.size(); ++j)
        out[j] += spec.relative_amplitude * depth[j] * rng.next();
    return out;
}

} // namespace bathyrec
