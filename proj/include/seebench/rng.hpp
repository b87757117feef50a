#pragma once

#include <cstdint>
#include <random>

namespace seebench {

/// Independent random stream derived from a campaign seed and a stream id.
/// Streams never share state, so adding draws to one leaves the others intact.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream);

    std::mt19937_64& engine() noexcept { return engine_; }

    double uniform();                 // [0, 1)
    double exponential(double rate);  // rate > 0
    double normal(double mean, double stddev);
    long long poisson(double mean);
    bool bernoulli(double p);

private:
    std::mt19937_64 engine_;
};

/// Stream ids used by the simulator; fixed so logs stay reproducible.
namespace streams {
inline constexpr std::uint64_t kFwBlock = 1;
inline constexpr std::uint64_t kSel = 2;
inline constexpr std::uint64_t kSoftReset = 3;
inline constexpr std::uint64_t kHazard = 4;
inline constexpr std::uint64_t kScintillator = 5;
inline constexpr std::uint64_t kNoise = 6;
inline constexpr std::uint64_t kEeprom = 7;
}  // namespace streams

}  // namespace seebench
