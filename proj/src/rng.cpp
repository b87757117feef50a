#include "seebench/rng.hpp"

namespace seebench {

namespace {

// splitmix64 finalizer; decorrelates nearby (seed, stream) pairs.
std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : engine_(mix(mix(seed) ^ (stream * 0xd1342543de82ef95ULL))) {}

double RngStream::uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

double RngStream::exponential(double rate) { return std::exponential_distribution<double>(rate)(engine_); }

double RngStream::normal(double mean, double stddev) {
    return std::normal_distribution<double>(mean, stddev)(engine_);
}

long long RngStream::poisson(double mean) {
    if (mean <= 0.0) {
        return 0;
    }
    return std::poisson_distribution<long long>(mean)(engine_);
}

bool RngStream::bernoulli(double p) { return uniform() < p; }

}  // namespace seebench
