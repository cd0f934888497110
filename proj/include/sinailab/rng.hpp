#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace sinailab {

/// Reproducible random stream keyed by (seed, stream id).
///
/// The engine is xoshiro256++ seeded through SplitMix64 from the pair
/// (seed, stream id). Every variate is produced by algorithms implemented
/// here rather than by <random> distributions, so a fixed (seed, stream id)
/// gives bit-identical draws on every toolchain:
///
///   uniform      53-bit mantissa, open interval (0, 1)
///   normal       Marsaglia polar method, second variate cached
///   exponential  -log(U)
///   gamma        Marsaglia-Tsang squeeze (shape < 1 via U^(1/shape) boost)
///   poisson      multiplication method below mean 10, PTRS above
///
/// Child streams are derived with split(); the child id is a hash of the
/// parent id and the child index, so stream ids form a tree and replica i of
/// a Monte Carlo loop always sees the same draws regardless of scheduling.
class RngStream {
public:
    using result_type = std::uint64_t;

    explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    /// Independent child stream; does not advance this stream.
    RngStream split(std::uint64_t child) const;

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()();

    double uniform();
    double normal();
    double normal(double mean, double sd) { return mean + sd * normal(); }
    double exponential();
    double gamma(double shape);
    std::uint64_t poisson(double mean);

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::array<std::uint64_t, 4> s_{};
    double cached_normal_ = 0.0;
    bool has_cached_ = false;

    std::uint64_t poisson_ptrs(double mean);
};

/// SplitMix64 finaliser; exposed for deriving keyed sub-streams.
std::uint64_t mix64(std::uint64_t x);

} // namespace sinailab
