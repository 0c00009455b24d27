#ifndef FCLT_RNG_HPP
#define FCLT_RNG_HPP

#include <array>
#include <cstdint>
#include <limits>

namespace fclt {

/// SplitMix64 finalizer. Bijective on 64-bit words.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Derives a child seed from (parent, index). Used to build the
/// master -> cell -> replication -> bootstrap-replicate stream tree, so every
/// stream depends only on its path and never on execution order.
std::uint64_t mix_seed(std::uint64_t parent, std::uint64_t index) noexcept;

/// xoshiro256** generator. Cheap to seed, which matters because every
/// bootstrap replicate gets its own stream.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept;

private:
    std::array<std::uint64_t, 4> s_;
};

/// Stream identifiers below the replication seed.
enum class Stream : std::uint64_t {
    Factor = 1,
    Tau = 2,
    Eta = 3,
    CommonShock = 4,
    AssetFactor = 5,
    AssetBeta = 6,
    Bootstrap = 7,
};

inline Rng make_stream(std::uint64_t seed, Stream which) noexcept
{
    return Rng(mix_seed(seed, static_cast<std::uint64_t>(which)));
}

} // namespace fclt

#endif
