#include "fclt/rng.hpp"

#include <doctest.h>

#include <set>

using namespace fclt;

TEST_CASE("seed derivation is deterministic and separates indices")
{
    CHECK(mix_seed(1, 2) == mix_seed(1, 2));
    CHECK(mix_seed(1, 2) != mix_seed(2, 1));
    std::set<std::uint64_t> seen;
    for (std::uint64_t r = 0; r < 1000; ++r)
        seen.insert(mix_seed(42, r));
    CHECK(seen.size() == 1000);
}

TEST_CASE("xoshiro stream reproduces itself")
{
    Rng a(7);
    Rng b(7);
    Rng c(8);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a();
        CHECK(x == b());
        differs = differs || x != c();
    }
    CHECK(differs);
}

TEST_CASE("uniform bits are balanced")
{
    Rng rng(123);
    std::size_t ones = 0;
    const std::size_t words = 20000;
    for (std::size_t i = 0; i < words; ++i)
        ones += static_cast<std::size_t>(__builtin_popcountll(rng()));
    const double frac = static_cast<double>(ones) / static_cast<double>(64 * words);
    // sd of the fraction is 0.5 / sqrt(1.28e6) ~ 4.4e-4
    CHECK(frac == doctest::Approx(0.5).epsilon(0.003));
}
