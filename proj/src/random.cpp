#include "dmdeco/random.hpp"

#include <cmath>
#include <numbers>

namespace dmdeco
{
namespace
{
constexpr std::uint32_t mult0 = 0xD2511F53;
constexpr std::uint32_t mult1 = 0xCD9E8D57;
constexpr std::uint32_t weyl0 = 0x9E3779B9;
constexpr std::uint32_t weyl1 = 0xBB67AE85;

void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo)
{
    std::uint64_t const p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}
}  // namespace

PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key)
{
    for (int round = 0; round < 10; ++round)
    {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(mult0, ctr[0], hi0, lo0);
        mulhilo(mult1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += weyl0;
        key[1] += weyl1;
    }
    return ctr;
}

PhiloxStream::PhiloxStream(std::uint64_t seed, std::uint64_t stream)
    : key_{static_cast<std::uint32_t>(seed),
           static_cast<std::uint32_t>(seed >> 32)}
    , stream_(stream)
{
}

void PhiloxStream::refill()
{
    buffer_ = philox4x32_10({static_cast<std::uint32_t>(block_),
                             static_cast<std::uint32_t>(block_ >> 32),
                             static_cast<std::uint32_t>(stream_),
                             static_cast<std::uint32_t>(stream_ >> 32)},
                            key_);
    ++block_;
    used_ = 0;
}

std::uint32_t PhiloxStream::next_u32()
{
    if (used_ == 4)
        refill();
    return buffer_[used_++];
}

double PhiloxStream::uniform()
{
    std::uint64_t const hi = next_u32() >> 5;  // 27 bits
    std::uint64_t const lo = next_u32() >> 6;  // 26 bits
    double const x = static_cast<double>((hi << 26) | lo);
    return (x + 0.5) * 0x1p-53;
}

double PhiloxStream::normal()
{
    if (has_spare_)
    {
        has_spare_ = false;
        return spare_normal_;
    }
    double const r = std::sqrt(-2 * std::log(uniform()));
    double const phi = 2 * std::numbers::pi * uniform();
    spare_normal_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
}
}  // namespace dmdeco
