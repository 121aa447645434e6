//! \file dmdeco/random.hpp
//! Philox4x32-10 counter-based generator (Salmon et al., SC'11).
//!
//! A draw is a pure function of (key, counter), so any shot or sample can be
//! regenerated independently of how work is split across threads.
#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace dmdeco
{
inline constexpr std::string_view rng_algorithm = "philox4x32-10";

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

//! The 10-round Philox4x32 bijection
PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key);

/*!
 * Stream of uniforms for one (seed, stream) pair.
 *
 * Counter layout: {block lo, block hi, stream lo, stream hi}; the key is the
 * 64-bit seed. Each block yields four 32-bit words.
 */
class PhiloxStream
{
  public:
    PhiloxStream(std::uint64_t seed, std::uint64_t stream);

    std::uint32_t next_u32();

    //! Uniform on the open interval (0, 1) with 53 random bits
    double uniform();

    //! Standard normal by Box-Muller (both variates used in turn)
    double normal();

  private:
    void refill();

    PhiloxKey key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    PhiloxCounter buffer_{};
    int used_ = 4;
    double spare_normal_ = 0;
    bool has_spare_ = false;
};
}  // namespace dmdeco
