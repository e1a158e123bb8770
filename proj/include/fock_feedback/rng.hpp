/*
   Copyright 2026 The fock-feedback Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <cstdint>

namespace fockfb {

/// Counter-based randomness: every variate is a pure function of
/// (seed, stream, counter), so parallel sweeps are schedule-independent.
namespace rng {

// SplitMix64 finalizer (Steele, Lea, Flood 2014).
inline std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t hash3(std::uint64_t seed, std::uint64_t stream,
                           std::uint64_t counter)
{
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ mix64(stream ^ 0xd1b54a32d192ed03ull));
    h = mix64(h ^ mix64(counter ^ 0x8cb92ba72f3d8dd7ull));
    return h;
}

/// Uniform variate in [0, 1) with 53 random bits.
inline double uniform01(std::uint64_t seed, std::uint64_t stream,
                        std::uint64_t counter)
{
    return static_cast<double>(hash3(seed, stream, counter) >> 11) *
           0x1.0p-53;
}

} // namespace rng
} // namespace fockfb
