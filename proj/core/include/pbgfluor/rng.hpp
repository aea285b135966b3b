/*
   Copyright 2026 The pbgfluor Authors

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
#include <random>

namespace pbgfluor {

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of trajectory `index` under `master`: splitmix64(master ^ splitmix64(index)).
constexpr std::uint64_t trajectory_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(master ^ splitmix64(index));
}

/// Uniform doubles strictly inside (0, 1). mt19937_64 output is fixed by
/// the standard, and the conversion is done here rather than through
/// std::uniform_real_distribution, so streams are identical on every platform.
class UniformStream {
public:
    explicit UniformStream(std::uint64_t seed) : engine_(seed) {}

    double operator()() {
        constexpr double scale = 1.0 / 9007199254740992.0;  // 2^-53
        return (static_cast<double>(engine_() >> 11) + 0.5) * scale;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace pbgfluor
