#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace gsb {

// Fresh generator keyed by a tuple of integers (seed, stream tag, index, ...).
// Every stochastic step derives its own generator this way; there is no shared RNG.
inline std::mt19937_64 keyed_rng(std::initializer_list<std::uint64_t> key) {
  std::vector<std::uint32_t> words;
  words.reserve(key.size() * 2);
  for (std::uint64_t k : key) {
    words.push_back(static_cast<std::uint32_t>(k));
    words.push_back(static_cast<std::uint32_t>(k >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

// Stream tags keep the generators of different subsystems disjoint.
namespace stream {
inline constexpr std::uint64_t prior_member = 0x5052494f52ULL;
inline constexpr std::uint64_t truth = 0x5452555448ULL;
inline constexpr std::uint64_t tool_noise = 0x4e4f495345ULL;
inline constexpr std::uint64_t enkf_perturbation = 0x454e4b46ULL;
inline constexpr std::uint64_t random_agent = 0x52414e44ULL;
}  // namespace stream

}  // namespace gsb
