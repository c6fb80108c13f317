#pragma once

// Seeding and draw conventions shared by every simulator.
//
// Generator: std::mt19937_64 (its output sequence is fixed by the C++
// standard). Replica r of a run with root seed s is seeded with
// stream_seed(s, r) = splitmix64(s + (r + 1) * 0x9E3779B97F4A7C15).
//
// The std:: distributions are implementation-defined, so draws are converted
// here instead:
//   uniform01       (u >> 11) * 2^-53                in [0, 1)
//   uniform_open01  ((u >> 11) + 0.5) * 2^-53        in (0, 1)
//   uniform_below   Lemire multiply-shift with rejection
//   exponential     -mean * log(uniform_open01)
//   standard_normal Box-Muller on two uniform_open01 draws (cosine branch)

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

namespace bam {

using Engine = std::mt19937_64;

inline constexpr std::string_view kGeneratorId = "mt19937_64/splitmix64-stream/v1";

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t replica) {
  return splitmix64(seed + (replica + 1) * 0x9E3779B97F4A7C15ULL);
}

inline Engine make_stream(std::uint64_t seed, std::uint64_t replica = 0) {
  return Engine(stream_seed(seed, replica));
}

template <class G>
inline double uniform01(G& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

template <class G>
inline double uniform_open01(G& g) {
  return (static_cast<double>(g() >> 11) + 0.5) * 0x1.0p-53;
}

// Uniform integer in [0, n), n >= 1.
template <class G>
inline std::uint64_t uniform_below(G& g, std::uint64_t n) {
  unsigned __int128 m = static_cast<unsigned __int128>(g()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(g()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

template <class G>
inline bool fair_coin(G& g) {
  return (g() >> 63) != 0;
}

template <class G>
inline double exponential(G& g, double mean) {
  return -mean * std::log(uniform_open01(g));
}

template <class G>
inline double standard_normal(G& g) {
  const double u1 = uniform_open01(g);
  const double u2 = uniform_open01(g);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace bam
