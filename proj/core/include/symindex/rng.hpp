#pragma once

#include <cstdint>
#include <random>

namespace symindex {

// Deterministic 64-bit mixer used to derive per-path substreams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct RngSpec {
  std::uint64_t seed = 0;
};

// One random stream. All variate generation is hand-rolled on top of mt19937_64 so that
// a given (seed, path index) pair yields the same draws on any platform and with any
// thread count; std::*_distribution sequences are implementation-defined and avoided.
class PathRng {
 public:
  PathRng(const RngSpec& spec, std::uint64_t path_index);

  std::uint64_t raw() { return eng_(); }

  double u01() { return static_cast<double>(raw() >> 11) * 0x1.0p-53; }      // [0,1)
  double u01_open() { return (static_cast<double>(raw() >> 11) + 0.5) * 0x1.0p-53; }  // (0,1)

  double normal();                 // Box-Muller, cached spare
  double exponential();            // mean 1
  double gamma(double shape);      // scale 1, Marsaglia-Tsang
  long poisson(double mean);
  // Standard symmetric alpha-stable, cf exp(-|xi|^alpha), Chambers-Mallows-Stuck.
  double symmetric_stable(double alpha);
  // Positive alpha-stable with Laplace transform exp(-u^alpha), 0 < alpha < 1 (Kanter).
  double positive_stable(double alpha);

 private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace symindex
