#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>

namespace mtt {

/// All randomness in the library flows through this engine. Substreams are
/// derived from a master seed with derive_seed so that Monte Carlo runs are
/// reproducible regardless of worker count or scheduling.
using RandomEngine = std::mt19937_64;

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace detail

/// Counter-based substream seed: mixes the master seed with a stream tag and
/// an index (run, scan, target id, ...).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t index = 0) {
  std::uint64_t s = detail::splitmix64(master ^ 0x6a09e667f3bcc909ULL);
  s = detail::splitmix64(s ^ stream);
  return detail::splitmix64(s ^ index);
}

inline RandomEngine make_engine(std::uint64_t master, std::uint64_t stream,
                                std::uint64_t index = 0) {
  return RandomEngine(derive_seed(master, stream, index));
}

/// Uniform double in (0, 1]; never returns 0 so log() is safe.
inline double uniform_open(RandomEngine& eng) {
  return (static_cast<double>(eng() >> 11) + 1.0) * 0x1.0p-53;
}

/// Fills `out` with iid standard normal draws (polar method), pairs taken
/// in column-major order. Batch fills and repeated 1-column fills consume
/// the engine identically and produce identical values.
void fill_standard_normal(Eigen::Ref<Eigen::MatrixXd> out, RandomEngine& eng);

/// Single standard normal draw (one polar pair; second value discarded).
double standard_normal(RandomEngine& eng);

}  // namespace mtt
