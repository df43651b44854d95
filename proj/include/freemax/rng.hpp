#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>

namespace freemax {

// Splittable counter-based random stream (Philox4x32-10 underneath).
// Identical (seed, stream id, counter) always reproduces identical output,
// and streams split from distinct child ids occupy disjoint counter prefixes,
// so Monte Carlo batches can be parallelised with one stream per draw and the
// results do not depend on the worker count.
//
// A stream is cheap to copy; it is not meant to be shared between threads.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0)
      : seed_(seed), stream_(stream_id) {}

  // Derives a statistically independent child stream.
  RngStream split(std::uint64_t child) const;

  std::uint64_t next_u64();
  // Strictly inside (0,1).
  double uniform();
  // One standard normal draw (Box-Muller; consumes two uniforms).
  double normal();
  // Independent pair of standard normals from one Box-Muller transform.
  std::pair<double, double> normal_pair();

  // Bulk uniforms via the dispatched kernel lane. Starts at a fresh block, so
  // the values depend only on (seed, stream, prior fill history), never on
  // batch sizes used elsewhere.
  void fill_uniform(std::span<double> out);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::optional<std::uint64_t> spare_;
};

inline RngStream split(std::uint64_t seed, std::uint64_t worker_id) {
  return RngStream(seed).split(worker_id);
}

}  // namespace freemax
