#include "freemax/rng.hpp"

#include <cmath>
#include <numbers>

#include "freemax/kernels/kernels.hpp"
#include "freemax/kernels/philox.hpp"
#include "freemax/kernels/vmath.hpp"

namespace freemax {

RngStream RngStream::split(std::uint64_t child) const {
  const std::uint64_t derived =
      kern::splitmix64(stream_ ^ ((child + 1) * 0x9E3779B97F4A7C15ull));
  return RngStream(seed_, derived);
}

std::uint64_t RngStream::next_u64() {
  if (spare_) {
    const std::uint64_t v = *spare_;
    spare_.reset();
    return v;
  }
  const auto pair = kern::philox_block_u64(seed_, stream_, block_++);
  spare_ = pair[1];
  return pair[0];
}

double RngStream::uniform() { return kern::uniform_from_bits(next_u64()); }

std::pair<double, double> RngStream::normal_pair() {
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * vm::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(a), r * std::sin(a)};
}

double RngStream::normal() { return normal_pair().first; }

void RngStream::fill_uniform(std::span<double> out) {
  spare_.reset();
  kern::ops().fill_uniform(seed_, stream_, block_, out.data(), out.size());
  block_ += (out.size() + 1) / 2;
}

}  // namespace freemax
