#include "mcig/rng.hpp"

#include "mcig/error.hpp"

#include <cmath>
#include <numbers>

namespace mcig {

std::uint64_t CounterRng::at(std::uint64_t seed,
                             std::uint64_t position) noexcept {
  std::uint64_t z = seed + position * kGamma;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double CounterRng::to_open_unit(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

double VariateStream::uniform() {
  if (slot_ >= CounterRng::kSlotsPerVariate)
    throw Error(ErrorCode::Precondition,
                "variate sampler consumed more than 16 uniform draws");
  const std::uint64_t position =
      index_ * CounterRng::kSlotsPerVariate + static_cast<std::uint64_t>(slot_) + 1;
  ++slot_;
  return CounterRng::to_open_unit(CounterRng::at(seed_, position));
}

double VariateStream::standard_normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace mcig
