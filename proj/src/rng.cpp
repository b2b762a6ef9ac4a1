#include "wpansim/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace wpansim {

SimTime SimTime::from_seconds(double seconds) {
  return SimTime(std::llround(seconds * static_cast<double>(kSymbolsPerSecond)));
}

std::int64_t RngStream::uniform_units(int be) {
  if (be < 0 || be > 62) throw std::out_of_range("backoff exponent out of range");
  if (be == 0) return 0;
  return static_cast<std::int64_t>(engine_() >> (64 - be));
}

SimTime RngStream::exponential(double mean_seconds) {
  if (!(mean_seconds > 0.0)) throw std::invalid_argument("exponential mean must be positive");
  const double u = next_unit();
  const double seconds = -mean_seconds * std::log1p(-u);
  auto t = SimTime::from_seconds(seconds);
  return t.count() < 1 ? SimTime(1) : t;
}

}  // namespace wpansim
