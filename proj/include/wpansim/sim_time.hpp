#pragma once

#include <compare>
#include <cstdint>
#include <ostream>

namespace wpansim {

/// Simulated time, counted in PHY symbol periods.
///
/// The 2.4 GHz O-QPSK PHY runs at 250 kbit/s with 4 bits per symbol, so one
/// second is exactly 62,500 symbols. Every timing constant of the MAC is an
/// integer number of symbols, which keeps superframe arithmetic exact.
class SimTime {
 public:
  static constexpr std::int64_t kSymbolsPerSecond = 62'500;

  constexpr SimTime() = default;
  constexpr explicit SimTime(std::int64_t symbols) : symbols_(symbols) {}

  static constexpr SimTime symbols(std::int64_t n) { return SimTime(n); }
  static constexpr SimTime zero() { return SimTime(0); }

  /// Rounds to the nearest symbol.
  static SimTime from_seconds(double seconds);

  constexpr std::int64_t count() const { return symbols_; }
  constexpr double seconds() const {
    return static_cast<double>(symbols_) / static_cast<double>(kSymbolsPerSecond);
  }

  constexpr SimTime& operator+=(SimTime o) {
    symbols_ += o.symbols_;
    return *this;
  }
  constexpr SimTime& operator-=(SimTime o) {
    symbols_ -= o.symbols_;
    return *this;
  }
  friend constexpr SimTime operator+(SimTime a, SimTime b) { return SimTime(a.symbols_ + b.symbols_); }
  friend constexpr SimTime operator-(SimTime a, SimTime b) { return SimTime(a.symbols_ - b.symbols_); }
  friend constexpr SimTime operator*(SimTime a, std::int64_t k) { return SimTime(a.symbols_ * k); }
  friend constexpr SimTime operator*(std::int64_t k, SimTime a) { return SimTime(a.symbols_ * k); }
  friend constexpr auto operator<=>(SimTime, SimTime) = default;

  friend std::ostream& operator<<(std::ostream& os, SimTime t) { return os << t.symbols_ << "sym"; }

 private:
  std::int64_t symbols_ = 0;
};

}  // namespace wpansim
