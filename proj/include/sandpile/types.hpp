#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sandpile {

using Vertex = std::uint32_t;
using Height = std::int64_t;
using Count = std::uint64_t;

/// Raised when an enumeration or orbit search would exceed its configured budget.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reduced fraction with positive denominator.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d = 1) : num(n), den(d) {
    if (d == 0) throw std::invalid_argument("zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const std::int64_t g = std::gcd(num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const { return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den); }
  bool operator==(const Rational&) const = default;
};

/// Particle counts per vertex.
class Config {
 public:
  Config() = default;
  explicit Config(std::size_t n, Height fill = 0) : heights_(n, fill) {}
  explicit Config(std::vector<Height> heights) : heights_(std::move(heights)) {}
  Config(std::initializer_list<Height> heights) : heights_(heights) {}

  std::size_t size() const { return heights_.size(); }
  Height& operator[](std::size_t v) { return heights_[v]; }
  Height operator[](std::size_t v) const { return heights_[v]; }

  std::span<Height> values() { return heights_; }
  std::span<const Height> values() const { return heights_; }
  std::vector<Height>& raw() { return heights_; }
  const std::vector<Height>& raw() const { return heights_; }

  auto begin() const { return heights_.begin(); }
  auto end() const { return heights_.end(); }

  Height total() const { return std::accumulate(heights_.begin(), heights_.end(), Height{0}); }

  bool operator==(const Config&) const = default;

 private:
  std::vector<Height> heights_;
};

/// Per-vertex toppling counts.
class Odometer {
 public:
  Odometer() = default;
  explicit Odometer(std::size_t n) : topples_(n, 0) {}
  explicit Odometer(std::vector<Count> topples) : topples_(std::move(topples)) {}
  Odometer(std::initializer_list<Count> topples) : topples_(topples) {}

  std::size_t size() const { return topples_.size(); }
  Count& operator[](std::size_t v) { return topples_[v]; }
  Count operator[](std::size_t v) const { return topples_[v]; }

  std::span<const Count> values() const { return topples_; }
  std::vector<Count>& raw() { return topples_; }
  const std::vector<Count>& raw() const { return topples_; }

  auto begin() const { return topples_.begin(); }
  auto end() const { return topples_.end(); }

  Count total() const { return std::accumulate(topples_.begin(), topples_.end(), Count{0}); }
  bool is_zero() const {
    for (Count c : topples_)
      if (c != 0) return false;
    return true;
  }

  bool operator==(const Odometer&) const = default;

 private:
  std::vector<Count> topples_;
};

}  // namespace sandpile
