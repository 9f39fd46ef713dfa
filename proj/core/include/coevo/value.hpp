#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "coevo/errors.hpp"

namespace coevo {

enum class ValueKind { Signal, Scalar, Vec };

// A working-memory payload: boolean activation signal, finite scalar, or a
// non-empty finite vector. Construction enforces finiteness so no non-finite
// number can ever enter working memory.
class Value {
 public:
  static Value signal(bool b) { return Value(b); }
  static Value scalar(double x);
  static Value vec(std::vector<double> v);

  ValueKind kind() const { return static_cast<ValueKind>(v_.index()); }
  bool as_signal() const { return std::get<bool>(v_); }
  double as_scalar() const { return std::get<double>(v_); }
  const std::vector<double>& as_vec() const { return std::get<std::vector<double>>(v_); }

  // Numeric view used by transfer functions: Signal -> {0|1}, Scalar -> {x},
  // Vec -> its elements.
  std::vector<double> numeric() const;

  bool operator==(const Value& o) const { return v_ == o.v_; }

 private:
  explicit Value(bool b) : v_(b) {}
  explicit Value(double x) : v_(x) {}
  explicit Value(std::vector<double> v) : v_(std::move(v)) {}
  std::variant<bool, double, std::vector<double>> v_;
};

enum class KeyRole { Sensor, Motor, Internal };

// Keys are plain strings with a mandatory role prefix.
KeyRole key_role(std::string_view key);
bool is_grounding_key(std::string_view key);  // sensor/ or motor/

// Mints fresh internal keys "wm/k<N>". bump_past() keeps the counter ahead of
// any minted-looking key seen during deserialization.
class KeyMinter {
 public:
  std::string mint() { return "wm/k" + std::to_string(next_++); }
  void bump_past(std::string_view key);
  std::uint64_t next() const { return next_; }

 private:
  std::uint64_t next_ = 0;
};

}  // namespace coevo
