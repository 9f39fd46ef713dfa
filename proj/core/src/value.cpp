#include "coevo/value.hpp"

#include <charconv>
#include <cmath>

namespace coevo {

Value Value::scalar(double x) {
  if (!std::isfinite(x)) throw NonFiniteValue("scalar value is not finite");
  return Value(x);
}

Value Value::vec(std::vector<double> v) {
  if (v.empty()) throw NonFiniteValue("vec value must be non-empty");
  for (double x : v) {
    if (!std::isfinite(x)) throw NonFiniteValue("vec value contains a non-finite element");
  }
  return Value(std::move(v));
}

std::vector<double> Value::numeric() const {
  switch (kind()) {
    case ValueKind::Signal:
      return {as_signal() ? 1.0 : 0.0};
    case ValueKind::Scalar:
      return {as_scalar()};
    case ValueKind::Vec:
      return as_vec();
  }
  return {};
}

KeyRole key_role(std::string_view key) {
  if (key.starts_with("sensor/") && key.size() > 7) return KeyRole::Sensor;
  if (key.starts_with("motor/") && key.size() > 6) return KeyRole::Motor;
  if (key.starts_with("wm/") && key.size() > 3) return KeyRole::Internal;
  throw MalformedKey("key '" + std::string(key) + "' lacks a sensor/, motor/ or wm/ prefix");
}

bool is_grounding_key(std::string_view key) {
  KeyRole r = key_role(key);
  return r == KeyRole::Sensor || r == KeyRole::Motor;
}

void KeyMinter::bump_past(std::string_view key) {
  if (!key.starts_with("wm/k")) return;
  std::uint64_t n = 0;
  const char* first = key.data() + 4;
  const char* last = key.data() + key.size();
  auto [p, ec] = std::from_chars(first, last, n);
  if (ec == std::errc() && p == last && n >= next_) next_ = n + 1;
}

}  // namespace coevo
