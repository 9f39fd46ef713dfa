#include "coevo/working_memory.hpp"

#include "coevo/errors.hpp"

namespace coevo {

void WorkingMemory::write(const std::string& key, Value v, WriterRole role, Id writer) {
  const KeyRole kr = key_role(key);
  if (kr == KeyRole::Sensor && role != WriterRole::EnvBridge)
    throw SensorWriteForbidden("write to '" + key + "' blocked: sensor keys are env-owned");
  if (kr == KeyRole::Motor && role != WriterRole::Actor)
    throw MotorWriteForbidden("write to '" + key + "' blocked: motor keys are actor-owned");

  if (tracing_) trace_.push_back(TraceRecord{step_, key, v, writer});
  slots_.insert_or_assign(key, WmEntry{std::move(v), step_, writer, role});
}

const WmEntry* WorkingMemory::find(const std::string& key) const {
  auto it = slots_.find(key);
  return it == slots_.end() ? nullptr : &it->second;
}

void sync_sensors(WorkingMemory& wm, const std::map<std::string, Value>& sensors) {
  for (const auto& [key, value] : sensors) wm.write(key, value, WriterRole::EnvBridge, 0);
}

std::map<std::string, double> collect_motors(const WorkingMemory& wm,
                                             std::vector<MotorCoercion>* coercions) {
  std::map<std::string, double> out;
  for (const auto& [key, entry] : wm.slots()) {
    if (key_role(key) != KeyRole::Motor) continue;
    if (entry.value.kind() == ValueKind::Scalar) {
      out[key] = entry.value.as_scalar();
    } else {
      if (coercions) coercions->push_back(MotorCoercion{wm.step(), key});
      out[key] = 0.0;
    }
  }
  return out;
}

}  // namespace coevo
