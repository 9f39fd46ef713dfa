#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "coevo/value.hpp"

namespace coevo {

using Id = std::int64_t;

// Writer identity for permission checks and trace attribution. The env bridge
// writes with id 0; actor atoms and game atoms write with their own ids.
enum class WriterRole { EnvBridge, Actor, Game };

struct WmEntry {
  Value value;
  int last_write_step = 0;
  Id writer = 0;
  WriterRole role = WriterRole::EnvBridge;
};

struct TraceRecord {
  int step;
  std::string key;
  Value value;
  Id writer;
};

struct MotorCoercion {
  int step;
  std::string key;
};

// The per-trial blackboard. One instance per trial context; never shared.
class WorkingMemory {
 public:
  void set_step(int step) { step_ = step; }
  int step() const { return step_; }

  // Enforces one-way flows: only the env bridge writes sensor keys, only
  // actor atoms write motor keys. Game atoms may write wm keys only.
  void write(const std::string& key, Value v, WriterRole role, Id writer);

  const WmEntry* find(const std::string& key) const;

  const std::map<std::string, WmEntry>& slots() const { return slots_; }

  void enable_trace() { tracing_ = true; }
  const std::vector<TraceRecord>& trace() const { return trace_; }

 private:
  std::map<std::string, WmEntry> slots_;
  std::vector<TraceRecord> trace_;
  int step_ = 0;
  bool tracing_ = false;
};

// Copies a sensor map into memory under the env bridge identity.
void sync_sensors(WorkingMemory& wm, const std::map<std::string, Value>& sensors);

// Scalar command per motor key currently present. Non-scalar motor payloads
// are recorded as coercion events and read as 0.0; absent keys simply do not
// appear (the env treats missing commands as 0.0).
std::map<std::string, double> collect_motors(const WorkingMemory& wm,
                                             std::vector<MotorCoercion>* coercions);

}  // namespace coevo
