#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "neuroloop/fatigue.hpp"
#include "neuroloop/synth.hpp"

namespace neuroloop {

enum class TrainingMode {
  fat_c,  // fatigue-controlled: running is gated on the MPF drop rate
  for_t,  // forced: continuous running, no gating
};

struct SessionConfig {
  TrainingMode mode = TrainingMode::fat_c;
  double speed = 16.0;             // m/min, recorded only
  double target_running = 1800.0;  // s
  double rest_duration = 180.0;    // s
  double threshold = 11.0;         // percent
  double window = 4.0;             // s
  BaselineConfig baseline;
  double timeout_factor = 4.0;  // wall-clock cap as a multiple of target_running

  void validate() const;
};

enum class Phase { running, resting, completed };

struct SessionState {
  Phase phase = Phase::running;
  double rest_remaining = 0.0;  // meaningful only while resting
  double accumulated_running = 0.0;
  int bout_index = 0;
  std::optional<double> last_drop_rate;
};

/// Advances the protocol by dt seconds. drop_rate is the value of the window
/// that just ended (empty for baseline windows and while resting).
SessionState step(const SessionState& state, const SessionConfig& cfg,
                  std::optional<double> drop_rate, double dt);

enum class EventKind { bout_start, window_evaluated, rest_start, rest_end, completed, timeout };

struct SessionEvent {
  double t = 0.0;
  EventKind kind = EventKind::bout_start;
  int bout = 0;
  // window_evaluated only
  double window_start = 0.0;
  std::optional<double> mpf;
  std::optional<double> drop_rate;
  bool baseline_window = false;
  double fatigue_level = 0.0;
};

struct BoutSummary {
  int bout = 0;
  double start = 0.0;
  double end = 0.0;
  double running = 0.0;
  int windows = 0;
  std::optional<double> max_drop_rate;
  bool ended_by_rest = false;
};

struct SessionLog {
  TrainingMode mode = TrainingMode::fat_c;
  std::vector<SessionEvent> events;
  std::vector<BoutSummary> bouts;
  double accumulated_running = 0.0;
  double wall_clock = 0.0;
  bool timed_out = false;
  int rests = 0;

  std::optional<double> max_drop_rate() const;
};

/// Closed-loop simulation of one training session against the EMG plant.
/// When `emg_out` is given, every running window's EMG is appended to it.
SessionLog run_session(const SessionConfig& cfg, const PlantConfig& plant, std::uint64_t seed,
                       TimeSeries* emg_out = nullptr);

std::string to_string(EventKind kind);
std::string to_string(TrainingMode mode);
TrainingMode parse_mode(const std::string& text);

}  // namespace neuroloop
