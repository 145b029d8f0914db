#include "neuroloop/controller.hpp"

#include <algorithm>
#include <cmath>

#include "neuroloop/error.hpp"
#include "neuroloop/random.hpp"

namespace neuroloop {

namespace {
// Tolerance for comparing accumulated simulated seconds.
constexpr double kTimeEps = 1e-9;
}  // namespace

void SessionConfig::validate() const {
  if (!(target_running > 0.0)) throw ConfigError("target_running must be positive");
  if (!(rest_duration > 0.0)) throw ConfigError("rest_duration must be positive");
  if (!(threshold > 0.0 && threshold < 100.0)) throw ConfigError("threshold must be in (0, 100)");
  if (!(window > 0.0)) throw ConfigError("window must be positive");
  if (!(timeout_factor >= 1.0)) throw ConfigError("timeout_factor must be >= 1");
  if (baseline.windows < 1) throw ConfigError("baseline needs at least one window");
}

SessionState step(const SessionState& state, const SessionConfig& cfg,
                  std::optional<double> drop_rate, double dt) {
  if (!(dt > 0.0)) throw DomainError("step needs dt > 0");
  SessionState next = state;
  switch (state.phase) {
    case Phase::completed:
      throw ProtocolError("step called after the session completed");

    case Phase::running:
      if (state.accumulated_running >= cfg.target_running - kTimeEps) {
        next.phase = Phase::completed;
        return next;
      }
      next.accumulated_running += dt;
      if (drop_rate) next.last_drop_rate = drop_rate;
      if (next.accumulated_running >= cfg.target_running - kTimeEps) {
        next.phase = Phase::completed;
      } else if (cfg.mode == TrainingMode::fat_c && drop_rate && *drop_rate >= cfg.threshold) {
        next.phase = Phase::resting;
        next.rest_remaining = cfg.rest_duration;
      }
      return next;

    case Phase::resting:
      if (drop_rate) throw ProtocolError("drop rate supplied while resting");
      next.rest_remaining -= dt;
      if (next.rest_remaining <= kTimeEps) {
        next.phase = Phase::running;
        next.rest_remaining = 0.0;
        next.bout_index += 1;
        next.last_drop_rate.reset();
      }
      return next;
  }
  return next;
}

std::optional<double> SessionLog::max_drop_rate() const {
  std::optional<double> best;
  for (const auto& e : events)
    if (e.kind == EventKind::window_evaluated && e.drop_rate)
      best = best ? std::max(*best, *e.drop_rate) : *e.drop_rate;
  return best;
}

SessionLog run_session(const SessionConfig& cfg, const PlantConfig& plant_cfg, std::uint64_t seed,
                       TimeSeries* emg_out) {
  cfg.validate();
  plant_cfg.validate();
  PlantConfig plant = plant_cfg;
  plant.seed = derive_seed(seed, plant_cfg.seed);

  SessionLog log;
  log.mode = cfg.mode;
  SessionState state;
  FatigueState fatigue;
  MpfTracker tracker(cfg.baseline);
  std::uint64_t call = 0;
  double t = 0.0;
  const double cap = cfg.timeout_factor * cfg.target_running;

  if (emg_out) {
    *emg_out = TimeSeries{{}, plant.sample_rate, "EMG_AFF", 0.0};
  }

  auto open_bout = [&](double at) {
    SessionEvent ev;
    ev.t = at;
    ev.kind = EventKind::bout_start;
    ev.bout = state.bout_index;
    log.events.push_back(ev);
    log.bouts.push_back(BoutSummary{state.bout_index, at, at, 0.0, 0, std::nullopt, false});
  };
  open_bout(0.0);

  while (state.phase != Phase::completed) {
    if (t >= cap - kTimeEps) {
      log.timed_out = true;
      SessionEvent ev;
      ev.t = t;
      ev.kind = EventKind::timeout;
      ev.bout = state.bout_index;
      log.events.push_back(ev);
      break;
    }

    if (state.phase == Phase::running) {
      const auto emg = gen_emg(fatigue, plant, cfg.window, call++);
      if (emg_out)
        emg_out->samples.insert(emg_out->samples.end(), emg.samples.begin(), emg.samples.end());
      SessionEvent ev;
      ev.kind = EventKind::window_evaluated;
      ev.bout = state.bout_index;
      ev.window_start = t;
      ev.fatigue_level = fatigue.level;
      const auto w = tracker.push(emg.samples, emg.sample_rate, t);
      fatigue = plant_step(fatigue, plant, true, cfg.window);
      t += cfg.window;
      ev.t = t;
      ev.mpf = w.mpf;
      ev.drop_rate = w.drop_rate;
      ev.baseline_window = w.is_baseline_window;
      log.events.push_back(ev);

      auto& bout = log.bouts.back();
      bout.windows += 1;
      bout.running += cfg.window;
      bout.end = t;
      if (w.drop_rate)
        bout.max_drop_rate = bout.max_drop_rate ? std::max(*bout.max_drop_rate, *w.drop_rate)
                                                : *w.drop_rate;

      state = step(state, cfg, w.drop_rate, cfg.window);
      if (state.phase == Phase::resting) {
        bout.ended_by_rest = true;
        log.rests += 1;
        SessionEvent rest;
        rest.t = t;
        rest.kind = EventKind::rest_start;
        rest.bout = state.bout_index;
        log.events.push_back(rest);
      }
    } else {
      const double dt = std::min(cfg.window, state.rest_remaining);
      fatigue = plant_step(fatigue, plant, false, dt);
      t += dt;
      state = step(state, cfg, std::nullopt, dt);
      if (state.phase == Phase::running) {
        SessionEvent end;
        end.t = t;
        end.kind = EventKind::rest_end;
        end.bout = state.bout_index - 1;
        log.events.push_back(end);
        tracker.start_bout();
        open_bout(t);
      }
    }
  }

  if (state.phase == Phase::completed) {
    SessionEvent done;
    done.t = t;
    done.kind = EventKind::completed;
    done.bout = state.bout_index;
    log.events.push_back(done);
  }
  log.accumulated_running = state.accumulated_running;
  log.wall_clock = t;
  return log;
}

std::string to_string(EventKind kind) {
  switch (kind) {
    case EventKind::bout_start: return "BoutStart";
    case EventKind::window_evaluated: return "WindowEvaluated";
    case EventKind::rest_start: return "RestStart";
    case EventKind::rest_end: return "RestEnd";
    case EventKind::completed: return "Completed";
    case EventKind::timeout: return "Timeout";
  }
  return "Unknown";
}

std::string to_string(TrainingMode mode) { return mode == TrainingMode::fat_c ? "fat-c" : "for-t"; }

TrainingMode parse_mode(const std::string& text) {
  std::string t = text;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  std::replace(t.begin(), t.end(), '_', '-');
  if (t == "fat-c") return TrainingMode::fat_c;
  if (t == "for-t") return TrainingMode::for_t;
  throw ConfigError("unknown training mode '" + text + "' (expected fat-c or for-t)");
}

}  // namespace neuroloop
