#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "neuroloop/controller.hpp"
#include "neuroloop/dcmc.hpp"
#include "neuroloop/signal.hpp"
#include "neuroloop/stats.hpp"

namespace neuroloop::io {

inline constexpr int kSignalFormatVersion = 1;
inline constexpr int kTableFormatVersion = 1;
inline constexpr int kSessionLogVersion = 1;

enum class RecordingState { awake, training, resting };

std::string to_string(RecordingState s);
RecordingState parse_state(std::string_view text);

/// Multi-channel recording. All channels share rate, length and t0.
struct Recording {
  std::vector<TimeSeries> channels;
  std::string subject = "S0";
  int day = 0;
  RecordingState state = RecordingState::training;
  std::vector<Span> annotations;  // rejected spans, seconds from session start

  const TimeSeries& channel(std::string_view label) const;
  void validate() const;
};

enum class SampleEncoding { text, binary };

/// Header of "key: value" lines, a "data:" line, then either comma-separated
/// rows (text) or little-endian float32 rows (binary).
void write_recording(const std::filesystem::path& path, const Recording& rec,
                     SampleEncoding encoding = SampleEncoding::text);
Recording read_recording(const std::filesystem::path& path);

/// Long-format result row.
struct Row {
  std::string subject;
  int day = 0;
  std::string group;
  std::string metric;
  double value = 0.0;
  std::string qualifiers;  // "key=value;key=value"
};

using ResultTable = std::vector<Row>;

const std::vector<std::string>& metric_registry();
bool is_registered_metric(std::string_view metric);

/// Writes atomically (temp file + rename). With append, existing rows are kept
/// in front of the new ones.
void write_table(const std::filesystem::path& path, const ResultTable& rows, bool append = false);
ResultTable read_table(const std::filesystem::path& path);

void write_stat_results(const std::filesystem::path& path, const std::vector<stats::StatResult>& rows);
std::vector<stats::StatResult> read_stat_results(const std::filesystem::path& path);

void write_dcmc_spectra(const std::filesystem::path& path, const std::vector<dcmc::DcmcResult>& blocks);

/// JSON-lines: a header object followed by one object per event.
std::string session_log_jsonl(const SessionLog& log, const SessionConfig& cfg);
void write_session_log(const std::filesystem::path& path, const SessionLog& log, const SessionConfig& cfg);

/// Writes `content` next to `path` and renames it into place.
void atomic_write(const std::filesystem::path& path, std::string_view content);

/// Shortest text that parses back to the same double.
std::string format_double(double v);

}  // namespace neuroloop::io
