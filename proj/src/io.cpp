#include "neuroloop/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "neuroloop/error.hpp"

namespace neuroloop::io {
namespace {

constexpr std::string_view kSignalMagic = "# neuroloop-signal";
constexpr std::string_view kTableMagic = "# neuroloop-table";
constexpr std::string_view kStatsMagic = "# neuroloop-stats";
constexpr std::string_view kDcmcMagic = "# neuroloop-dcmc";
constexpr std::string_view kTableHeader = "subject,day,group,metric,value,qualifiers";
constexpr std::string_view kStatsHeader = "test,effect,statistic,df1,df2,p_value,effect_size,note";

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(std::string_view text, const std::string& context) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    // from_chars rejects "inf"/"nan" spellings in some forms; treat as data error
    throw DataError(context + ": cannot parse number '" + t + "'");
  }
  return v;
}

long parse_long(std::string_view text, const std::string& context) {
  const std::string t = trim(text);
  long v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw FormatError(context + ": cannot parse integer '" + t + "'");
  return v;
}

void check_field(const std::string& s, const char* what) {
  if (s.find_first_of(",\n\r") != std::string::npos)
    throw FormatError(std::string(what) + " must not contain commas or newlines: '" + s + "'");
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Splits into lines without the terminating newline.
std::vector<std::string> lines_of(const std::string& content) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < content.size()) {
    auto pos = content.find('\n', start);
    if (pos == std::string::npos) pos = content.size();
    std::string line = content.substr(start, pos - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    start = pos + 1;
  }
  return lines;
}

int parse_version_line(const std::string& line, std::string_view magic, const std::string& path) {
  if (line.rfind(magic, 0) != 0) throw FormatError("'" + path + "' is not a " + std::string(magic.substr(2)) + " file");
  const auto rest = trim(std::string_view(line).substr(magic.size()));
  if (rest.size() < 2 || rest[0] != 'v') throw FormatError("'" + path + "' has no format version");
  return static_cast<int>(parse_long(rest.substr(1), path));
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void atomic_write(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw DataError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw DataError("cannot move '" + tmp.string() + "' into place: " + ec.message());
}

std::string to_string(RecordingState s) {
  switch (s) {
    case RecordingState::awake: return "awake";
    case RecordingState::training: return "training";
    case RecordingState::resting: return "resting";
  }
  return "training";
}

RecordingState parse_state(std::string_view text) {
  if (text == "awake") return RecordingState::awake;
  if (text == "training") return RecordingState::training;
  if (text == "resting") return RecordingState::resting;
  throw FormatError("unknown recording state '" + std::string(text) + "'");
}

const TimeSeries& Recording::channel(std::string_view label) const {
  for (const auto& ch : channels)
    if (ch.channel == label) return ch;
  throw DataError("recording has no channel '" + std::string(label) + "'");
}

void Recording::validate() const {
  if (channels.empty()) throw IntegrityError("recording has no channels");
  const auto& first = channels.front();
  for (const auto& ch : channels) {
    ch.validate();
    check_field(ch.channel, "channel label");
    if (ch.sample_rate != first.sample_rate || ch.samples.size() != first.samples.size() || ch.t0 != first.t0)
      throw IntegrityError("channels differ in rate, length or t0");
  }
  const double end = first.t0 + first.duration();
  for (const auto& a : annotations)
    if (!(a.start >= first.t0 && a.end <= end && a.start <= a.end))
      throw IntegrityError("annotation outside the recording span");
  check_field(subject, "subject");
}

void write_recording(const std::filesystem::path& path, const Recording& rec, SampleEncoding encoding) {
  rec.validate();
  const auto& first = rec.channels.front();
  std::string out;
  out += std::string(kSignalMagic) + "\n";
  out += "version: " + std::to_string(kSignalFormatVersion) + "\n";
  out += std::string("encoding: ") + (encoding == SampleEncoding::text ? "text" : "binary-f32le") + "\n";
  out += "sample_rate: " + format_double(first.sample_rate) + "\n";
  out += "channels: ";
  for (std::size_t c = 0; c < rec.channels.size(); ++c)
    out += (c ? "," : "") + rec.channels[c].channel;
  out += "\n";
  out += "t0: " + format_double(first.t0) + "\n";
  out += "subject: " + rec.subject + "\n";
  out += "day: " + std::to_string(rec.day) + "\n";
  out += "state: " + to_string(rec.state) + "\n";
  out += "rows: " + std::to_string(first.samples.size()) + "\n";
  for (const auto& a : rec.annotations)
    out += "reject: " + format_double(a.start) + " " + format_double(a.end) + "\n";
  out += "data:\n";

  const std::size_t n = first.samples.size();
  if (encoding == SampleEncoding::text) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < rec.channels.size(); ++c) {
        if (c) out += ',';
        out += format_double(rec.channels[c].samples[i]);
      }
      out += '\n';
    }
  } else {
    out.reserve(out.size() + n * rec.channels.size() * 4);
    for (std::size_t i = 0; i < n; ++i)
      for (const auto& ch : rec.channels) {
        auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(ch.samples[i]));
        if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
        char bytes[4];
        std::memcpy(bytes, &bits, 4);
        out.append(bytes, 4);
      }
  }
  atomic_write(path, out);
}

Recording read_recording(const std::filesystem::path& path) {
  const std::string content = read_file(path);
  const std::string name = path.string();

  // header
  std::map<std::string, std::string> header;
  std::vector<Span> rejects;
  std::size_t pos = 0;
  bool saw_magic = false, saw_data = false;
  while (pos < content.size()) {
    auto nl = content.find('\n', pos);
    if (nl == std::string::npos) nl = content.size();
    std::string line = content.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    pos = nl + 1;
    if (!saw_magic) {
      if (line != kSignalMagic) throw FormatError("'" + name + "' is missing the neuroloop-signal magic line");
      saw_magic = true;
      continue;
    }
    if (line == "data:") {
      saw_data = true;
      break;
    }
    const auto colon = line.find(':');
    if (colon == std::string::npos) throw FormatError("malformed header line '" + line + "'");
    const std::string key = trim(std::string_view(line).substr(0, colon));
    const std::string value = trim(std::string_view(line).substr(colon + 1));
    if (key == "reject") {
      const auto parts = split(value, ' ');
      if (parts.size() != 2) throw FormatError("reject annotation needs start and end");
      rejects.push_back({parse_double(parts[0], name), parse_double(parts[1], name)});
    } else {
      header[key] = value;
    }
  }
  if (!saw_magic || !saw_data) throw FormatError("'" + name + "' has no data section");
  for (const char* key : {"version", "encoding", "sample_rate", "channels", "rows"})
    if (!header.count(key)) throw FormatError(std::string("header is missing '") + key + "'");

  if (parse_long(header["version"], name) != kSignalFormatVersion)
    throw FormatError("unsupported signal format version " + header["version"]);
  const double rate = parse_double(header["sample_rate"], name);
  if (!(rate > 0.0) || !std::isfinite(rate)) throw FormatError("header sample_rate must be positive");
  const auto labels = split(header["channels"], ',');
  if (labels.empty() || labels.front().empty()) throw FormatError("header declares no channels");
  const long rows = parse_long(header["rows"], name);
  if (rows < 1) throw FormatError("header rows must be positive");

  Recording rec;
  rec.subject = header.count("subject") ? header["subject"] : "S0";
  rec.day = header.count("day") ? static_cast<int>(parse_long(header["day"], name)) : 0;
  rec.state = header.count("state") ? parse_state(header["state"]) : RecordingState::training;
  rec.annotations = rejects;
  const double t0 = header.count("t0") ? parse_double(header["t0"], name) : 0.0;
  const std::size_t nch = labels.size();
  const auto nrows = static_cast<std::size_t>(rows);
  for (const auto& l : labels) rec.channels.push_back(TimeSeries{{}, rate, trim(l), t0});
  for (auto& ch : rec.channels) ch.samples.reserve(nrows);

  if (header["encoding"] == "text") {
    std::size_t row = 0;
    while (pos < content.size() && row < nrows) {
      auto nl = content.find('\n', pos);
      const bool terminated = nl != std::string::npos;
      if (!terminated) nl = content.size();
      std::string_view line(content.data() + pos, nl - pos);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      pos = nl + 1;
      const auto cells = split(line, ',');
      if (cells.size() != nch || !terminated)
        throw IntegrityError("row " + std::to_string(row + 1) + " is truncated (expected " +
                             std::to_string(nch) + " columns)");
      for (std::size_t c = 0; c < nch; ++c) {
        const double v = parse_double(cells[c], "row " + std::to_string(row + 1));
        if (!std::isfinite(v)) throw DataError("non-finite value at row " + std::to_string(row + 1));
        rec.channels[c].samples.push_back(v);
      }
      ++row;
    }
    if (row != nrows)
      throw IntegrityError("row " + std::to_string(row + 1) + " missing: expected " +
                           std::to_string(nrows) + " rows");
    if (pos < content.size() && trim(std::string_view(content).substr(pos)).size() > 0)
      throw IntegrityError("trailing data after the declared rows");
  } else if (header["encoding"] == "binary-f32le") {
    const std::size_t need = nrows * nch * 4;
    const std::size_t have = content.size() - pos;
    if (have < need) {
      const std::size_t complete = have / (nch * 4);
      throw IntegrityError("row " + std::to_string(complete + 1) + " is truncated in binary data");
    }
    for (std::size_t i = 0; i < nrows; ++i)
      for (std::size_t c = 0; c < nch; ++c) {
        std::uint32_t bits;
        std::memcpy(&bits, content.data() + pos + (i * nch + c) * 4, 4);
        if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
        const double v = std::bit_cast<float>(bits);
        if (!std::isfinite(v)) throw DataError("non-finite value at row " + std::to_string(i + 1));
        rec.channels[c].samples.push_back(v);
      }
  } else {
    throw FormatError("unknown sample encoding '" + header["encoding"] + "'");
  }
  rec.validate();
  return rec;
}

const std::vector<std::string>& metric_registry() {
  static const std::vector<std::string> registry{
      // peripheral fatigue
      "mpf", "mpf_drop_rate", "mpf_baseline",
      // session summaries
      "session_rests", "session_wall_clock", "session_running", "session_max_drop_rate",
      // central fatigue
      "lzc_raw", "lzc_norm", "lzc_drop_rate", "trp_tyr", "trp_bcaa", "tyr_bcaa", "change_rate",
      // hemispheric balance
      "psd_slope", "psd_slope_r2", "psd_slope_si",
      // corticomuscular coupling
      "dcmc_threshold", "dcmc_early", "dcmc_late", "dcmc_block",
      // behaviour
      "mnss",
  };
  return registry;
}

bool is_registered_metric(std::string_view metric) {
  const auto& r = metric_registry();
  return std::find(r.begin(), r.end(), metric) != r.end();
}

void write_table(const std::filesystem::path& path, const ResultTable& rows, bool append) {
  ResultTable all;
  if (append && std::filesystem::exists(path)) all = read_table(path);
  for (const auto& r : rows) {
    if (!is_registered_metric(r.metric)) throw RegistryError("unknown metric '" + r.metric + "'");
    if (!std::isfinite(r.value)) throw DataError("non-finite value for metric '" + r.metric + "'");
    check_field(r.subject, "subject");
    check_field(r.group, "group");
    check_field(r.qualifiers, "qualifiers");
  }
  all.insert(all.end(), rows.begin(), rows.end());

  std::string out = std::string(kTableMagic) + " v" + std::to_string(kTableFormatVersion) + "\n";
  out += std::string(kTableHeader) + "\n";
  for (const auto& r : all) {
    out += r.subject + ',' + std::to_string(r.day) + ',' + r.group + ',' + r.metric + ',' +
           format_double(r.value) + ',' + r.qualifiers + '\n';
  }
  atomic_write(path, out);
}

ResultTable read_table(const std::filesystem::path& path) {
  const auto lines = lines_of(read_file(path));
  const std::string name = path.string();
  if (lines.size() < 2) throw FormatError("'" + name + "' is not a result table");
  if (parse_version_line(lines[0], kTableMagic, name) != kTableFormatVersion)
    throw FormatError("unsupported table version in '" + name + "'");
  if (lines[1] != kTableHeader) throw FormatError("unexpected table header in '" + name + "'");
  ResultTable rows;
  for (std::size_t i = 2; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto cells = split(lines[i], ',');
    if (cells.size() != 6) throw IntegrityError("table row " + std::to_string(i - 1) + " has wrong column count");
    Row r;
    r.subject = cells[0];
    r.day = static_cast<int>(parse_long(cells[1], name));
    r.group = cells[2];
    r.metric = cells[3];
    if (!is_registered_metric(r.metric)) throw RegistryError("unknown metric '" + r.metric + "'");
    r.value = parse_double(cells[4], name);
    r.qualifiers = cells[5];
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_stat_results(const std::filesystem::path& path, const std::vector<stats::StatResult>& rows) {
  std::string out = std::string(kStatsMagic) + " v" + std::to_string(kTableFormatVersion) + "\n";
  out += std::string(kStatsHeader) + "\n";
  for (const auto& r : rows) {
    check_field(r.test, "test");
    check_field(r.effect, "effect");
    std::string note = r.note;
    std::replace(note.begin(), note.end(), ',', ';');
    out += r.test + ',' + r.effect + ',' + format_double(r.statistic) + ',' + format_double(r.df1) + ',' +
           format_double(r.df2) + ',' + format_double(r.p_value) + ',' +
           (r.effect_size ? format_double(*r.effect_size) : std::string()) + ',' + note + '\n';
  }
  atomic_write(path, out);
}

std::vector<stats::StatResult> read_stat_results(const std::filesystem::path& path) {
  const auto lines = lines_of(read_file(path));
  const std::string name = path.string();
  if (lines.size() < 2) throw FormatError("'" + name + "' is not a stats table");
  if (parse_version_line(lines[0], kStatsMagic, name) != kTableFormatVersion)
    throw FormatError("unsupported stats table version");
  if (lines[1] != kStatsHeader) throw FormatError("unexpected stats header in '" + name + "'");
  std::vector<stats::StatResult> out;
  for (std::size_t i = 2; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto c = split(lines[i], ',');
    if (c.size() != 8) throw IntegrityError("stats row " + std::to_string(i - 1) + " has wrong column count");
    stats::StatResult r;
    r.test = c[0];
    r.effect = c[1];
    r.statistic = parse_double(c[2], name);
    r.df1 = parse_double(c[3], name);
    r.df2 = parse_double(c[4], name);
    r.p_value = parse_double(c[5], name);
    if (!c[6].empty()) r.effect_size = parse_double(c[6], name);
    r.note = c[7];
    out.push_back(std::move(r));
  }
  return out;
}

void write_dcmc_spectra(const std::filesystem::path& path, const std::vector<dcmc::DcmcResult>& blocks) {
  std::string out = std::string(kDcmcMagic) + " v" + std::to_string(kTableFormatVersion) + "\n";
  out += "block_start,freq,dc_desc,dc_asc,masked_desc,masked_asc,norm_desc,norm_asc,threshold\n";
  for (const auto& b : blocks) {
    const bool masked = b.masked_desc.size() == b.freqs.size();
    for (std::size_t i = 0; i < b.freqs.size(); ++i) {
      out += format_double(b.start_time) + ',' + format_double(b.freqs[i]) + ',' + format_double(b.dc_desc[i]) +
             ',' + format_double(b.dc_asc[i]);
      if (masked) {
        out += ',' + format_double(b.masked_desc[i]) + ',' + format_double(b.masked_asc[i]) + ',' +
               format_double(b.norm_desc[i]) + ',' + format_double(b.norm_asc[i]) + ',' +
               format_double(b.sig_threshold.value_or(0.0));
      } else {
        out += ",,,,,";
      }
      out += '\n';
    }
  }
  atomic_write(path, out);
}

std::string session_log_jsonl(const SessionLog& log, const SessionConfig& cfg) {
  using nlohmann::json;
  auto num = [](std::optional<double> v) { return v ? json(*v) : json(nullptr); };
  std::string out;
  json header = {
      {"kind", "header"},
      {"format", "neuroloop-session"},
      {"version", kSessionLogVersion},
      {"mode", to_string(cfg.mode)},
      {"speed", cfg.speed},
      {"target_running", cfg.target_running},
      {"rest_duration", cfg.rest_duration},
      {"threshold", cfg.threshold},
      {"window", cfg.window},
      {"baseline_rule", cfg.baseline.rule == BaselineRule::per_bout ? "per-bout" : "first-bout"},
      {"baseline_windows", cfg.baseline.windows},
  };
  out += header.dump() + "\n";
  for (const auto& e : log.events) {
    json j = {{"kind", "event"}, {"event", to_string(e.kind)}, {"t", e.t}, {"bout", e.bout}};
    if (e.kind == EventKind::window_evaluated) {
      j["window_start"] = e.window_start;
      j["mpf"] = num(e.mpf);
      j["drop_rate"] = num(e.drop_rate);
      j["baseline_window"] = e.baseline_window;
      j["fatigue_level"] = e.fatigue_level;
    }
    out += j.dump() + "\n";
  }
  for (const auto& b : log.bouts) {
    json j = {{"kind", "bout_summary"}, {"bout", b.bout},       {"start", b.start},
              {"end", b.end},           {"running", b.running}, {"windows", b.windows},
              {"max_drop_rate", num(b.max_drop_rate)},          {"ended_by_rest", b.ended_by_rest}};
    out += j.dump() + "\n";
  }
  json summary = {{"kind", "session_summary"},
                  {"accumulated_running", log.accumulated_running},
                  {"wall_clock", log.wall_clock},
                  {"rests", log.rests},
                  {"timed_out", log.timed_out},
                  {"max_drop_rate", num(log.max_drop_rate())}};
  out += summary.dump() + "\n";
  return out;
}

void write_session_log(const std::filesystem::path& path, const SessionLog& log, const SessionConfig& cfg) {
  atomic_write(path, session_log_jsonl(log, cfg));
}

}  // namespace neuroloop::io
