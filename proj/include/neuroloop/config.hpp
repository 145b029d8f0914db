#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "neuroloop/controller.hpp"
#include "neuroloop/dcmc.hpp"
#include "neuroloop/signal.hpp"
#include "neuroloop/synth.hpp"

namespace neuroloop::config {

inline constexpr int kConfigVersion = 1;

/// INI-style configuration: "[section]" headers and "key = value" lines.
/// A "[format] version = 1" entry is required when reading from disk.
class Config {
public:
  static Config load(const std::filesystem::path& path);
  static Config parse(const std::string& text);

  std::string dump() const;
  void save(const std::filesystem::path& path) const;

  bool has(const std::string& section, const std::string& key) const;
  std::optional<std::string> get(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  long get_int(const std::string& section, const std::string& key, long fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;

  void set(const std::string& section, const std::string& key, const std::string& value);
  void set(const std::string& section, const std::string& key, double value);

private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

PlantConfig plant_config(const Config& c, PlantConfig base = {});
void put(Config& c, const PlantConfig& plant);

/// Coefficients as "a<k> = a11 a12 a21 a22" rows in [mvar].
MvarSpec mvar_spec(const Config& c, MvarSpec base = {});
void put(Config& c, const MvarSpec& spec);

SessionConfig session_config(const Config& c, SessionConfig base = {});
void put(Config& c, const SessionConfig& session);

PreprocessConfig preprocess_config(const Config& c, PreprocessConfig base = {});
dcmc::SessionConfig dcmc_config(const Config& c, dcmc::SessionConfig base = {});

}  // namespace neuroloop::config
