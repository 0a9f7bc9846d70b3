#pragma once

#include <map>
#include <string>
#include <vector>

#include "iwil/dagger.hpp"
#include "iwil/envs.hpp"

namespace iwil {

enum class Preset { kDesk, kPaper };

/// Everything a CLI run needs.
struct RunConfig {
  TrainConfig train;
  EnvConfig env;
  std::size_t actions = kNumActions;
  std::string out_dir = "out";
  Preset preset = Preset::kDesk;

  /// Desk preset: tau, tau_hat and episode_len are the paper preset's values / 10.
  static RunConfig desk();
  static RunConfig paper();
  static RunConfig for_preset(Preset p);

  /// User-facing checks (stricter than TrainConfig::validate: K >= 1, A = 5).
  void validate() const;
};

Preset parse_preset(const std::string& name);
std::string preset_name(Preset p);

/// Keys accepted in config files and as --<key> flags, in documentation order.
const std::vector<std::string>& config_keys();

/// Parses `key=value` lines. Blank lines and lines starting with '#' are
/// skipped. Throws ConfigError when the file cannot be read, on a
/// malformed line or unknown key.
std::map<std::string, std::string> read_config_file(const std::string& path);

/// Applies one key. Throws ConfigError naming the key on unknown keys or
/// unparsable values.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

/// Preset defaults, then file entries, then flag entries (flags win). The
/// preset itself is taken from the flags, else the file, else desk.
RunConfig resolve_config(const std::map<std::string, std::string>& file,
                         const std::map<std::string, std::string>& flags);

/// key=value dump of the full configuration, in config_keys() order.
std::string describe(const RunConfig& config);

}  // namespace iwil
