#include "iwil/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "iwil/error.hpp"

namespace iwil {

RunConfig RunConfig::paper() {
  RunConfig c;
  c.preset = Preset::kPaper;
  c.train.tau = 3000;
  c.train.tau_hat = 4000;
  c.train.n_train_tasks = 6;
  c.train.trajectories_per_task = 4;
  c.env.episode_len = 1000;
  return c;
}

RunConfig RunConfig::desk() {
  RunConfig c = paper();
  c.preset = Preset::kDesk;
  c.train.tau /= 10;
  c.train.tau_hat /= 10;
  c.env.episode_len /= 10;
  return c;
}

RunConfig RunConfig::for_preset(Preset p) { return p == Preset::kPaper ? paper() : desk(); }

void RunConfig::validate() const {
  train.validate();
  env.validate();
  if (train.K < 1) throw ConfigError("K must be at least 1");
  if (actions != kNumActions) throw ConfigError("A must be 5 (the corridor world has five steering actions)");
  if (out_dir.empty()) throw ConfigError("out_dir must not be empty");
}

Preset parse_preset(const std::string& name) {
  if (name == "desk") return Preset::kDesk;
  if (name == "paper") return Preset::kPaper;
  throw ConfigError("preset: expected desk or paper, got '" + name + "'");
}

std::string preset_name(Preset p) { return p == Preset::kPaper ? "paper" : "desk"; }

namespace {

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) throw ConfigError(key + ": cannot parse '" + text + "'");
  return value;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

template <typename T, typename Member>
Setter number(Member member) {
  return [member](RunConfig& c, const std::string& key, const std::string& text) {
    std::invoke(member, c) = parse_number<T>(key, text);
  };
}

struct Entry {
  std::string key;
  Setter set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename T>
std::string show(T v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = {
      {"preset", [](RunConfig& c, const std::string&, const std::string& v) { c.preset = parse_preset(v); },
       [](const RunConfig& c) { return preset_name(c.preset); }},
      {"seed", number<std::uint64_t>([](RunConfig& c) -> std::uint64_t& { return c.train.seed; }),
       [](const RunConfig& c) { return show(c.train.seed); }},
      {"out_dir", [](RunConfig& c, const std::string&, const std::string& v) { c.out_dir = v; },
       [](const RunConfig& c) { return c.out_dir; }},
      {"alpha", number<double>([](RunConfig& c) -> double& { return c.train.alpha; }),
       [](const RunConfig& c) { return show(c.train.alpha); }},
      {"beta", number<double>([](RunConfig& c) -> double& { return c.train.beta; }),
       [](const RunConfig& c) { return show(c.train.beta); }},
      {"gamma", number<double>([](RunConfig& c) -> double& { return c.train.gamma; }),
       [](const RunConfig& c) { return show(c.train.gamma); }},
      {"K", number<int>([](RunConfig& c) -> int& { return c.train.K; }),
       [](const RunConfig& c) { return show(c.train.K); }},
      {"tau", number<int>([](RunConfig& c) -> int& { return c.train.tau; }),
       [](const RunConfig& c) { return show(c.train.tau); }},
      {"tau_hat", number<int>([](RunConfig& c) -> int& { return c.train.tau_hat; }),
       [](const RunConfig& c) { return show(c.train.tau_hat); }},
      {"n_train_tasks", number<int>([](RunConfig& c) -> int& { return c.train.n_train_tasks; }),
       [](const RunConfig& c) { return show(c.train.n_train_tasks); }},
      {"trajectories_per_task", number<int>([](RunConfig& c) -> int& { return c.train.trajectories_per_task; }),
       [](const RunConfig& c) { return show(c.train.trajectories_per_task); }},
      {"test_trials", number<int>([](RunConfig& c) -> int& { return c.train.test_trials; }),
       [](const RunConfig& c) { return show(c.train.test_trials); }},
      {"eval_trials", number<int>([](RunConfig& c) -> int& { return c.train.eval_trials; }),
       [](const RunConfig& c) { return show(c.train.eval_trials); }},
      {"corrupt_frac", number<double>([](RunConfig& c) -> double& { return c.train.corrupt_frac; }),
       [](const RunConfig& c) { return show(c.train.corrupt_frac); }},
      {"d", number<std::size_t>([](RunConfig& c) -> std::size_t& { return c.env.dim; }),
       [](const RunConfig& c) { return show(c.env.dim); }},
      {"A", number<std::size_t>([](RunConfig& c) -> std::size_t& { return c.actions; }),
       [](const RunConfig& c) { return show(c.actions); }},
      {"episode_len", number<std::size_t>([](RunConfig& c) -> std::size_t& { return c.env.episode_len; }),
       [](const RunConfig& c) { return show(c.env.episode_len); }},
      {"override_threshold", number<double>([](RunConfig& c) -> double& { return c.env.override_threshold; }),
       [](const RunConfig& c) { return show(c.env.override_threshold); }},
      {"theme_shift", number<double>([](RunConfig& c) -> double& { return c.env.theme_shift; }),
       [](const RunConfig& c) { return show(c.env.theme_shift); }},
      {"theme_noise", number<double>([](RunConfig& c) -> double& { return c.env.theme_noise; }),
       [](const RunConfig& c) { return show(c.env.theme_noise); }},
  };
  return table;
}

const Entry* find_entry(const std::string& key) {
  for (const auto& e : entries())
    if (e.key == key) return &e;
  return nullptr;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& e : entries()) k.push_back(e.key);
    return k;
  }();
  return keys;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(t.substr(0, eq));
    if (!find_entry(key)) throw ConfigError("unknown config key '" + key + "'");
    out[key] = trim(t.substr(eq + 1));
  }
  return out;
}

void apply_setting(RunConfig& config, const std::string& key, const std::string& value) {
  const Entry* e = find_entry(key);
  if (!e) throw ConfigError("unknown config key '" + key + "'");
  e->set(config, key, value);
}

RunConfig resolve_config(const std::map<std::string, std::string>& file,
                         const std::map<std::string, std::string>& flags) {
  Preset preset = Preset::kDesk;
  if (auto it = flags.find("preset"); it != flags.end())
    preset = parse_preset(it->second);
  else if (auto jt = file.find("preset"); jt != file.end())
    preset = parse_preset(jt->second);
  RunConfig config = RunConfig::for_preset(preset);
  for (const auto& [k, v] : file) apply_setting(config, k, v);
  for (const auto& [k, v] : flags) apply_setting(config, k, v);
  config.preset = preset;
  config.validate();
  return config;
}

std::string describe(const RunConfig& config) {
  std::string out;
  for (const auto& e : entries()) out += e.key + "=" + e.get(config) + "\n";
  return out;
}

}  // namespace iwil
