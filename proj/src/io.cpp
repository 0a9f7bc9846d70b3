#include "iwil/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <fstream>
#include <sstream>

#include "iwil/error.hpp"

namespace iwil {
namespace fs = std::filesystem;

namespace {

static_assert(std::endian::native == std::endian::little, "params files are written in native little-endian order");

std::string fmt(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return {buf.data(), res.ptr};
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

template <typename T>
T parse_cell(const std::string& text, const fs::path& path, int lineno) {
  T v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw IoError(path.string() + ":" + std::to_string(lineno) + ": bad value '" + text + "'");
  return v;
}

}  // namespace

void write_dataset_csv(const fs::path& path, const Dataset& data) {
  auto out = open_out(path);
  const std::size_t d = data.empty() ? 0 : data.front().state.size();
  out << "task_id,step";
  for (std::size_t j = 0; j < d; ++j) out << ",s_" << j;
  out << ",action,corrupted\n";
  for (const Sample& s : data) {
    expect_length("dataset row", d, s.state.size());
    out << s.task_id << ',' << s.step;
    for (double v : s.state) out << ',' << fmt(v);
    out << ',' << s.action << ',' << (s.corrupted ? 1 : 0) << '\n';
  }
  finish(out, path);
}

Dataset read_dataset_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw IoError("'" + path.string() + "' is empty");
  const auto header = split(line);
  if (header.size() < 4 || header[0] != "task_id" || header[1] != "step" || header[header.size() - 2] != "action" ||
      header.back() != "corrupted")
    throw IoError("'" + path.string() + "' does not have a dataset header");
  const std::size_t d = header.size() - 4;
  for (std::size_t j = 0; j < d; ++j)
    if (header[2 + j] != "s_" + std::to_string(j)) throw IoError("unexpected column '" + header[2 + j] + "'");
  Dataset data;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size())
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected " + std::to_string(header.size()) +
                    " columns");
    Sample s;
    s.task_id = parse_cell<int>(cells[0], path, lineno);
    s.step = parse_cell<int>(cells[1], path, lineno);
    s.state.resize(d);
    for (std::size_t j = 0; j < d; ++j) s.state[j] = parse_cell<double>(cells[2 + j], path, lineno);
    s.action = parse_cell<int>(cells[2 + d], path, lineno);
    s.corrupted = parse_cell<int>(cells[3 + d], path, lineno) != 0;
    data.push_back(std::move(s));
  }
  return data;
}

void write_metrics_csv(const fs::path& path, const std::string& method, const TrialMetrics& metrics) {
  auto out = open_out(path);
  out << "method,trial,timestep,overrides_cum,accuracy\n";
  long timestep = 0;
  int cumulative = 0;
  for (std::size_t t = 0; t < metrics.trials.size(); ++t) {
    const RolloutLog& log = metrics.trials[t];
    const std::string acc = fmt(log.accuracy());
    std::size_t next_override = 0;
    for (std::size_t step = 0; step < log.steps(); ++step, ++timestep) {
      while (next_override < log.overrides.size() &&
             static_cast<std::size_t>(log.overrides[next_override]) <= step) {
        ++cumulative;
        ++next_override;
      }
      out << method << ',' << (t + 1) << ',' << timestep << ',' << cumulative << ',' << acc << '\n';
    }
  }
  finish(out, path);
}

void write_weights_csv(const fs::path& path, const std::vector<WeightSnapshot>& trace, const Dataset& train_dataset) {
  auto out = open_out(path);
  out << "iter,sample_index,logit,weight,corrupted\n";
  for (const auto& snap : trace) {
    expect_length("weight snapshot", train_dataset.size(), snap.weights.size());
    for (std::size_t n = 0; n < snap.weights.size(); ++n)
      out << snap.iteration << ',' << n << ',' << fmt(snap.weights.logits[n]) << ',' << fmt(snap.weights.weights[n])
          << ',' << (train_dataset[n].corrupted ? 1 : 0) << '\n';
  }
  finish(out, path);
}

std::vector<WeightSnapshot> read_weights_csv(const fs::path& path, std::vector<bool>* corrupted) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line != "iter,sample_index,logit,weight,corrupted")
    throw IoError("'" + path.string() + "' does not have a weights header");
  std::vector<WeightSnapshot> trace;
  std::vector<bool> flags;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != 5) throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected 5 columns");
    const int iter = parse_cell<int>(cells[0], path, lineno);
    const auto index = parse_cell<std::size_t>(cells[1], path, lineno);
    if (trace.empty() || trace.back().iteration != iter) {
      trace.push_back({iter, {}});
      flags.clear();
    }
    auto& w = trace.back().weights;
    if (index != w.logits.size()) throw IoError(path.string() + ":" + std::to_string(lineno) + ": sample_index out of order");
    w.logits.push_back(parse_cell<double>(cells[2], path, lineno));
    w.weights.push_back(parse_cell<double>(cells[3], path, lineno));
    flags.push_back(parse_cell<int>(cells[4], path, lineno) != 0);
  }
  if (corrupted) *corrupted = std::move(flags);
  return trace;
}

void write_weight_colormap_csv(const fs::path& path, const WeightState& weights, const Dataset& train_dataset) {
  expect_length("weight state", train_dataset.size(), weights.size());
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<int, int>> keys;
  std::size_t width = 0;
  int trajectory = -1;
  int last_task = -1;
  for (std::size_t n = 0; n < train_dataset.size(); ++n) {
    const Sample& s = train_dataset[n];
    if (rows.empty() || s.step == 0 || s.task_id != last_task) {
      trajectory = s.task_id == last_task ? trajectory + 1 : 0;
      last_task = s.task_id;
      rows.emplace_back();
      keys.emplace_back(s.task_id, trajectory);
    }
    rows.back().push_back(weights.weights[n]);
    width = std::max(width, rows.back().size());
  }
  auto out = open_out(path);
  out << "task_id,trajectory";
  for (std::size_t j = 0; j < width; ++j) out << ",w_" << j;
  out << '\n';
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out << keys[r].first << ',' << keys[r].second;
    for (std::size_t j = 0; j < width; ++j) {
      out << ',';
      if (j < rows[r].size()) out << fmt(rows[r][j]);
    }
    out << '\n';
  }
  finish(out, path);
}

void write_params(const fs::path& path, const PolicyParams& params) {
  auto out = open_out(path);
  const std::array<std::int32_t, 3> header = {static_cast<std::int32_t>(params.actions()),
                                              static_cast<std::int32_t>(params.dim()), kParamsFormatVersion};
  out.write(reinterpret_cast<const char*>(header.data()), sizeof(header));
  const auto flat = params.flat();
  out.write(reinterpret_cast<const char*>(flat.data()), static_cast<std::streamsize>(flat.size() * sizeof(double)));
  finish(out, path);
}

PolicyParams read_params(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::array<std::int32_t, 3> header{};
  if (!in.read(reinterpret_cast<char*>(header.data()), sizeof(header)))
    throw IoError("'" + path.string() + "' is too short for a params header");
  if (header[2] != kParamsFormatVersion)
    throw IoError("'" + path.string() + "' has unsupported version " + std::to_string(header[2]));
  if (header[0] <= 0 || header[1] <= 0) throw IoError("'" + path.string() + "' has a nonpositive shape");
  const auto a = static_cast<std::size_t>(header[0]);
  const auto d = static_cast<std::size_t>(header[1]);
  std::vector<double> flat(flat_size(a, d));
  if (!in.read(reinterpret_cast<char*>(flat.data()), static_cast<std::streamsize>(flat.size() * sizeof(double))))
    throw IoError("'" + path.string() + "' is truncated");
  if (in.peek() != std::char_traits<char>::eof()) throw IoError("'" + path.string() + "' has trailing bytes");
  return PolicyParams(a, d, std::move(flat));
}

void ensure_writable_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir.string() + "'");
  const fs::path probe = dir / ".iwil_write_probe";
  {
    std::ofstream out(probe);
    if (!out) throw IoError("output directory '" + dir.string() + "' is not writable");
  }
  fs::remove(probe, ec);
}

}  // namespace iwil
