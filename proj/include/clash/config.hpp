#pragma once

// Flat "key = value" run configuration. The same keys are used by the
// config file, --set overrides and the metadata sidecar, so a sidecar entry
// can be written back out as a config file to repeat a run.

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <stdexcept>
#include <string>

#include "clash/engine.hpp"

namespace clash {

using Settings = std::map<std::string, std::string>;

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline Settings parse_settings(std::istream& in) {
  Settings out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

inline Settings load_settings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return parse_settings(in);
}

namespace detail {

template <class T>
T parse_number(const std::string& key, const std::string& v) {
  T out{};
  const char* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end)
    throw ConfigError("setting '" + key + "': cannot parse '" + v + "'");
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError("setting '" + key + "': expected a boolean, got '" + v + "'");
}

inline std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

// Keys understood by run_config_from(); anything else is rejected.
inline const char* const kRunKeys[] = {
    "scheme", "page_size", "pages_per_block", "logical_blocks",
    "overprovision_blocks", "t_read_us", "t_write_us", "t_erase_us",
    "p_capacity", "b_capacity", "b_policy", "gc_threshold", "cmt_capacity",
    "entries_per_tp", "fast_rw_logs", "seq_rate", "locality_rate",
    "mean_req_size", "size_mode", "request_count", "write_rate",
    "mean_interarrival_ms", "address_space", "seed", "final_flush", "trace"};

inline bool is_run_key(const std::string& k) {
  for (const char* r : kRunKeys)
    if (k == r) return true;
  return false;
}

// Builds a run configuration from settings layered over the defaults.
// "scheme" must name a single scheme here.
inline RunConfig run_config_from(const Settings& s) {
  using detail::parse_number;
  RunConfig c;
  auto get = [&](const char* k) -> const std::string* {
    auto it = s.find(k);
    return it == s.end() ? nullptr : &it->second;
  };
  for (const auto& [k, v] : s)
    if (!is_run_key(k)) throw ConfigError("unknown setting '" + k + "'");

  if (auto v = get("scheme")) c.scheme = parse_scheme(*v);
  if (auto v = get("page_size"))
    c.geometry.page_size_bytes = parse_number<std::uint32_t>("page_size", *v);
  if (auto v = get("pages_per_block"))
    c.geometry.pages_per_block = parse_number<std::uint32_t>("pages_per_block", *v);
  if (auto v = get("logical_blocks"))
    c.geometry.block_count = parse_number<std::uint32_t>("logical_blocks", *v);
  c.overprovision_blocks = default_overprovision(c.geometry.block_count);
  if (auto v = get("overprovision_blocks"))
    c.overprovision_blocks = parse_number<std::uint32_t>("overprovision_blocks", *v);
  if (auto v = get("t_read_us")) c.latency.read_us = parse_number<double>("t_read_us", *v);
  if (auto v = get("t_write_us")) c.latency.write_us = parse_number<double>("t_write_us", *v);
  if (auto v = get("t_erase_us")) c.latency.erase_us = parse_number<double>("t_erase_us", *v);
  if (auto v = get("p_capacity"))
    c.cache.p_capacity_pages = parse_number<std::uint32_t>("p_capacity", *v);
  if (auto v = get("b_capacity"))
    c.cache.b_capacity_blocks = parse_number<std::uint32_t>("b_capacity", *v);
  if (auto v = get("b_policy")) c.cache.b_policy = parse_bpolicy(*v);
  if (auto v = get("gc_threshold")) {
    c.pagemap.gc_threshold = parse_number<std::uint32_t>("gc_threshold", *v);
    c.dftl.gc_threshold = c.pagemap.gc_threshold;
  }
  if (auto v = get("cmt_capacity"))
    c.dftl.cmt_capacity = parse_number<std::uint64_t>("cmt_capacity", *v);
  if (auto v = get("entries_per_tp"))
    c.dftl.entries_per_tp = parse_number<std::uint32_t>("entries_per_tp", *v);
  if (auto v = get("fast_rw_logs"))
    c.fast.rw_log_blocks = parse_number<std::uint32_t>("fast_rw_logs", *v);

  WorkloadParams& w = c.workload;
  w.address_space = c.logical_pages();
  if (auto v = get("seq_rate")) w.seq_rate = parse_number<double>("seq_rate", *v);
  if (auto v = get("locality_rate"))
    w.locality_rate = parse_number<double>("locality_rate", *v);
  if (auto v = get("mean_req_size"))
    w.mean_req_size = parse_number<std::uint32_t>("mean_req_size", *v);
  if (auto v = get("size_mode")) {
    if (*v == "constant") w.size_mode = SizeMode::Constant;
    else if (*v == "exponential") w.size_mode = SizeMode::Exponential;
    else throw ConfigError("size_mode must be constant or exponential");
  }
  if (auto v = get("request_count"))
    w.request_count = parse_number<std::uint64_t>("request_count", *v);
  if (auto v = get("write_rate")) w.write_rate = parse_number<double>("write_rate", *v);
  if (auto v = get("mean_interarrival_ms"))
    w.mean_interarrival_ms = parse_number<double>("mean_interarrival_ms", *v);
  if (auto v = get("address_space"))
    w.address_space = parse_number<std::uint64_t>("address_space", *v);
  if (auto v = get("seed")) w.seed = parse_number<std::uint64_t>("seed", *v);
  if (auto v = get("final_flush")) c.final_flush = detail::parse_bool("final_flush", *v);
  if (auto v = get("trace"); v && !v->empty()) c.trace_path = *v;
  c.validate();
  return c;
}

// Fully resolved settings; run_config_from(to_settings(c)) reproduces c.
inline Settings to_settings(const RunConfig& c) {
  using detail::num;
  Settings s;
  s["scheme"] = to_string(c.scheme);
  s["page_size"] = std::to_string(c.geometry.page_size_bytes);
  s["pages_per_block"] = std::to_string(c.geometry.pages_per_block);
  s["logical_blocks"] = std::to_string(c.geometry.block_count);
  s["overprovision_blocks"] = std::to_string(c.overprovision_blocks);
  s["t_read_us"] = num(c.latency.read_us);
  s["t_write_us"] = num(c.latency.write_us);
  s["t_erase_us"] = num(c.latency.erase_us);
  s["p_capacity"] = std::to_string(c.cache.p_capacity_pages);
  s["b_capacity"] = std::to_string(c.cache.b_capacity_blocks);
  s["b_policy"] = to_string(c.cache.b_policy);
  s["gc_threshold"] = std::to_string(c.pagemap.gc_threshold);
  s["cmt_capacity"] = std::to_string(c.dftl.cmt_capacity);
  s["entries_per_tp"] = std::to_string(c.dftl.entries_per_tp);
  s["fast_rw_logs"] = std::to_string(c.fast.rw_log_blocks);
  const WorkloadParams& w = c.workload;
  s["seq_rate"] = num(w.seq_rate);
  s["locality_rate"] = num(w.locality_rate);
  s["mean_req_size"] = std::to_string(w.mean_req_size);
  s["size_mode"] = w.size_mode == SizeMode::Constant ? "constant" : "exponential";
  s["request_count"] = std::to_string(w.request_count);
  s["write_rate"] = num(w.write_rate);
  s["mean_interarrival_ms"] = num(w.mean_interarrival_ms);
  s["address_space"] = std::to_string(w.address_space);
  s["seed"] = std::to_string(w.seed);
  s["final_flush"] = c.final_flush ? "true" : "false";
  s["trace"] = c.trace_path.value_or("");
  return s;
}

inline void write_settings(std::ostream& out, const Settings& s) {
  for (const auto& [k, v] : s) out << k << " = " << v << '\n';
}

}  // namespace clash
