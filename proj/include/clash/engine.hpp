#pragma once

// Single-device FIFO executor. Requests are served one at a time in arrival
// order; each is split into per-page operations in ascending lpn order and
// its service time is the sum of their flash latencies.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "clash/clash_cache.hpp"
#include "clash/dftl.hpp"
#include "clash/fast_ftl.hpp"
#include "clash/page_map_ftl.hpp"
#include "clash/report.hpp"
#include "clash/workload.hpp"

namespace clash {

template <class S>
concept StorageScheme = requires(S s, const S cs, Lpn lpn) {
  { s.handle_read(lpn) } -> std::same_as<OpCost>;
  { s.handle_write(lpn) } -> std::same_as<OpCost>;
  { s.final_flush() } -> std::same_as<OpCost>;
  { cs.flash() } -> std::same_as<const FlashDevice&>;
  { cs.stats() } -> std::convertible_to<SchemeStats>;
  { cs.logical_pages() } -> std::convertible_to<std::uint64_t>;
  { cs.reachable_blocks() } -> std::convertible_to<std::uint32_t>;
};

static_assert(StorageScheme<ClashCache>);
static_assert(StorageScheme<PageMapFtl>);
static_assert(StorageScheme<DftlFtl>);
static_assert(StorageScheme<FastFtl>);

enum class SchemeKind { Clash, PageMap, Dftl, Fast };

inline const char* to_string(SchemeKind k) {
  switch (k) {
    case SchemeKind::Clash: return "clash";
    case SchemeKind::PageMap: return "pagemap";
    case SchemeKind::Dftl: return "dftl";
    case SchemeKind::Fast: return "fast";
  }
  return "?";
}

inline SchemeKind parse_scheme(const std::string& s) {
  if (s == "clash") return SchemeKind::Clash;
  if (s == "pagemap") return SchemeKind::PageMap;
  if (s == "dftl") return SchemeKind::Dftl;
  if (s == "fast") return SchemeKind::Fast;
  throw std::invalid_argument("unknown scheme '" + s + "'");
}

inline constexpr SchemeKind kAllSchemes[] = {
    SchemeKind::Clash, SchemeKind::PageMap, SchemeKind::Dftl, SchemeKind::Fast};

struct RunConfig {
  SchemeKind scheme = SchemeKind::Clash;
  // block_count is the logical (advertised) space; FTLs additionally get
  // overprovision_blocks physical blocks.
  FlashGeometry geometry;
  std::uint32_t overprovision_blocks = 246;  // ~3% of 8192
  LatencyParams latency;
  CacheConfig cache;
  PageMapParams pagemap;
  DftlParams dftl;
  FastParams fast;
  WorkloadParams workload;
  std::optional<std::string> trace_path;
  bool final_flush = false;

  FlashGeometry physical() const {
    FlashGeometry g = geometry;
    g.block_count += overprovision_blocks;
    return g;
  }
  std::uint64_t logical_pages() const { return geometry.page_count(); }

  void validate() const {
    geometry.validate();
    latency.validate();
    cache.validate();
    if (!trace_path) {
      workload.validate();
      if (workload.address_space > logical_pages())
        throw InvalidParams("workload address space exceeds logical capacity");
    }
  }
};

inline std::uint32_t default_overprovision(std::uint32_t logical_blocks) {
  return static_cast<std::uint32_t>(std::lround(0.03 * logical_blocks));
}

using AnyScheme = std::variant<ClashCache, PageMapFtl, DftlFtl, FastFtl>;

inline AnyScheme make_scheme(const RunConfig& cfg) {
  const FlashGeometry phys = cfg.physical();
  const std::uint64_t lp = cfg.logical_pages();
  switch (cfg.scheme) {
    case SchemeKind::Clash:
      return ClashCache(phys, cfg.latency, lp, cfg.cache);
    case SchemeKind::PageMap:
      return PageMapFtl(phys, cfg.latency, lp, cfg.pagemap);
    case SchemeKind::Dftl:
      return DftlFtl(phys, cfg.latency, lp, cfg.dftl);
    case SchemeKind::Fast:
      return FastFtl(phys, cfg.latency, lp, cfg.fast);
  }
  throw std::logic_error("unreachable");
}

struct RunMetrics {
  std::uint64_t requests = 0;
  double mean_response_ms = 0;
  double max_response_ms = 0;
  double busy_ms = 0;  // total device service time
  std::uint64_t reads = 0, writes = 0, erases = 0;
  std::vector<std::uint32_t> erase_histogram;  // reachable blocks only
  std::uint32_t blocks_counted = 0;
  double wsd = 0;
  SchemeStats cache;
  std::uint64_t unwritten_reads = 0;
  OpCost final_flush;  // residual write-back, outside any response time
  bool valid = true;
  std::string error;

  double read_hit_rate() const {
    return cache.read_pages ? static_cast<double>(cache.read_hits) /
                                  static_cast<double>(cache.read_pages)
                            : 0.0;
  }
  double write_hit_rate() const {
    return cache.write_pages ? static_cast<double>(cache.write_hits) /
                                   static_cast<double>(cache.write_pages)
                             : 0.0;
  }

  bool operator==(const RunMetrics&) const = default;
};

inline void finish_metrics(RunMetrics& m, const FlashDevice& flash,
                           const SchemeStats& stats, std::uint32_t reachable) {
  m.reads = flash.reads();
  m.writes = flash.writes();
  m.erases = flash.erases();
  const auto hist = flash.erase_histogram();
  m.erase_histogram.assign(hist.begin(), hist.begin() + reachable);
  m.blocks_counted = reachable;
  m.wsd = weighted_std_dev(m.erase_histogram);
  m.cache = stats;
  m.unwritten_reads = stats.unwritten_reads;
}

// Called after every request with (request index, response ms).
using ResponseHook = std::function<void(std::size_t, double)>;

template <StorageScheme S>
RunMetrics simulate(S& scheme, std::span<const Request> requests,
                    bool final_flush, const ResponseHook& hook = {}) {
  RunMetrics m;
  double free_at_ms = 0;
  double response_sum = 0;
  try {
    for (std::size_t i = 0; i < requests.size(); ++i) {
      const Request& r = requests[i];
      if (r.size == 0 || r.start_lpn + r.size > scheme.logical_pages())
        throw std::out_of_range("request " + std::to_string(i) +
                                " falls outside the logical space");
      OpCost cost;
      for (Lpn lpn = r.start_lpn; lpn < r.start_lpn + r.size; ++lpn)
        cost += r.op == OpKind::Write ? scheme.handle_write(lpn)
                                      : scheme.handle_read(lpn);
      const double start = std::max(r.arrival_ms, free_at_ms);
      free_at_ms = start + cost.latency_us / 1000.0;
      const double response = free_at_ms - r.arrival_ms;
      response_sum += response;
      m.max_response_ms = std::max(m.max_response_ms, response);
      m.busy_ms += cost.latency_us / 1000.0;
      ++m.requests;
      if (hook) hook(i, response);
    }
    if (final_flush) m.final_flush = scheme.final_flush();
  } catch (const CapacityExhausted& e) {
    m.valid = false;
    m.error = e.what();
  }
  m.mean_response_ms = m.requests ? response_sum / static_cast<double>(m.requests) : 0.0;
  finish_metrics(m, scheme.flash(), scheme.stats(), scheme.reachable_blocks());
  return m;
}

inline std::vector<Request> load_requests(const RunConfig& cfg) {
  if (!cfg.trace_path) return generate(cfg.workload);
  std::ifstream in(*cfg.trace_path);
  if (!in) throw std::runtime_error("cannot open trace " + *cfg.trace_path);
  return parse_trace(in);
}

inline RunMetrics run(const RunConfig& cfg, std::span<const Request> requests) {
  cfg.validate();
  AnyScheme scheme = make_scheme(cfg);
  return std::visit(
      [&](auto& s) { return simulate(s, requests, cfg.final_flush); }, scheme);
}

inline RunMetrics run(const RunConfig& cfg) {
  cfg.validate();
  const std::vector<Request> requests = load_requests(cfg);
  return run(cfg, requests);
}

}  // namespace clash
