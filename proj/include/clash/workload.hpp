#pragma once

// Synthetic request streams (sequential / local / random start addresses,
// exponential inter-arrivals) and a plain-text trace reader.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "clash/flash.hpp"

namespace clash {

enum class OpKind : std::uint8_t { Read, Write };

struct Request {
  double arrival_ms = 0;
  OpKind op = OpKind::Read;
  Lpn start_lpn = 0;
  std::uint32_t size = 1;  // pages

  bool operator==(const Request&) const = default;
};

enum class SizeMode { Constant, Exponential };

class InvalidParams : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct WorkloadParams {
  double seq_rate = 0.0;
  double locality_rate = 0.0;
  std::uint32_t mean_req_size = 4;  // pages
  std::uint64_t request_count = 60000;
  double write_rate = 0.8;
  double mean_interarrival_ms = 200.0;
  std::uint64_t address_space = 524288;  // pages: 1 GB of 2 KB pages
  std::uint64_t seed = 1;
  SizeMode size_mode = SizeMode::Constant;

  void validate() const {
    auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
    if (!in_unit(seq_rate) || !in_unit(locality_rate) || !in_unit(write_rate))
      throw InvalidParams("rates must lie in [0, 1]");
    if (seq_rate + locality_rate > 1.0 + 1e-12)
      throw InvalidParams("seq_rate + locality_rate must not exceed 1");
    if (mean_req_size == 0) throw InvalidParams("mean_req_size must be >= 1");
    if (!(mean_interarrival_ms > 0))
      throw InvalidParams("mean_interarrival_ms must be positive");
    if (address_space < mean_req_size)
      throw InvalidParams("address space smaller than one request");
  }

  bool operator==(const WorkloadParams&) const = default;
};

// Pure function of params (seed included).
inline std::vector<Request> generate(const WorkloadParams& params) {
  params.validate();
  std::mt19937_64 rng(params.seed);
  std::exponential_distribution<double> gap(1.0 / params.mean_interarrival_ms);
  std::exponential_distribution<double> size_draw(1.0 / params.mean_req_size);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> offset(0.0, 1.0);

  std::vector<Request> out;
  out.reserve(params.request_count);
  double now = 0.0;
  const std::uint64_t space = params.address_space;
  for (std::uint64_t i = 0; i < params.request_count; ++i) {
    Request r;
    now += gap(rng);
    r.arrival_ms = now;
    r.op = unit(rng) < params.write_rate ? OpKind::Write : OpKind::Read;

    std::uint64_t size = params.mean_req_size;
    if (params.size_mode == SizeMode::Exponential)
      size = std::max<std::uint64_t>(
          1, static_cast<std::uint64_t>(std::ceil(size_draw(rng))));
    size = std::min(size, space);
    r.size = static_cast<std::uint32_t>(size);
    const std::uint64_t last_start = space - size;

    const double pick = unit(rng);
    if (i > 0 && pick < params.seq_rate) {
      const Request& prev = out.back();
      const std::uint64_t next = prev.start_lpn + prev.size;
      r.start_lpn = next + size <= space ? next : 0;
    } else if (i > 0 && pick < params.seq_rate + params.locality_rate) {
      long long delta = 0;
      do {
        delta = std::llround(offset(rng));
      } while (delta <= -2 || delta >= 2);
      const long long s = static_cast<long long>(out.back().start_lpn) + delta;
      r.start_lpn = static_cast<std::uint64_t>(
          std::clamp<long long>(s, 0, static_cast<long long>(last_start)));
    } else {
      std::uniform_int_distribution<std::uint64_t> where(0, last_start);
      r.start_lpn = where(rng);
    }
    out.push_back(r);
  }
  return out;
}

// Fraction of requests (after the first) that start exactly where the
// previous one ended, counting a wrap to address 0 as contiguous.
inline double sequential_fraction(const std::vector<Request>& reqs) {
  if (reqs.size() < 2) return 0.0;
  std::uint64_t seq = 0;
  for (std::size_t i = 1; i < reqs.size(); ++i) {
    const std::uint64_t end = reqs[i - 1].start_lpn + reqs[i - 1].size;
    if (reqs[i].start_lpn == end) ++seq;
  }
  return static_cast<double>(seq) / static_cast<double>(reqs.size() - 1);
}

class TraceError : public std::runtime_error {
 public:
  enum class Kind { ParseError, NonMonotonicArrival };
  TraceError(Kind kind, std::size_t line, const std::string& what)
      : std::runtime_error("trace line " + std::to_string(line) + ": " + what),
        kind_(kind),
        line_(line) {}
  Kind kind() const { return kind_; }
  std::size_t line() const { return line_; }

 private:
  Kind kind_;
  std::size_t line_;
};

// One request per line: <arrival_ms> <R|W> <start_lpn> <size_pages>.
// '#' starts a comment; blank lines are ignored.
inline std::vector<Request> parse_trace(std::istream& in) {
  std::vector<Request> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    std::istringstream fields(line);
    std::string arrival, op, start, size, extra;
    if (!(fields >> arrival)) continue;
    if (!(fields >> op >> start >> size) || (fields >> extra))
      throw TraceError(TraceError::Kind::ParseError, lineno,
                       "expected 4 fields");
    Request r;
    try {
      std::size_t used = 0;
      r.arrival_ms = std::stod(arrival, &used);
      if (used != arrival.size() || !(r.arrival_ms >= 0)) throw 0;
      if (start.find_first_not_of("0123456789") != std::string::npos ||
          size.find_first_not_of("0123456789") != std::string::npos)
        throw 0;
      r.start_lpn = std::stoull(start);
      const unsigned long long n = std::stoull(size);
      if (n == 0 || n > UINT32_MAX) throw 0;
      r.size = static_cast<std::uint32_t>(n);
    } catch (...) {
      throw TraceError(TraceError::Kind::ParseError, lineno,
                       "malformed number");
    }
    if (op == "R" || op == "r") {
      r.op = OpKind::Read;
    } else if (op == "W" || op == "w") {
      r.op = OpKind::Write;
    } else {
      throw TraceError(TraceError::Kind::ParseError, lineno,
                       "op must be R or W, got '" + op + "'");
    }
    if (!out.empty() && r.arrival_ms < out.back().arrival_ms)
      throw TraceError(TraceError::Kind::NonMonotonicArrival, lineno,
                       "arrival times must be non-decreasing");
    out.push_back(r);
  }
  return out;
}

inline void write_trace(std::ostream& out, const std::vector<Request>& reqs) {
  out.precision(17);
  for (const Request& r : reqs)
    out << r.arrival_ms << ' ' << (r.op == OpKind::Write ? 'W' : 'R') << ' '
        << r.start_lpn << ' ' << r.size << '\n';
}

// Sweep axes. Values are given in axis units: percent for the two rates,
// pages for the request size, a count for the request number.
enum class SweepAxis { SeqRate, LocalityRate, MeanReqSize, RequestCount };

inline const char* to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::SeqRate: return "seq";
    case SweepAxis::LocalityRate: return "local";
    case SweepAxis::MeanReqSize: return "size";
    case SweepAxis::RequestCount: return "reqnum";
  }
  return "?";
}

inline SweepAxis parse_axis(const std::string& s) {
  if (s == "seq" || s == "seq_rate") return SweepAxis::SeqRate;
  if (s == "local" || s == "locality" || s == "locality_rate")
    return SweepAxis::LocalityRate;
  if (s == "size" || s == "mean_req_size") return SweepAxis::MeanReqSize;
  if (s == "reqnum" || s == "request_count") return SweepAxis::RequestCount;
  throw InvalidParams("unknown sweep axis '" + s + "'");
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, SweepAxis axis,
                                 double value) {
  std::uint64_t bits = 0;
  static_assert(sizeof(bits) == sizeof(value));
  std::memcpy(&bits, &value, sizeof bits);
  return splitmix64(splitmix64(base ^ (static_cast<std::uint64_t>(axis) << 56)) ^
                    bits);
}

inline WorkloadParams with_axis(WorkloadParams p, SweepAxis axis,
                                double value) {
  switch (axis) {
    case SweepAxis::SeqRate: p.seq_rate = value / 100.0; break;
    case SweepAxis::LocalityRate: p.locality_rate = value / 100.0; break;
    case SweepAxis::MeanReqSize:
      if (value < 1 || value != std::floor(value))
        throw InvalidParams("request size must be a positive integer");
      p.mean_req_size = static_cast<std::uint32_t>(value);
      break;
    case SweepAxis::RequestCount:
      if (value < 0 || value != std::floor(value))
        throw InvalidParams("request count must be a non-negative integer");
      p.request_count = static_cast<std::uint64_t>(value);
      break;
  }
  return p;
}

inline std::vector<WorkloadParams> sweep(const WorkloadParams& base,
                                         SweepAxis axis,
                                         const std::vector<double>& values) {
  std::vector<WorkloadParams> out;
  out.reserve(values.size());
  for (double v : values) {
    WorkloadParams p = with_axis(base, axis, v);
    p.seed = derive_seed(base.seed, axis, v);
    p.validate();
    out.push_back(p);
  }
  return out;
}

// start, start+step, ..., end (inclusive, tolerant to rounding).
inline std::vector<double> range_values(double start, double end, double step) {
  if (!(step > 0) || end < start)
    throw InvalidParams("sweep range needs start <= end and step > 0");
  std::vector<double> v;
  const auto n = static_cast<std::uint64_t>(std::floor((end - start) / step + 1e-9));
  for (std::uint64_t i = 0; i <= n; ++i)
    v.push_back(start + static_cast<double>(i) * step);
  return v;
}

}  // namespace clash
