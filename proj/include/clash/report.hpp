#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace clash {

// Wear-leveling quality: population standard deviation of the per-block
// erase counts divided by their mean (0 when nothing was erased).
inline double weighted_std_dev(std::span<const std::uint32_t> erases) {
  if (erases.empty()) return 0.0;
  const double n = static_cast<double>(erases.size());
  double sum = 0;
  for (std::uint32_t e : erases) sum += e;
  const double mean = sum / n;
  if (mean == 0) return 0.0;
  double sq = 0;
  for (std::uint32_t e : erases) sq += (e - mean) * (e - mean);
  return std::sqrt(sq / n) / mean;
}

inline const char* kWsdFormula =
    "wsd = sqrt(sum_i (e_i - mean)^2 / N) / mean over the N blocks reachable "
    "by the scheme; 0 when mean = 0";

struct SummaryRow {
  std::string scheme;
  std::string axis;
  double axis_value = 0;
  std::uint64_t seed = 0;
  double mean_response_ms = 0;
  std::uint64_t reads = 0, writes = 0, erases = 0;
  double wsd = 0;
  double read_hit_rate = 0, write_hit_rate = 0;
  std::uint64_t unwritten_reads = 0;
  std::uint32_t blocks_counted = 0;
};

using CsvRecord = std::vector<std::pair<std::string, std::string>>;

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

// Integral values print without a fraction, others with up to 6 decimals.
inline std::string format_axis_value(double v) {
  if (v == std::floor(v) && std::fabs(v) < 1e15)
    return std::to_string(static_cast<long long>(v));
  std::string s = format_fixed(v, 6);
  while (s.back() == '0') s.pop_back();
  return s;
}

inline CsvRecord to_record(const SummaryRow& r) {
  return {
      {"scheme", r.scheme},
      {"axis", r.axis},
      {"axis_value", format_axis_value(r.axis_value)},
      {"seed", std::to_string(r.seed)},
      {"mean_response_ms", format_fixed(r.mean_response_ms, 3)},
      {"reads", std::to_string(r.reads)},
      {"writes", std::to_string(r.writes)},
      {"erases", std::to_string(r.erases)},
      {"wsd", format_fixed(r.wsd, 6)},
      {"read_hit_rate", format_fixed(r.read_hit_rate, 6)},
      {"write_hit_rate", format_fixed(r.write_hit_rate, 6)},
      {"unwritten_reads", std::to_string(r.unwritten_reads)},
      {"blocks_counted", std::to_string(r.blocks_counted)},
  };
}

inline void write_csv(std::span<const CsvRecord> rows, std::ostream& out) {
  if (rows.empty()) throw CsvError("no rows to write");
  const CsvRecord& first = rows.front();
  for (std::size_t i = 0; i < first.size(); ++i)
    out << (i ? "," : "") << first[i].first;
  out << '\n';
  for (const CsvRecord& row : rows) {
    if (row.size() != first.size())
      throw CsvError("schema mismatch: differing column count");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (row[i].first != first[i].first)
        throw CsvError("schema mismatch: column '" + row[i].first +
                       "' where '" + first[i].first + "' was expected");
      if (row[i].second.find_first_of(",\n\"") != std::string::npos)
        throw CsvError("field needs quoting: " + row[i].second);
      out << (i ? "," : "") << row[i].second;
    }
    out << '\n';
  }
  if (!out) throw CsvError("write failed");
}

inline void write_csv(std::span<const SummaryRow> rows, std::ostream& out) {
  std::vector<CsvRecord> recs;
  recs.reserve(rows.size());
  for (const SummaryRow& r : rows) recs.push_back(to_record(r));
  write_csv(recs, out);
}

inline std::vector<CsvRecord> parse_csv(std::istream& in) {
  std::vector<CsvRecord> rows;
  std::string line;
  std::vector<std::string> header;
  auto split = [](const std::string& s) {
    std::vector<std::string> f;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (!s.empty() && s.back() == ',') f.emplace_back();
    return f;
  };
  if (!std::getline(in, line)) return rows;
  header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size())
      throw CsvError("row has " + std::to_string(cells.size()) +
                     " cells, header has " + std::to_string(header.size()));
    CsvRecord rec;
    for (std::size_t i = 0; i < cells.size(); ++i)
      rec.emplace_back(header[i], cells[i]);
    rows.push_back(std::move(rec));
  }
  return rows;
}

inline SummaryRow from_record(const CsvRecord& rec) {
  SummaryRow r;
  for (const auto& [k, v] : rec) {
    if (k == "scheme") r.scheme = v;
    else if (k == "axis") r.axis = v;
    else if (k == "axis_value") r.axis_value = std::stod(v);
    else if (k == "seed") r.seed = std::stoull(v);
    else if (k == "mean_response_ms") r.mean_response_ms = std::stod(v);
    else if (k == "reads") r.reads = std::stoull(v);
    else if (k == "writes") r.writes = std::stoull(v);
    else if (k == "erases") r.erases = std::stoull(v);
    else if (k == "wsd") r.wsd = std::stod(v);
    else if (k == "read_hit_rate") r.read_hit_rate = std::stod(v);
    else if (k == "write_hit_rate") r.write_hit_rate = std::stod(v);
    else if (k == "unwritten_reads") r.unwritten_reads = std::stoull(v);
    else if (k == "blocks_counted") r.blocks_counted = static_cast<std::uint32_t>(std::stoul(v));
    else throw CsvError("unknown column '" + k + "'");
  }
  return r;
}

}  // namespace clash
