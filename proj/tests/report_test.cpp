#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "clash/report.hpp"

namespace clash {
namespace {

TEST(Wsd, Examples) {
  const std::vector<std::uint32_t> even = {3, 3, 3, 3};
  EXPECT_EQ(weighted_std_dev(even), 0.0);
  const std::vector<std::uint32_t> half = {2, 0};
  EXPECT_DOUBLE_EQ(weighted_std_dev(half), 1.0);
  const std::vector<std::uint32_t> zeros(10, 0);
  EXPECT_EQ(weighted_std_dev(zeros), 0.0);
  EXPECT_EQ(weighted_std_dev({}), 0.0);
  const std::vector<std::uint32_t> one_hot = {4, 0, 0, 0};
  EXPECT_DOUBLE_EQ(weighted_std_dev(one_hot), std::sqrt(3.0));
}

TEST(Wsd, ScaleInvariantAndNonNegative) {
  std::mt19937 rng(4);
  for (int t = 0; t < 200; ++t) {
    std::vector<std::uint32_t> e(1 + rng() % 50);
    for (auto& x : e) x = rng() % 100;
    std::vector<std::uint32_t> scaled = e;
    const std::uint32_t k = 1 + rng() % 7;
    for (auto& x : scaled) x *= k;
    const double w = weighted_std_dev(e);
    EXPECT_GE(w, 0.0);
    EXPECT_NEAR(weighted_std_dev(scaled), w, 1e-9);
  }
}

SummaryRow sample_row(std::string scheme, double axis_value) {
  SummaryRow r;
  r.scheme = std::move(scheme);
  r.axis = "seq";
  r.axis_value = axis_value;
  r.seed = 77;
  r.mean_response_ms = 1.23456;
  r.reads = 10;
  r.writes = 20;
  r.erases = 3;
  r.wsd = 0.5;
  r.read_hit_rate = 0.25;
  r.write_hit_rate = 0.75;
  r.unwritten_reads = 2;
  r.blocks_counted = 8192;
  return r;
}

TEST(Csv, HeaderAndRows) {
  const std::vector<SummaryRow> rows = {sample_row("clash", 5),
                                        sample_row("dftl", 12.5)};
  std::ostringstream out;
  write_csv(rows, out);
  std::istringstream in(out.str());
  std::string header, first, second, extra;
  std::getline(in, header);
  std::getline(in, first);
  std::getline(in, second);
  EXPECT_EQ(header,
            "scheme,axis,axis_value,seed,mean_response_ms,reads,writes,erases,"
            "wsd,read_hit_rate,write_hit_rate,unwritten_reads,blocks_counted");
  EXPECT_EQ(first,
            "clash,seq,5,77,1.235,10,20,3,0.500000,0.250000,0.750000,2,8192");
  EXPECT_EQ(second.substr(0, 14), "dftl,seq,12.5,");
  EXPECT_FALSE(std::getline(in, extra));
}

TEST(Csv, SchemaMismatchIsRejected) {
  std::vector<CsvRecord> recs = {to_record(sample_row("clash", 1)),
                                 to_record(sample_row("fast", 2))};
  recs[1][2].first = "other";
  std::ostringstream out;
  EXPECT_THROW(write_csv(recs, out), CsvError);
  recs[1] = to_record(sample_row("fast", 2));
  recs[1].pop_back();
  EXPECT_THROW(write_csv(recs, out), CsvError);
  EXPECT_THROW(write_csv(std::vector<CsvRecord>{}, out), CsvError);
}

TEST(Csv, RoundTrip) {
  const std::vector<SummaryRow> rows = {sample_row("clash", 5),
                                        sample_row("pagemap", 0.25)};
  std::stringstream buf;
  write_csv(rows, buf);
  const auto parsed = parse_csv(buf);
  ASSERT_EQ(parsed.size(), 2u);
  const SummaryRow back = from_record(parsed[1]);
  EXPECT_EQ(back.scheme, "pagemap");
  EXPECT_DOUBLE_EQ(back.axis_value, 0.25);
  EXPECT_EQ(back.seed, 77u);
  EXPECT_DOUBLE_EQ(back.mean_response_ms, 1.235);
  EXPECT_EQ(back.erases, 3u);
  EXPECT_DOUBLE_EQ(back.wsd, 0.5);
  EXPECT_EQ(back.blocks_counted, 8192u);
}

TEST(Csv, ParseRejectsRaggedRows) {
  std::istringstream in("a,b\n1,2\n3\n");
  EXPECT_THROW(parse_csv(in), CsvError);
}

}  // namespace
}  // namespace clash
