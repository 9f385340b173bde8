#include <gtest/gtest.h>

#include <random>

#include "oracle/exhaustive.hpp"

namespace {

using oracle::EquivalenceResult;
using oracle::SmallSetup;

SmallSetup short_setup() {
  SmallSetup s;
  s.max_len = 5;
  return s;
}

void expect_agreement(const EquivalenceResult& r) {
  EXPECT_EQ(r.mismatches, 0u) << r.first_mismatch;
  EXPECT_EQ(r.sequences, 9331u);  // 1 + 6 + ... + 6^5
  EXPECT_GT(r.max_erases, 0u);
}

TEST(Oracle, ClashMatchesReferenceOnAllShortSequences) {
  for (std::uint32_t b : {1u, 2u}) expect_agreement(oracle::clash_equivalence(short_setup(), b));
}

TEST(Oracle, PageMapMatchesReferenceOnAllShortSequences) {
  const auto r = oracle::pagemap_equivalence(short_setup());
  expect_agreement(r);
  EXPECT_GT(r.copying, 0u);
}

TEST(Oracle, DftlMatchesReferenceOnAllShortSequences) {
  expect_agreement(oracle::dftl_equivalence(short_setup()));
}

TEST(Oracle, FastMatchesReferenceOnAllShortSequences) {
  const auto r = oracle::fast_equivalence(short_setup());
  expect_agreement(r);
  EXPECT_GT(r.copying, 0u);
}

// Long random write streams over a wider geometry, compared step by step.
template <class Impl, class Ref>
void compare_random(Impl impl, Ref ref, std::uint64_t lpn_count, int length,
                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (int step = 0; step < length; ++step) {
    const clash::Lpn lpn = rng() % lpn_count;
    const bool ok_i = oracle::detail::attempt([&] { impl.handle_write(lpn); });
    const bool ok_r = oracle::detail::attempt([&] { ref.write(static_cast<int>(lpn)); });
    ASSERT_EQ(ok_i, ok_r) << "step " << step;
    if (!ok_i) return;
    std::string why;
    ASSERT_TRUE(oracle::same_flash(impl.flash(), ref.flash(), &why))
        << "seed " << seed << " step " << step << ": " << why;
  }
  const bool ok_i = oracle::detail::attempt([&] { impl.final_flush(); });
  const bool ok_r = oracle::detail::attempt([&] { ref.final_flush(); });
  ASSERT_EQ(ok_i, ok_r);
  std::string why;
  if (ok_i) EXPECT_TRUE(oracle::same_flash(impl.flash(), ref.flash(), &why)) << why;
}

TEST(Oracle, RandomLongStreams) {
  const clash::FlashGeometry logical{2048, 8, 8};
  const clash::FlashGeometry phys{2048, 8, 11};
  const std::uint64_t lp = logical.page_count();
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    compare_random(clash::ClashCache(logical, {}, lp, {6, 2, clash::BPolicy::Lru}),
                   oracle::RefClash(8, 8, 6, 2), lp, 400, seed);
    compare_random(clash::PageMapFtl(phys, {}, lp, {2}), oracle::RefPageMap(11, 8, 2),
                   lp, 400, seed);
    compare_random(clash::DftlFtl(phys, {}, lp, {2, 5, 4}),
                   oracle::RefDftl(11, 8, 2, 5, 4), lp, 400, seed);
    compare_random(clash::FastFtl(phys, {}, lp, {2}), oracle::RefFast(11, 8, 2), lp,
                   400, seed);
  }
}

}  // namespace
