#pragma once

// Idealized page-mapping FTL: the whole lpn -> ppn table sits in SRAM at no
// cost. Used as the best-case FTL baseline.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "clash/page_store.hpp"

namespace clash {

struct PageMapParams {
  std::uint32_t gc_threshold = 2;  // free blocks
  bool operator==(const PageMapParams&) const = default;
};

class PageMapFtl {
 public:
  PageMapFtl(FlashGeometry physical, LatencyParams latency,
             std::uint64_t logical_pages, PageMapParams params = {})
      : store_(physical, latency, params.gc_threshold, 1, "pagemap"),
        logical_pages_(logical_pages) {
    if (logical_pages_ == 0 || logical_pages_ > physical.page_count())
      throw std::invalid_argument("logical space exceeds the device");
    l2p_.assign(logical_pages_, kNoPage);
  }

  OpCost handle_read(Lpn lpn) {
    check_lpn(lpn, logical_pages_);
    ++stats_.read_pages;
    OpCost c;
    if (l2p_[lpn] != kNoPage) {
      charged_read(store_.flash(), l2p_[lpn], c);
    } else {
      ++stats_.unwritten_reads;
      charged_unwritten_read(store_.flash(), c);
    }
    return c;
  }

  OpCost handle_write(Lpn lpn) {
    check_lpn(lpn, logical_pages_);
    ++stats_.write_pages;
    OpCost c;
    if (l2p_[lpn] != kNoPage) store_.invalidate(l2p_[lpn]);
    l2p_[lpn] = store_.append(0, lpn, c);
    store_.collect(
        c, [&](std::uint64_t who, PageNo moved, OpCost&) { l2p_[who] = moved; },
        [](OpCost&) {});
    return c;
  }

  OpCost final_flush() { return {}; }

  PageNo mapping(Lpn lpn) const { return l2p_.at(lpn); }
  std::size_t free_blocks() const { return store_.free_blocks(); }
  const FlashDevice& flash() const { return store_.flash(); }
  const SchemeStats& stats() const { return stats_; }
  std::uint64_t logical_pages() const { return logical_pages_; }
  std::uint32_t reachable_blocks() const {
    return flash().geometry().block_count;
  }

 private:
  detail::PageStore store_;
  std::uint64_t logical_pages_;
  std::vector<PageNo> l2p_;
  SchemeStats stats_;
};

}  // namespace clash
