#pragma once

// Out-of-place page allocator shared by the page-mapped FTLs: a FIFO pool of
// reclaimable blocks, one write frontier per stream, and greedy garbage
// collection. Mapping tables live in the FTLs; the store only knows which
// owner tag each physical page was written for.

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "clash/flash.hpp"
#include "clash/scheme_common.hpp"

namespace clash::detail {

class PageStore {
 public:
  static constexpr std::uint64_t kNoOwner = ~std::uint64_t{0};

  PageStore(FlashGeometry geometry, LatencyParams latency,
            std::uint32_t gc_threshold, std::uint32_t streams,
            std::string owner_name)
      : flash_(geometry, latency),
        gc_threshold_(gc_threshold),
        frontier_(streams),
        name_(std::move(owner_name)) {
    // Every block starts dirty and is reclaimable without copying.
    for (BlockNo b = 0; b < geometry.block_count; ++b) pool_.push_back(b);
    stream_of_.assign(geometry.block_count, kInPool);
    owner_.assign(geometry.page_count(), kNoOwner);
  }

  FlashDevice& flash() { return flash_; }
  const FlashDevice& flash() const { return flash_; }
  std::size_t free_blocks() const { return pool_.size(); }
  std::uint64_t owner(PageNo p) const { return owner_.at(p); }

  // Programs the next page of the stream's frontier block.
  PageNo append(std::uint32_t stream, std::uint64_t owner, OpCost& c) {
    auto& front = frontier_.at(stream);
    const std::uint32_t ppb = flash_.geometry().pages_per_block;
    if (!front || flash_.write_cursor(*front) == ppb) {
      if (pool_.empty()) throw CapacityExhausted(name_);
      const BlockNo b = pool_.front();
      pool_.pop_front();
      if (flash_.write_cursor(b) != 0) charged_erase(flash_, b, c);
      stream_of_[b] = static_cast<std::int32_t>(stream);
      front = b;
    }
    const PageNo p = flash_.geometry().page_at(*front, flash_.write_cursor(*front));
    charged_write(flash_, p, c);
    owner_[p] = owner;
    return p;
  }

  void invalidate(PageNo p) {
    flash_.invalidate_page(p);
    owner_[p] = kNoOwner;
  }

  // Greedy collection while the pool is below threshold. Victim: most
  // Invalid pages, then lowest erase count, then lowest block number.
  // relocated(owner, new_page, cost) is called per moved page and
  // victim_done(cost) once each victim has been emptied.
  template <class Relocated, class VictimDone>
  void collect(OpCost& c, Relocated&& relocated, VictimDone&& victim_done) {
    if (collecting_) return;
    collecting_ = true;
    while (pool_.size() < gc_threshold_) {
      const std::optional<BlockNo> victim = pick_victim();
      if (!victim) break;
      const auto stream = static_cast<std::uint32_t>(stream_of_[*victim]);
      const std::uint32_t ppb = flash_.geometry().pages_per_block;
      for (std::uint32_t o = 0; o < ppb; ++o) {
        const PageNo old = flash_.geometry().page_at(*victim, o);
        if (flash_.state(old) != PageState::Valid) continue;
        const std::uint64_t who = owner_[old];
        charged_read(flash_, old, c);
        const PageNo moved = append(stream, who, c);
        invalidate(old);
        relocated(who, moved, c);
      }
      victim_done(c);
      charged_erase(flash_, *victim, c);
      stream_of_[*victim] = kInPool;
      pool_.push_back(*victim);
    }
    collecting_ = false;
  }

 private:
  static constexpr std::int32_t kInPool = -1;

  bool is_frontier(BlockNo b) const {
    for (const auto& f : frontier_)
      if (f && *f == b) return true;
    return false;
  }

  std::optional<BlockNo> pick_victim() const {
    std::optional<BlockNo> best;
    std::uint32_t best_invalid = 0;
    for (BlockNo b = 0; b < flash_.geometry().block_count; ++b) {
      if (stream_of_[b] == kInPool || is_frontier(b)) continue;
      const std::uint32_t inv = flash_.invalid_pages(b);
      if (inv == 0) continue;
      if (!best || inv > best_invalid ||
          (inv == best_invalid &&
           flash_.erase_count(b) < flash_.erase_count(*best))) {
        best = b;
        best_invalid = inv;
      }
    }
    return best;
  }

  FlashDevice flash_;
  std::uint32_t gc_threshold_;
  std::deque<BlockNo> pool_;
  std::vector<std::int32_t> stream_of_;
  std::vector<std::optional<BlockNo>> frontier_;
  std::vector<std::uint64_t> owner_;
  std::string name_;
  bool collecting_ = false;
};

}  // namespace clash::detail
