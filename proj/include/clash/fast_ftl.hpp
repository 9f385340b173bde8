#pragma once

// Hybrid log-block FTL. Data blocks are block-mapped; updates go to log
// blocks that are page-mapped. One log block takes strictly sequential
// writes starting at offset 0 so it can later replace its data block by a
// switch merge; the others take everything else and are reclaimed by full
// merges, oldest first.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <vector>

#include "clash/flash.hpp"
#include "clash/scheme_common.hpp"

namespace clash {

struct FastParams {
  std::uint32_t rw_log_blocks = 6;
  bool operator==(const FastParams&) const = default;
};

struct FastMergeStats {
  std::uint64_t switch_merges = 0;
  std::uint64_t partial_merges = 0;
  std::uint64_t full_merges = 0;  // per logical block rebuilt
};

class FastFtl {
 public:
  static constexpr BlockNo kNoBlock = ~BlockNo{0};

  FastFtl(FlashGeometry physical, LatencyParams latency,
          std::uint64_t logical_pages, FastParams params = {})
      : flash_(physical, latency), params_(params), logical_pages_(logical_pages) {
    const std::uint32_t ppb = physical.pages_per_block;
    if (logical_pages_ == 0 || logical_pages_ % ppb != 0 ||
        logical_pages_ > physical.page_count())
      throw std::invalid_argument(
          "logical space must be a whole number of blocks within the device");
    if (params_.rw_log_blocks == 0)
      throw std::invalid_argument("fast needs at least one random log block");
    data_block_.assign(logical_pages_ / ppb, kNoBlock);
    rw_loc_.assign(logical_pages_, kNoPage);
    log_owner_.assign(physical.page_count(), 0);
    for (BlockNo b = 0; b < physical.block_count; ++b) pool_.push_back(b);
  }

  OpCost handle_read(Lpn lpn) {
    check_lpn(lpn, logical_pages_);
    ++stats_.read_pages;
    OpCost c;
    const PageNo p = locate(lpn);
    if (p != kNoPage) {
      charged_read(flash_, p, c);
    } else {
      ++stats_.unwritten_reads;
      charged_unwritten_read(flash_, c);
    }
    return c;
  }

  OpCost handle_write(Lpn lpn) {
    check_lpn(lpn, logical_pages_);
    ++stats_.write_pages;
    OpCost c;
    const BlockNo lbn = lbn_of(lpn);
    const std::uint32_t off = offset_of(lpn);
    drop_copy(lpn);

    if (off == 0) {
      if (sw_) merge_sw(c);
      sw_ = SwLog{take_block(c), lbn};
      charged_write(flash_, page_at(sw_->block, 0), c);
      return c;
    }
    if (sw_ && sw_->lbn == lbn && off == flash_.write_cursor(sw_->block)) {
      charged_write(flash_, page_at(sw_->block, off), c);
      if (flash_.write_cursor(sw_->block) == ppb()) merge_sw(c);
      return c;
    }
    if (rw_logs_.empty() || flash_.write_cursor(rw_logs_.back()) == ppb()) {
      if (rw_logs_.size() >= params_.rw_log_blocks) merge_oldest_rw(c);
      rw_logs_.push_back(take_block(c));
    }
    const BlockNo log = rw_logs_.back();
    const PageNo p = page_at(log, flash_.write_cursor(log));
    charged_write(flash_, p, c);
    rw_loc_[lpn] = p;
    log_owner_[p] = lpn;
    return c;
  }

  OpCost final_flush() { return {}; }

  // Physical page holding the freshest copy, or kNoPage.
  PageNo locate(Lpn lpn) const {
    const BlockNo lbn = lbn_of(lpn);
    const std::uint32_t off = offset_of(lpn);
    if (sw_ && sw_->lbn == lbn && off < flash_.write_cursor(sw_->block)) {
      const PageNo p = page_at(sw_->block, off);
      if (flash_.is_valid(p)) return p;
    }
    if (rw_loc_[lpn] != kNoPage) return rw_loc_[lpn];
    if (data_block_[lbn] != kNoBlock) {
      const PageNo p = page_at(data_block_[lbn], off);
      if (flash_.is_valid(p)) return p;
    }
    return kNoPage;
  }

  BlockNo data_block(BlockNo lbn) const { return data_block_.at(lbn); }
  std::optional<BlockNo> sw_log_block() const {
    return sw_ ? std::optional{sw_->block} : std::nullopt;
  }
  std::optional<BlockNo> sw_log_lbn() const {
    return sw_ ? std::optional{sw_->lbn} : std::nullopt;
  }
  const std::deque<BlockNo>& rw_logs() const { return rw_logs_; }
  const FastMergeStats& merge_stats() const { return merges_; }
  std::size_t free_blocks() const { return pool_.size(); }

  const FlashDevice& flash() const { return flash_; }
  const SchemeStats& stats() const { return stats_; }
  std::uint64_t logical_pages() const { return logical_pages_; }
  std::uint32_t reachable_blocks() const {
    return flash_.geometry().block_count;
  }

 private:
  struct SwLog {
    BlockNo block;
    BlockNo lbn;
  };

  std::uint32_t ppb() const { return flash_.geometry().pages_per_block; }
  BlockNo lbn_of(Lpn lpn) const { return static_cast<BlockNo>(lpn / ppb()); }
  std::uint32_t offset_of(Lpn lpn) const {
    return static_cast<std::uint32_t>(lpn % ppb());
  }
  PageNo page_at(BlockNo b, std::uint32_t off) const {
    return flash_.geometry().page_at(b, off);
  }

  void drop_copy(Lpn lpn) {
    const PageNo p = locate(lpn);
    if (p == kNoPage) return;
    flash_.invalidate_page(p);
    if (rw_loc_[lpn] == p) rw_loc_[lpn] = kNoPage;
  }

  BlockNo take_block(OpCost& c) {
    if (pool_.empty()) throw CapacityExhausted("fast");
    const BlockNo b = pool_.front();
    pool_.pop_front();
    if (flash_.write_cursor(b) != 0) charged_erase(flash_, b, c);
    return b;
  }

  void retire_block(BlockNo b, OpCost& c) {
    if (flash_.valid_pages(b) != 0)
      throw std::logic_error("fast: retiring a block that holds live data");
    charged_erase(flash_, b, c);
    pool_.push_back(b);
  }

  // Moves lpn's freshest copy to the next page of dest.
  void copy_to(Lpn lpn, BlockNo dest, std::uint32_t off, OpCost& c) {
    const PageNo src = locate(lpn);
    if (src == kNoPage) return;
    charged_read(flash_, src, c);
    flash_.invalidate_page(src);
    if (rw_loc_[lpn] == src) rw_loc_[lpn] = kNoPage;
    const PageNo dst = page_at(dest, off);
    if (flash_.write_cursor(dest) != off) flash_.skip_to(dst);
    charged_write(flash_, dst, c);
  }

  void merge_sw(OpCost& c) {
    const SwLog sw = *sw_;
    const std::uint32_t filled = flash_.write_cursor(sw.block);
    bool prefix_valid = true;
    for (std::uint32_t o = 0; o < filled; ++o)
      prefix_valid = prefix_valid && flash_.is_valid(page_at(sw.block, o));

    if (!prefix_valid) {
      merge_lbn(sw.lbn, c);  // also retires the sw log
      return;
    }
    if (filled == ppb()) {
      ++merges_.switch_merges;
    } else {
      // Partial merge: complete the log with the block's remaining pages.
      ++merges_.partial_merges;
      const Lpn base = Lpn{sw.lbn} * ppb();
      for (std::uint32_t o = filled; o < ppb(); ++o)
        copy_to(base + o, sw.block, o, c);
    }
    sw_.reset();
    if (data_block_[sw.lbn] != kNoBlock) retire_block(data_block_[sw.lbn], c);
    data_block_[sw.lbn] = sw.block;
  }

  // Rebuilds one logical block from its freshest pages into a new block.
  void merge_lbn(BlockNo lbn, OpCost& c) {
    ++merges_.full_merges;
    const BlockNo dest = take_block(c);
    const Lpn base = Lpn{lbn} * ppb();
    for (std::uint32_t o = 0; o < ppb(); ++o) copy_to(base + o, dest, o, c);
    if (data_block_[lbn] != kNoBlock) retire_block(data_block_[lbn], c);
    if (sw_ && sw_->lbn == lbn) {
      retire_block(sw_->block, c);
      sw_.reset();
    }
    if (flash_.write_cursor(dest) == 0) {
      data_block_[lbn] = kNoBlock;
      pool_.push_back(dest);
    } else {
      data_block_[lbn] = dest;
    }
  }

  void merge_oldest_rw(OpCost& c) {
    const BlockNo log = rw_logs_.front();
    std::vector<BlockNo> lbns;
    for (std::uint32_t o = 0; o < flash_.write_cursor(log); ++o) {
      const PageNo p = page_at(log, o);
      if (flash_.is_valid(p)) lbns.push_back(lbn_of(log_owner_[p]));
    }
    std::sort(lbns.begin(), lbns.end());
    lbns.erase(std::unique(lbns.begin(), lbns.end()), lbns.end());
    for (BlockNo lbn : lbns) merge_lbn(lbn, c);
    rw_logs_.pop_front();
    retire_block(log, c);
  }

  FlashDevice flash_;
  FastParams params_;
  std::uint64_t logical_pages_;
  std::vector<BlockNo> data_block_;
  std::optional<SwLog> sw_;
  std::deque<BlockNo> rw_logs_;
  std::vector<PageNo> rw_loc_;
  std::vector<Lpn> log_owner_;
  std::deque<BlockNo> pool_;
  SchemeStats stats_;
  FastMergeStats merges_;
};

}  // namespace clash
