#pragma once

// Demand-based page-mapping FTL. Only a bounded, recency-ordered subset of
// the mapping table (the CMT) is held in SRAM; the full table lives in
// translation pages on the flash, located through the GTD. A translation
// page that was never written holds no mappings and needs no read.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "clash/page_store.hpp"

namespace clash {

struct DftlParams {
  std::uint32_t gc_threshold = 2;
  std::uint64_t cmt_capacity = 2048;    // mapping entries
  std::uint32_t entries_per_tp = 512;   // mappings per translation page
  bool operator==(const DftlParams&) const = default;
};

class DftlFtl {
 public:
  DftlFtl(FlashGeometry physical, LatencyParams latency,
          std::uint64_t logical_pages, DftlParams params = {})
      : store_(physical, latency, params.gc_threshold, 2, "dftl"),
        params_(params),
        logical_pages_(logical_pages) {
    if (logical_pages_ == 0 || logical_pages_ > physical.page_count())
      throw std::invalid_argument("logical space exceeds the device");
    if (params_.cmt_capacity == 0 || params_.entries_per_tp == 0)
      throw std::invalid_argument("dftl needs a non-empty CMT and TP size");
    const std::uint64_t tps =
        (logical_pages_ + params_.entries_per_tp - 1) / params_.entries_per_tp;
    gtd_.assign(tps, kNoPage);
    tp_dirty_.assign(tps, 0);
    tp_pending_.assign(tps, 0);
    persisted_.assign(logical_pages_, kNoPage);
    cached_.assign(logical_pages_, kNoPage);
    dirty_.assign(logical_pages_, 0);
    in_cmt_.assign(logical_pages_, 0);
    prev_.assign(logical_pages_, kNil);
    next_.assign(logical_pages_, kNil);
  }

  // Makes lpn's mapping resident in the CMT.
  OpCost translate(Lpn lpn) {
    check_lpn(lpn, logical_pages_);
    OpCost c;
    load(lpn, c);
    return c;
  }

  OpCost handle_read(Lpn lpn) {
    check_lpn(lpn, logical_pages_);
    ++stats_.read_pages;
    OpCost c;
    load(lpn, c);
    if (cached_[lpn] != kNoPage) {
      charged_read(store_.flash(), cached_[lpn], c);
    } else {
      ++stats_.unwritten_reads;
      charged_unwritten_read(store_.flash(), c);
    }
    collect(c);
    return c;
  }

  OpCost handle_write(Lpn lpn) {
    check_lpn(lpn, logical_pages_);
    ++stats_.write_pages;
    OpCost c;
    load(lpn, c);
    if (cached_[lpn] != kNoPage) store_.invalidate(cached_[lpn]);
    cached_[lpn] = store_.append(kData, lpn, c);
    mark_dirty(lpn);
    collect(c);
    return c;
  }

  // Persists every dirty CMT entry, one translation page at a time.
  OpCost final_flush() {
    OpCost c;
    for (std::uint64_t tp = 0; tp < gtd_.size(); ++tp)
      if (tp_dirty_[tp] > 0) write_back(tp, c);
    return c;
  }

  bool cmt_contains(Lpn lpn) const { return in_cmt_.at(lpn) != 0; }
  bool cmt_dirty(Lpn lpn) const { return dirty_.at(lpn) != 0; }
  std::uint64_t cmt_size() const { return cmt_size_; }
  PageNo translation_page(std::uint64_t tp) const { return gtd_.at(tp); }
  // Current mapping, from the CMT when resident, else the flash copy.
  PageNo mapping(Lpn lpn) const {
    return in_cmt_.at(lpn) ? cached_[lpn] : persisted_[lpn];
  }
  PageNo persisted_mapping(Lpn lpn) const { return persisted_.at(lpn); }

  const FlashDevice& flash() const { return store_.flash(); }
  const SchemeStats& stats() const { return stats_; }
  const DftlParams& params() const { return params_; }
  std::uint64_t logical_pages() const { return logical_pages_; }
  std::uint32_t reachable_blocks() const {
    return flash().geometry().block_count;
  }

 private:
  static constexpr std::uint32_t kData = 0;
  static constexpr std::uint32_t kTranslation = 1;
  static constexpr std::uint64_t kTpOwner = std::uint64_t{1} << 63;
  static constexpr Lpn kNil = ~Lpn{0};

  std::uint64_t tp_of(Lpn lpn) const { return lpn / params_.entries_per_tp; }

  void load(Lpn lpn, OpCost& c) {
    if (in_cmt_[lpn]) {
      unlink(lpn);
      push_mru(lpn);
      return;
    }
    if (cmt_size_ >= params_.cmt_capacity) {
      const Lpn victim = head_;
      if (dirty_[victim]) write_back(tp_of(victim), c);
      unlink(victim);
      in_cmt_[victim] = 0;
      --cmt_size_;
    }
    const std::uint64_t tp = tp_of(lpn);
    if (gtd_[tp] != kNoPage) charged_read(store_.flash(), gtd_[tp], c);
    cached_[lpn] = persisted_[lpn];
    dirty_[lpn] = 0;
    in_cmt_[lpn] = 1;
    ++cmt_size_;
    push_mru(lpn);
  }

  void mark_dirty(Lpn lpn) {
    if (!dirty_[lpn]) {
      dirty_[lpn] = 1;
      ++tp_dirty_[tp_of(lpn)];
    }
  }

  // Read-modify-write of one translation page. Every resident entry of that
  // page is written out, so all of them become clean.
  void write_back(std::uint64_t tp, OpCost& c) {
    const PageNo old = gtd_[tp];
    if (old != kNoPage) {
      charged_read(store_.flash(), old, c);
      store_.invalidate(old);
    }
    gtd_[tp] = store_.append(kTranslation, kTpOwner | tp, c);
    const Lpn first = tp * params_.entries_per_tp;
    const Lpn last = std::min<Lpn>(first + params_.entries_per_tp, logical_pages_);
    for (Lpn l = first; l < last; ++l) {
      if (!in_cmt_[l]) continue;
      persisted_[l] = cached_[l];
      dirty_[l] = 0;
    }
    tp_dirty_[tp] = 0;
    tp_pending_[tp] = 0;
  }

  void collect(OpCost& c) {
    store_.collect(
        c,
        [&](std::uint64_t who, PageNo moved, OpCost&) {
          if (who & kTpOwner) {
            gtd_[who & ~kTpOwner] = moved;
          } else if (in_cmt_[who]) {
            cached_[who] = moved;
            mark_dirty(who);
          } else {
            // Mapping only on flash: its translation page must be
            // rewritten once this victim is emptied.
            persisted_[who] = moved;
            tp_pending_[tp_of(who)] = 1;
          }
        },
        [&](OpCost& cost) {
          for (std::uint64_t tp = 0; tp < tp_pending_.size(); ++tp)
            if (tp_pending_[tp]) write_back(tp, cost);
        });
  }

  void unlink(Lpn l) {
    if (prev_[l] != kNil) next_[prev_[l]] = next_[l]; else head_ = next_[l];
    if (next_[l] != kNil) prev_[next_[l]] = prev_[l]; else tail_ = prev_[l];
    prev_[l] = next_[l] = kNil;
  }
  void push_mru(Lpn l) {
    prev_[l] = tail_;
    next_[l] = kNil;
    if (tail_ != kNil) next_[tail_] = l; else head_ = l;
    tail_ = l;
  }

  detail::PageStore store_;
  DftlParams params_;
  std::uint64_t logical_pages_;
  std::vector<PageNo> gtd_;
  std::vector<std::uint32_t> tp_dirty_;
  std::vector<std::uint8_t> tp_pending_;
  std::vector<PageNo> persisted_;  // contents of the flash translation pages
  std::vector<PageNo> cached_;
  std::vector<std::uint8_t> dirty_;
  std::vector<std::uint8_t> in_cmt_;
  std::vector<Lpn> prev_, next_;  // CMT recency list, LRU at head
  Lpn head_ = kNil, tail_ = kNil;
  std::uint64_t cmt_size_ = 0;
  SchemeStats stats_;
};

}  // namespace clash
