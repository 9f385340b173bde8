#pragma once

// Dual-space flash cache. The page space (p-space) holds individual pages
// from any block; the block space (b-space) holds whole logical blocks that
// map directly onto physical blocks. Pages only reach the flash through a
// b-space flush, which always rewrites a complete block.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "clash/flash.hpp"
#include "clash/scheme_common.hpp"

namespace clash {

enum class BPolicy { Lru, Fifo, Lfu };

inline const char* to_string(BPolicy p) {
  switch (p) {
    case BPolicy::Lru: return "lru";
    case BPolicy::Fifo: return "fifo";
    case BPolicy::Lfu: return "lfu";
  }
  return "?";
}

inline BPolicy parse_bpolicy(const std::string& s) {
  if (s == "lru") return BPolicy::Lru;
  if (s == "fifo") return BPolicy::Fifo;
  if (s == "lfu") return BPolicy::Lfu;
  throw std::invalid_argument("unknown b-space policy '" + s + "'");
}

struct CacheConfig {
  std::uint32_t p_capacity_pages = 128;
  std::uint32_t b_capacity_blocks = 2;
  BPolicy b_policy = BPolicy::Lru;

  void validate() const {
    if (p_capacity_pages < 1 || b_capacity_blocks < 1)
      throw std::invalid_argument(
          "cache needs at least one p-space page and one b-space block");
  }
  bool operator==(const CacheConfig&) const = default;
};

// Bookkeeping estimate: one lpn per p-space slot, and per b-space slot a
// block number plus a presence bitmap.
inline std::uint64_t cache_metadata_bytes(const CacheConfig& cfg,
                                          std::uint32_t pages_per_block) {
  return std::uint64_t{cfg.p_capacity_pages} * 4 +
         std::uint64_t{cfg.b_capacity_blocks} * (4 + (pages_per_block + 7) / 8);
}

struct BlockEntry {
  BlockNo lbn = 0;
  std::vector<bool> present;
  std::uint32_t count = 0;
  std::uint64_t recency = 0;   // last hit or insertion
  std::uint64_t inserted = 0;  // insertion stamp (FIFO)
  std::uint64_t hits = 0;      // LFU

  bool operator==(const BlockEntry&) const = default;
};

struct VictimSet {
  BlockNo lbn = 0;
  std::vector<Lpn> pages;  // ascending
};

enum class CacheEventKind {
  PlaceFree,   // victims copied into an empty b-space slot
  PlaceMerge,  // victims joined a b-space entry of the same logical block
  Switch,      // b-space block swapped with a larger p-space victim set
  Flush,       // b-space block written back to the flash
};

struct CacheEvent {
  CacheEventKind kind;
  BlockNo lbn = 0;           // block placed into b-space, or flushed
  std::uint32_t pages = 0;   // victims placed, or pages written by a flush
  BlockNo switched_out = 0;  // Switch: block whose pages went back to p-space
  std::uint32_t p_free_before = 0;
  std::uint32_t p_free_after = 0;
  OpCost cost;
};

class ClashCache {
 public:
  using Observer = std::function<void(const CacheEvent&)>;

  ClashCache(FlashGeometry physical, LatencyParams latency,
             std::uint64_t logical_pages, CacheConfig cfg)
      : flash_(physical, latency), cfg_(cfg), logical_pages_(logical_pages) {
    cfg_.validate();
    if (logical_pages_ == 0 || logical_pages_ > physical.page_count() ||
        logical_pages_ % physical.pages_per_block != 0)
      throw std::invalid_argument(
          "logical space must be a whole number of blocks within the device");
    where_.assign(logical_pages_, Where::None);
    p_per_block_.assign(logical_blocks(), 0);
    p_pages_.reserve(cfg_.p_capacity_pages);
  }

  OpCost handle_read(Lpn lpn) {
    check_lpn(lpn, logical_pages_);
    ++stats_.read_pages;
    switch (where_[lpn]) {
      case Where::P:
        ++stats_.read_hits;
        return {};
      case Where::B:
        ++stats_.read_hits;
        touch(*find_entry(block_of(lpn)));
        return {};
      case Where::None:
        break;
    }
    OpCost c;
    if (flash_.is_valid(lpn)) {
      charged_read(flash_, lpn, c);
    } else {
      ++stats_.unwritten_reads;
      charged_unwritten_read(flash_, c);
    }
    return c;
  }

  OpCost handle_write(Lpn lpn) {
    check_lpn(lpn, logical_pages_);
    ++stats_.write_pages;
    switch (where_[lpn]) {
      case Where::P:
        ++stats_.write_hits;
        return {};
      case Where::B:
        ++stats_.write_hits;
        touch(*find_entry(block_of(lpn)));
        return {};
      case Where::None:
        break;
    }
    OpCost c;
    if (p_pages_.size() >= cfg_.p_capacity_pages)
      c += place_victims(select_pspace_victims());
    insert_p(lpn);
    if (flash_.is_valid(lpn)) flash_.invalidate_page(lpn);
    return c;
  }

  // The logical block with the most pages in p-space, ties to the lowest
  // block number, together with all of its p-space pages.
  VictimSet select_pspace_victims() const {
    if (p_pages_.empty()) throw std::logic_error("p-space is empty");
    BlockNo best = 0;
    std::uint32_t best_count = 0;
    for (Lpn lpn : p_pages_) {
      const BlockNo b = block_of(lpn);
      const std::uint32_t n = p_per_block_[b];
      if (n > best_count || (n == best_count && b < best)) {
        best = b;
        best_count = n;
      }
    }
    VictimSet v{best, {}};
    v.pages.reserve(best_count);
    for (Lpn lpn : p_pages_)
      if (block_of(lpn) == best) v.pages.push_back(lpn);
    std::sort(v.pages.begin(), v.pages.end());
    return v;
  }

  // Moves a victim set out of p-space into b-space. Only the flush path (no free
  // slot and no smaller block to switch with) touches the flash.
  OpCost place_victims(const VictimSet& victims) {
    const auto n = static_cast<std::uint32_t>(victims.pages.size());
    CacheEvent ev;
    ev.kind = CacheEventKind::PlaceFree;
    ev.lbn = victims.lbn;
    ev.pages = n;
    ev.p_free_before = p_free();
    remove_p(victims);

    if (BlockEntry* same = find_entry(victims.lbn)) {
      // The block is already staged; the two page sets cannot both be
      // flushed to the same physical block independently.
      for (Lpn lpn : victims.pages) set_present(*same, lpn);
      touch_insert(*same);
      ev.kind = CacheEventKind::PlaceMerge;
    } else if (b_.size() < cfg_.b_capacity_blocks) {
      b_.push_back(make_entry(victims));
    } else if (BlockEntry* target = switch_target(n)) {
      ev.kind = CacheEventKind::Switch;
      ev.switched_out = target->lbn;
      BlockEntry out = std::move(*target);
      *target = make_entry(victims);
      for (std::uint32_t o = 0; o < pages_per_block(); ++o)
        if (out.present[o]) insert_p(first_lpn(out.lbn) + o);
    } else {
      const std::size_t idx = flush_victim_index();
      ev.cost = flush_entry(idx);
      b_.push_back(make_entry(victims));
    }
    ev.p_free_after = p_free();
    notify(ev);
    return ev.cost;
  }

  // Flushes the b-space block chosen by the replacement policy.
  OpCost flush_lru_block() {
    if (b_.empty()) throw std::logic_error("b-space is empty");
    return flush_entry(flush_victim_index());
  }

  // Writes every cached page back: b-space blocks in eviction order, then
  // the p-space grouped by block in ascending block order.
  OpCost final_flush() {
    OpCost c;
    while (!b_.empty()) c += flush_lru_block();
    std::vector<Lpn> pages = p_pages_;
    std::sort(pages.begin(), pages.end());
    std::size_t i = 0;
    while (i < pages.size()) {
      VictimSet group{block_of(pages[i]), {}};
      while (i < pages.size() && block_of(pages[i]) == group.lbn)
        group.pages.push_back(pages[i++]);
      remove_p(group);
      b_.push_back(make_entry(group));
      c += flush_entry(b_.size() - 1);
    }
    return c;
  }

  // State inspection.
  enum class Where : std::uint8_t { None, P, B };
  Where locate(Lpn lpn) const { return where_.at(lpn); }
  std::vector<Lpn> p_pages() const {
    std::vector<Lpn> v = p_pages_;
    std::sort(v.begin(), v.end());
    return v;
  }
  const std::vector<BlockEntry>& b_entries() const { return b_; }
  std::uint32_t p_free() const {
    return cfg_.p_capacity_pages - static_cast<std::uint32_t>(p_pages_.size());
  }

  const FlashDevice& flash() const { return flash_; }
  const CacheConfig& config() const { return cfg_; }
  const SchemeStats& stats() const { return stats_; }
  std::uint64_t logical_pages() const { return logical_pages_; }
  std::uint32_t reachable_blocks() const { return logical_blocks(); }
  std::uint64_t metadata_bytes() const {
    return cache_metadata_bytes(cfg_, pages_per_block());
  }
  void set_observer(Observer obs) { observer_ = std::move(obs); }

  // Cache contents and flash state, ignoring counters and the observer.
  // Cache contents and flash contents match; read counters may differ.
  bool same_state(const ClashCache& o) const {
    return where_ == o.where_ && p_pages() == o.p_pages() && b_ == o.b_ &&
           std::ranges::equal(flash_.page_states(), o.flash_.page_states()) &&
           std::ranges::equal(flash_.erase_histogram(), o.flash_.erase_histogram()) &&
           flash_.writes() == o.flash_.writes();
  }

 private:
  std::uint32_t pages_per_block() const {
    return flash_.geometry().pages_per_block;
  }
  std::uint32_t logical_blocks() const {
    return static_cast<std::uint32_t>(logical_pages_ / pages_per_block());
  }
  BlockNo block_of(Lpn lpn) const {
    return static_cast<BlockNo>(lpn / pages_per_block());
  }
  Lpn first_lpn(BlockNo lbn) const { return Lpn{lbn} * pages_per_block(); }

  void insert_p(Lpn lpn) {
    p_pages_.push_back(lpn);
    where_[lpn] = Where::P;
    ++p_per_block_[block_of(lpn)];
  }

  void remove_p(const VictimSet& v) {
    std::erase_if(p_pages_,
                  [&](Lpn lpn) { return block_of(lpn) == v.lbn; });
    p_per_block_[v.lbn] = 0;
    for (Lpn lpn : v.pages) where_[lpn] = Where::None;
  }

  void set_present(BlockEntry& e, Lpn lpn) {
    const auto off = static_cast<std::uint32_t>(lpn % pages_per_block());
    if (!e.present[off]) {
      e.present[off] = true;
      ++e.count;
    }
    where_[lpn] = Where::B;
  }

  BlockEntry make_entry(const VictimSet& v) {
    BlockEntry e;
    e.lbn = v.lbn;
    e.present.assign(pages_per_block(), false);
    for (Lpn lpn : v.pages) set_present(e, lpn);
    e.inserted = e.recency = ++clock_;
    return e;
  }

  void touch(BlockEntry& e) {
    e.recency = ++clock_;
    ++e.hits;
  }
  void touch_insert(BlockEntry& e) { e.recency = ++clock_; }

  BlockEntry* find_entry(BlockNo lbn) {
    for (auto& e : b_)
      if (e.lbn == lbn) return &e;
    return nullptr;
  }

  // Fewest cached pages among blocks holding strictly fewer than n, ties to
  // the lowest block number.
  BlockEntry* switch_target(std::uint32_t n) {
    BlockEntry* best = nullptr;
    for (auto& e : b_) {
      if (e.count >= n) continue;
      if (!best || e.count < best->count ||
          (e.count == best->count && e.lbn < best->lbn))
        best = &e;
    }
    return best;
  }

  std::size_t flush_victim_index() const {
    auto key = [&](const BlockEntry& e) {
      switch (cfg_.b_policy) {
        case BPolicy::Lru: return std::pair{e.recency, std::uint64_t{0}};
        case BPolicy::Fifo: return std::pair{e.inserted, std::uint64_t{0}};
        case BPolicy::Lfu: return std::pair{e.hits, e.recency};
      }
      return std::pair{e.recency, std::uint64_t{0}};
    };
    std::size_t best = 0;
    for (std::size_t i = 1; i < b_.size(); ++i)
      if (key(b_[i]) < key(b_[best])) best = i;
    return best;
  }

  // Late merge: pages of the block still valid on the flash are read, the
  // physical block is erased, and the union is programmed in offset order.
  OpCost flush_entry(std::size_t idx) {
    BlockEntry e = std::move(b_[idx]);
    b_.erase(b_.begin() + static_cast<std::ptrdiff_t>(idx));

    const std::uint32_t ppb = pages_per_block();
    const PageNo base = first_lpn(e.lbn);
    OpCost c;
    std::vector<bool> keep = e.present;
    for (std::uint32_t o = 0; o < ppb; ++o) {
      if (!e.present[o] && flash_.is_valid(base + o)) {
        charged_read(flash_, base + o, c);
        keep[o] = true;
      }
    }
    charged_erase(flash_, e.lbn, c);
    std::uint32_t written = 0;
    for (std::uint32_t o = 0; o < ppb; ++o) {
      if (!keep[o]) continue;
      if (flash_.write_cursor(e.lbn) != o) flash_.skip_to(base + o);
      charged_write(flash_, base + o, c);
      ++written;
      if (e.present[o]) where_[base + o] = Where::None;
    }

    CacheEvent ev;
    ev.kind = CacheEventKind::Flush;
    ev.lbn = e.lbn;
    ev.pages = written;
    ev.p_free_before = ev.p_free_after = p_free();
    ev.cost = c;
    notify(ev);
    return c;
  }

  void notify(const CacheEvent& ev) const {
    if (observer_) observer_(ev);
  }

  FlashDevice flash_;
  CacheConfig cfg_;
  std::uint64_t logical_pages_;
  std::vector<Where> where_;
  std::vector<Lpn> p_pages_;
  std::vector<std::uint32_t> p_per_block_;
  std::vector<BlockEntry> b_;
  std::uint64_t clock_ = 0;
  SchemeStats stats_;
  Observer observer_;
};

}  // namespace clash
