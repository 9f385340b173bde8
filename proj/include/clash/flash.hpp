#pragma once

// Raw NAND device model: geometry, per-page state, fixed-latency operations
// and per-block erase accounting. Data payloads are not stored.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace clash {

using Lpn = std::uint64_t;     // logical page number
using PageNo = std::uint64_t;  // physical page number
using BlockNo = std::uint32_t;

inline constexpr PageNo kNoPage = ~PageNo{0};

struct FlashGeometry {
  std::uint32_t page_size_bytes = 2048;
  std::uint32_t pages_per_block = 64;
  std::uint32_t block_count = 8192;

  std::uint64_t page_count() const {
    return std::uint64_t{block_count} * pages_per_block;
  }
  std::uint64_t block_size_bytes() const {
    return std::uint64_t{page_size_bytes} * pages_per_block;
  }
  BlockNo block_of(PageNo p) const {
    return static_cast<BlockNo>(p / pages_per_block);
  }
  std::uint32_t offset_of(PageNo p) const {
    return static_cast<std::uint32_t>(p % pages_per_block);
  }
  PageNo page_at(BlockNo b, std::uint32_t offset) const {
    return PageNo{b} * pages_per_block + offset;
  }

  void validate() const {
    if (page_size_bytes == 0 || pages_per_block == 0 || block_count == 0)
      throw std::invalid_argument("flash geometry fields must be positive");
  }

  bool operator==(const FlashGeometry&) const = default;
};

// Microseconds.
struct LatencyParams {
  double read_us = 130.9;
  double write_us = 405.9;
  double erase_us = 2000.0;

  void validate() const {
    if (!(read_us > 0) || !(write_us > 0) || !(erase_us > 0))
      throw std::invalid_argument("flash latencies must be strictly positive");
  }

  bool operator==(const LatencyParams&) const = default;
};

enum class PageState : std::uint8_t { Free, Valid, Invalid };

enum class FlashErrc {
  OutOfRange,
  ReadOfNonValidPage,
  SequentialViolation,
  NotErased,
  InvalidateFreePage,
};

inline const char* to_string(FlashErrc e) {
  switch (e) {
    case FlashErrc::OutOfRange: return "OutOfRange";
    case FlashErrc::ReadOfNonValidPage: return "ReadOfNonValidPage";
    case FlashErrc::SequentialViolation: return "SequentialViolation";
    case FlashErrc::NotErased: return "NotErased";
    case FlashErrc::InvalidateFreePage: return "InvalidateFreePage";
  }
  return "?";
}

// Raised for operations a correct caller never issues; a run that sees one
// is aborted.
class FlashError : public std::logic_error {
 public:
  FlashError(FlashErrc code, std::uint64_t addr)
      : std::logic_error(std::string("flash: ") + to_string(code) + " at " +
                         std::to_string(addr)),
        code_(code) {}
  FlashErrc code() const { return code_; }

 private:
  FlashErrc code_;
};

// Aggregated device work for one cache/FTL operation.
struct OpCost {
  std::uint64_t flash_reads = 0;
  std::uint64_t flash_writes = 0;
  std::uint64_t flash_erases = 0;
  double latency_us = 0;

  bool no_flash_ops() const {
    return flash_reads == 0 && flash_writes == 0 && flash_erases == 0;
  }

  OpCost& operator+=(const OpCost& o) {
    flash_reads += o.flash_reads;
    flash_writes += o.flash_writes;
    flash_erases += o.flash_erases;
    latency_us += o.latency_us;
    return *this;
  }
  friend OpCost operator+(OpCost a, const OpCost& b) { return a += b; }
  bool operator==(const OpCost&) const = default;
};

class FlashDevice {
 public:
  FlashDevice() = default;

  // The device starts completely dirty: every page Invalid, every write
  // cursor at the end of its block, so the first program of any block needs
  // a prior erase.
  FlashDevice(FlashGeometry geometry, LatencyParams latency)
      : geo_(geometry), lat_(latency) {
    geo_.validate();
    lat_.validate();
    state_.assign(geo_.page_count(), PageState::Invalid);
    cursor_.assign(geo_.block_count, geo_.pages_per_block);
    valid_.assign(geo_.block_count, 0);
    erase_count_.assign(geo_.block_count, 0);
  }

  const FlashGeometry& geometry() const { return geo_; }
  const LatencyParams& latency() const { return lat_; }

  double read_page(PageNo addr) {
    check_page(addr);
    if (state_[addr] != PageState::Valid)
      throw FlashError(FlashErrc::ReadOfNonValidPage, addr);
    ++reads_;
    return lat_.read_us;
  }

  // A read whose target holds no valid data (never written on the dirty
  // device). The controller still issues the page read, so it is charged.
  double read_unwritten() {
    ++reads_;
    return lat_.read_us;
  }

  double write_page(PageNo addr) {
    check_page(addr);
    if (state_[addr] != PageState::Free)
      throw FlashError(FlashErrc::NotErased, addr);
    const BlockNo b = geo_.block_of(addr);
    if (geo_.offset_of(addr) != cursor_[b])
      throw FlashError(FlashErrc::SequentialViolation, addr);
    state_[addr] = PageState::Valid;
    ++cursor_[b];
    ++valid_[b];
    ++writes_;
    return lat_.write_us;
  }

  // Leave the Free pages in [cursor, addr) unprogrammed and move the cursor
  // to addr. Skipped pages are unusable until the next erase, so they become
  // Invalid. Zero latency: nothing is programmed.
  void skip_to(PageNo addr) {
    check_page(addr);
    const BlockNo b = geo_.block_of(addr);
    const std::uint32_t off = geo_.offset_of(addr);
    if (off < cursor_[b]) throw FlashError(FlashErrc::NotErased, addr);
    for (std::uint32_t o = cursor_[b]; o < off; ++o)
      state_[geo_.page_at(b, o)] = PageState::Invalid;
    cursor_[b] = off;
  }

  double erase_block(BlockNo block) {
    if (block >= geo_.block_count)
      throw FlashError(FlashErrc::OutOfRange, block);
    const PageNo first = geo_.page_at(block, 0);
    for (std::uint32_t o = 0; o < geo_.pages_per_block; ++o)
      state_[first + o] = PageState::Free;
    cursor_[block] = 0;
    valid_[block] = 0;
    ++erase_count_[block];
    ++erases_;
    return lat_.erase_us;
  }

  void invalidate_page(PageNo addr) {
    check_page(addr);
    switch (state_[addr]) {
      case PageState::Free:
        throw FlashError(FlashErrc::InvalidateFreePage, addr);
      case PageState::Valid:
        state_[addr] = PageState::Invalid;
        --valid_[geo_.block_of(addr)];
        break;
      case PageState::Invalid:
        break;
    }
  }

  PageState state(PageNo addr) const {
    check_page(addr);
    return state_[addr];
  }
  bool is_valid(PageNo addr) const { return state(addr) == PageState::Valid; }
  std::uint32_t write_cursor(BlockNo b) const { return cursor_.at(b); }
  std::uint32_t valid_pages(BlockNo b) const { return valid_.at(b); }
  std::uint32_t invalid_pages(BlockNo b) const {
    return cursor_.at(b) - valid_.at(b);
  }
  std::uint32_t erase_count(BlockNo b) const { return erase_count_.at(b); }

  std::span<const std::uint32_t> erase_histogram() const {
    return erase_count_;
  }
  std::span<const PageState> page_states() const { return state_; }

  std::uint64_t reads() const { return reads_; }
  std::uint64_t writes() const { return writes_; }
  std::uint64_t erases() const { return erases_; }

  bool operator==(const FlashDevice& o) const {
    return geo_ == o.geo_ && state_ == o.state_ && cursor_ == o.cursor_ &&
           erase_count_ == o.erase_count_ && reads_ == o.reads_ &&
           writes_ == o.writes_ && erases_ == o.erases_;
  }

 private:
  void check_page(PageNo addr) const {
    if (addr >= state_.size()) throw FlashError(FlashErrc::OutOfRange, addr);
  }

  FlashGeometry geo_;
  LatencyParams lat_;
  std::vector<PageState> state_;
  std::vector<std::uint32_t> cursor_;
  std::vector<std::uint32_t> valid_;
  std::vector<std::uint32_t> erase_count_;
  std::uint64_t reads_ = 0;
  std::uint64_t writes_ = 0;
  std::uint64_t erases_ = 0;
};

// Cost-accumulating wrappers used by every scheme.
inline void charged_read(FlashDevice& f, PageNo p, OpCost& c) {
  c.latency_us += f.read_page(p);
  ++c.flash_reads;
}
inline void charged_unwritten_read(FlashDevice& f, OpCost& c) {
  c.latency_us += f.read_unwritten();
  ++c.flash_reads;
}
inline void charged_write(FlashDevice& f, PageNo p, OpCost& c) {
  c.latency_us += f.write_page(p);
  ++c.flash_writes;
}
inline void charged_erase(FlashDevice& f, BlockNo b, OpCost& c) {
  c.latency_us += f.erase_block(b);
  ++c.flash_erases;
}

}  // namespace clash
