#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "clash/flash.hpp"

namespace clash {

// Live data no longer fits in the physical space left to an FTL.
class CapacityExhausted : public std::runtime_error {
 public:
  explicit CapacityExhausted(const std::string& who)
      : std::runtime_error(who + ": physical capacity exhausted") {}
};

// Per-scheme counters that are not visible on the flash device itself.
struct SchemeStats {
  std::uint64_t read_pages = 0;
  std::uint64_t write_pages = 0;
  std::uint64_t read_hits = 0;   // served without touching the flash
  std::uint64_t write_hits = 0;  // absorbed without touching the flash
  std::uint64_t unwritten_reads = 0;

  bool operator==(const SchemeStats&) const = default;
};

inline void check_lpn(Lpn lpn, std::uint64_t logical_pages) {
  if (lpn >= logical_pages)
    throw std::out_of_range("lpn " + std::to_string(lpn) +
                            " outside logical space of " +
                            std::to_string(logical_pages) + " pages");
}

}  // namespace clash
