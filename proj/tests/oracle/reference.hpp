#pragma once

// Brute-force reference models for small geometries. They share no code
// with the library beyond plain integer types: state is kept in flat
// containers and every decision is recomputed by scanning.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <list>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

namespace oracle {

enum St : char { kFree = 'F', kValid = 'V', kInvalid = 'I' };

struct RefFlash {
  int ppb = 0;
  std::vector<char> st;
  std::vector<int> cur;
  std::vector<int> erased;
  long reads = 0, writes = 0, erases = 0;

  RefFlash() = default;
  RefFlash(int blocks, int pages_per_block)
      : ppb(pages_per_block),
        st(static_cast<std::size_t>(blocks * pages_per_block), kInvalid),
        cur(static_cast<std::size_t>(blocks), pages_per_block),
        erased(static_cast<std::size_t>(blocks), 0) {}

  int blocks() const { return static_cast<int>(cur.size()); }
  void read(int p) {
    if (st.at(p) != kValid) throw std::logic_error("ref: read of non-valid");
    ++reads;
  }
  void read_blank() { ++reads; }
  void write(int p) {
    const int b = p / ppb, o = p % ppb;
    if (st.at(p) != kFree) throw std::logic_error("ref: write to used page");
    // Programming past the cursor leaves the skipped pages unusable.
    if (o < cur[b]) throw std::logic_error("ref: out of order write");
    for (int k = cur[b]; k < o; ++k) st[b * ppb + k] = kInvalid;
    st[p] = kValid;
    cur[b] = o + 1;
    ++writes;
  }
  void erase(int b) {
    for (int k = 0; k < ppb; ++k) st[b * ppb + k] = kFree;
    cur[b] = 0;
    ++erased[b];
    ++erases;
  }
  void invalidate(int p) {
    if (st.at(p) == kFree) throw std::logic_error("ref: invalidate free page");
    st[p] = kInvalid;
  }
  int valid_in(int b) const {
    int n = 0;
    for (int k = 0; k < ppb; ++k) n += st[b * ppb + k] == kValid;
    return n;
  }
  int invalid_in(int b) const {
    int n = 0;
    for (int k = 0; k < cur[b]; ++k) n += st[b * ppb + k] == kInvalid;
    return n;
  }
};

// ---------------------------------------------------------------------------
// Dual-space cache, LRU b-space.

struct RefClash {
  RefFlash f;
  int ppb, pcap, bcap;
  std::set<int> p;
  struct Entry {
    int lbn;
    std::set<int> offs;
    long stamp;
  };
  std::vector<Entry> b;
  long clock = 0;

  RefClash(int blocks, int pages_per_block, int p_capacity, int b_capacity)
      : f(blocks, pages_per_block), ppb(pages_per_block), pcap(p_capacity),
        bcap(b_capacity) {}

  Entry* entry_for(int lbn) {
    for (auto& e : b)
      if (e.lbn == lbn) return &e;
    return nullptr;
  }

  void write(int lpn) {
    if (p.count(lpn)) return;
    if (Entry* e = entry_for(lpn / ppb); e && e->offs.count(lpn % ppb)) {
      e->stamp = ++clock;
      return;
    }
    if (static_cast<int>(p.size()) == pcap) evict();
    p.insert(lpn);
    if (f.st[lpn] == kValid) f.invalidate(lpn);
  }

  void evict() {
    std::map<int, int> per_block;
    for (int lpn : p) ++per_block[lpn / ppb];
    int lbn = -1, n = 0;
    for (auto [blk, cnt] : per_block)
      if (cnt > n) lbn = blk, n = cnt;  // ascending keys keep the lowest on ties
    std::set<int> offs;
    for (auto it = p.begin(); it != p.end();) {
      if (*it / ppb == lbn) {
        offs.insert(*it % ppb);
        it = p.erase(it);
      } else {
        ++it;
      }
    }
    if (Entry* e = entry_for(lbn)) {
      e->offs.insert(offs.begin(), offs.end());
      e->stamp = ++clock;
      return;
    }
    if (static_cast<int>(b.size()) < bcap) {
      b.push_back({lbn, offs, ++clock});
      return;
    }
    int target = -1;
    for (int i = 0; i < static_cast<int>(b.size()); ++i) {
      const int c = static_cast<int>(b[i].offs.size());
      if (c >= n) continue;
      if (target < 0 || c < static_cast<int>(b[target].offs.size()) ||
          (c == static_cast<int>(b[target].offs.size()) && b[i].lbn < b[target].lbn))
        target = i;
    }
    if (target >= 0) {
      for (int o : b[target].offs) p.insert(b[target].lbn * ppb + o);
      b[target] = {lbn, offs, ++clock};
      return;
    }
    flush(lru_index());
    b.push_back({lbn, offs, ++clock});
  }

  int lru_index() const {
    int best = 0;
    for (int i = 1; i < static_cast<int>(b.size()); ++i)
      if (b[i].stamp < b[best].stamp) best = i;
    return best;
  }

  void flush(int idx) {
    const Entry e = b[idx];
    b.erase(b.begin() + idx);
    std::vector<int> keep;
    for (int o = 0; o < ppb; ++o) {
      const int page = e.lbn * ppb + o;
      if (e.offs.count(o)) {
        keep.push_back(o);
      } else if (f.st[page] == kValid) {
        f.read(page);
        keep.push_back(o);
      }
    }
    f.erase(e.lbn);
    for (int o : keep) f.write(e.lbn * ppb + o);
  }

  void final_flush() {
    while (!b.empty()) flush(lru_index());
    std::map<int, std::set<int>> groups;
    for (int lpn : p) groups[lpn / ppb].insert(lpn % ppb);
    p.clear();
    for (auto& [lbn, offs] : groups) {
      b.push_back({lbn, offs, ++clock});
      flush(static_cast<int>(b.size()) - 1);
    }
  }
  const RefFlash& flash() const { return f; }
};

// ---------------------------------------------------------------------------
// Out-of-place allocator with greedy GC, and the two page-mapped FTLs.

struct RefStore {
  RefFlash f;
  int threshold;
  std::deque<int> pool;
  std::vector<int> role;              // -1 pool, else stream
  std::vector<std::optional<int>> front;
  std::vector<long> owner;            // per page
  bool in_gc = false;

  RefStore(int blocks, int ppb, int gc_threshold, int streams)
      : f(blocks, ppb), threshold(gc_threshold),
        role(static_cast<std::size_t>(blocks), -1),
        front(static_cast<std::size_t>(streams)),
        owner(static_cast<std::size_t>(blocks * ppb), -1) {
    for (int i = 0; i < blocks; ++i) pool.push_back(i);
  }

  int append(int stream, long who) {
    auto& fr = front[stream];
    if (!fr || f.cur[*fr] == f.ppb) {
      if (pool.empty()) throw std::runtime_error("ref: out of space");
      const int blk = pool.front();
      pool.pop_front();
      if (f.cur[blk] != 0) f.erase(blk);
      role[blk] = stream;
      fr = blk;
    }
    const int page = *fr * f.ppb + f.cur[*fr];
    f.write(page);
    owner[page] = who;
    return page;
  }

  void drop(int page) {
    f.invalidate(page);
    owner[page] = -1;
  }

  template <class Moved, class Done>
  void gc(Moved moved, Done done) {
    if (in_gc) return;
    in_gc = true;
    while (static_cast<int>(pool.size()) < threshold) {
      int victim = -1;
      for (int blk = 0; blk < f.blocks(); ++blk) {
        bool is_front = false;
        for (auto& fr : front) is_front = is_front || (fr && *fr == blk);
        if (role[blk] < 0 || is_front || f.invalid_in(blk) == 0) continue;
        if (victim < 0 || f.invalid_in(blk) > f.invalid_in(victim) ||
            (f.invalid_in(blk) == f.invalid_in(victim) &&
             f.erased[blk] < f.erased[victim]))
          victim = blk;
      }
      if (victim < 0) break;
      for (int o = 0; o < f.ppb; ++o) {
        const int page = victim * f.ppb + o;
        if (f.st[page] != kValid) continue;
        const long who = owner[page];
        f.read(page);
        const int to = append(role[victim], who);
        drop(page);
        moved(who, to);
      }
      done();
      f.erase(victim);
      role[victim] = -1;
      pool.push_back(victim);
    }
    in_gc = false;
  }
};

struct RefPageMap {
  RefStore s;
  std::map<int, int> l2p;

  RefPageMap(int blocks, int ppb, int threshold) : s(blocks, ppb, threshold, 1) {}

  void write(int lpn) {
    if (auto it = l2p.find(lpn); it != l2p.end()) s.drop(it->second);
    l2p[lpn] = s.append(0, lpn);
    s.gc([&](long who, int to) { l2p[static_cast<int>(who)] = to; }, [] {});
  }
  void final_flush() {}
  const RefFlash& flash() const { return s.f; }
};

struct RefDftl {
  static constexpr long kTp = 1L << 40;
  RefStore s;
  int cap, per_tp;
  std::list<int> lru;            // front = least recent
  std::map<int, int> cached;     // resident mapping (-1 none)
  std::set<int> dirty;
  std::map<int, int> on_flash;   // mapping stored in translation pages
  std::map<int, int> gtd;        // tp -> page
  std::set<int> pending;

  RefDftl(int blocks, int ppb, int threshold, int cmt, int entries_per_tp)
      : s(blocks, ppb, threshold, 2), cap(cmt), per_tp(entries_per_tp) {}

  int flash_map(int lpn) const {
    auto it = on_flash.find(lpn);
    return it == on_flash.end() ? -1 : it->second;
  }

  void persist(int tp) {
    if (auto it = gtd.find(tp); it != gtd.end()) {
      s.f.read(it->second);
      s.drop(it->second);
    }
    gtd[tp] = s.append(1, kTp + tp);
    for (int lpn : lru) {
      if (lpn / per_tp != tp) continue;
      on_flash[lpn] = cached[lpn];
      dirty.erase(lpn);
    }
    pending.erase(tp);
  }

  void fetch(int lpn) {
    auto it = std::find(lru.begin(), lru.end(), lpn);
    if (it != lru.end()) {
      lru.erase(it);
      lru.push_back(lpn);
      return;
    }
    if (static_cast<int>(lru.size()) == cap) {
      const int old = lru.front();
      if (dirty.count(old)) persist(old / per_tp);
      lru.pop_front();
      cached.erase(old);
      dirty.erase(old);
    }
    if (auto g = gtd.find(lpn / per_tp); g != gtd.end()) s.f.read(g->second);
    cached[lpn] = flash_map(lpn);
    lru.push_back(lpn);
  }

  void write(int lpn) {
    fetch(lpn);
    if (cached[lpn] >= 0) s.drop(cached[lpn]);
    cached[lpn] = s.append(0, lpn);
    dirty.insert(lpn);
    s.gc(
        [&](long who, int to) {
          if (who >= kTp) {
            gtd[static_cast<int>(who - kTp)] = to;
          } else if (cached.count(static_cast<int>(who))) {
            cached[static_cast<int>(who)] = to;
            dirty.insert(static_cast<int>(who));
          } else {
            on_flash[static_cast<int>(who)] = to;
            pending.insert(static_cast<int>(who) / per_tp);
          }
        },
        [&] {
          const std::set<int> todo = pending;
          for (int tp : todo) persist(tp);
        });
  }

  void final_flush() {
    std::set<int> tps;
    for (int lpn : dirty) tps.insert(lpn / per_tp);
    for (int tp : tps) persist(tp);
  }
  const RefFlash& flash() const { return s.f; }
};

// ---------------------------------------------------------------------------
// Hybrid log-block FTL with one sequential and n random log blocks.

struct RefFast {
  RefFlash f;
  int nrw;
  std::deque<int> pool;
  std::map<int, int> data;      // lbn -> block
  std::optional<std::pair<int, int>> sw;  // (block, lbn)
  std::deque<int> rw;
  std::map<int, int> loc;       // lpn -> freshest page
  std::map<int, int> who;       // rw log page -> lpn

  RefFast(int blocks, int ppb, int rw_logs) : f(blocks, ppb), nrw(rw_logs) {
    for (int i = 0; i < blocks; ++i) pool.push_back(i);
  }

  int take() {
    if (pool.empty()) throw std::runtime_error("ref: out of space");
    const int blk = pool.front();
    pool.pop_front();
    if (f.cur[blk] != 0) f.erase(blk);
    return blk;
  }
  void retire(int blk) {
    if (f.valid_in(blk)) throw std::logic_error("ref: retiring live block");
    f.erase(blk);
    pool.push_back(blk);
  }
  void move(int lpn, int blk, int off) {
    auto it = loc.find(lpn);
    if (it == loc.end()) return;
    f.read(it->second);
    f.invalidate(it->second);
    const int to = blk * f.ppb + off;
    f.write(to);
    it->second = to;
  }

  void merge_block(int lbn) {
    const int dest = take();
    for (int o = 0; o < f.ppb; ++o) move(lbn * f.ppb + o, dest, o);
    if (data.count(lbn)) retire(data[lbn]);
    if (sw && sw->second == lbn) {
      retire(sw->first);
      sw.reset();
    }
    if (f.cur[dest] == 0) {
      data.erase(lbn);
      pool.push_back(dest);
    } else {
      data[lbn] = dest;
    }
  }

  void close_sw() {
    const auto [blk, lbn] = *sw;
    const int filled = f.cur[blk];
    for (int o = 0; o < filled; ++o) {
      if (f.st[blk * f.ppb + o] != kValid) {
        merge_block(lbn);
        return;
      }
    }
    for (int o = filled; o < f.ppb; ++o) move(lbn * f.ppb + o, blk, o);
    sw.reset();
    if (data.count(lbn)) retire(data[lbn]);
    data[lbn] = blk;
  }

  void reclaim_rw() {
    const int log = rw.front();
    std::set<int> lbns;
    for (int o = 0; o < f.cur[log]; ++o) {
      const int page = log * f.ppb + o;
      if (f.st[page] == kValid) lbns.insert(who[page] / f.ppb);
    }
    for (int lbn : lbns) merge_block(lbn);
    rw.pop_front();
    retire(log);
  }

  void write(int lpn) {
    const int lbn = lpn / f.ppb, off = lpn % f.ppb;
    if (auto it = loc.find(lpn); it != loc.end()) {
      f.invalidate(it->second);
      loc.erase(it);
    }
    if (off == 0) {
      if (sw) close_sw();
      const int blk = take();
      sw = {blk, lbn};
      f.write(blk * f.ppb);
      loc[lpn] = blk * f.ppb;
      return;
    }
    if (sw && sw->second == lbn && f.cur[sw->first] == off) {
      const int page = sw->first * f.ppb + off;
      f.write(page);
      loc[lpn] = page;
      if (f.cur[sw->first] == f.ppb) close_sw();
      return;
    }
    if (rw.empty() || f.cur[rw.back()] == f.ppb) {
      if (static_cast<int>(rw.size()) >= nrw) reclaim_rw();
      rw.push_back(take());
    }
    const int page = rw.back() * f.ppb + f.cur[rw.back()];
    f.write(page);
    loc[lpn] = page;
    who[page] = lpn;
  }
  void final_flush() {}
  const RefFlash& flash() const { return f; }
};

}  // namespace oracle
