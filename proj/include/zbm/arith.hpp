#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "zbm/numeric.hpp"
#include "zbm/version.hpp"

namespace zbm {

inline constexpr std::uint64_t kSieveLimitMax = 1ull << 40;

namespace detail {

// Odd-only segmented Eratosthenes. Calls fn(p) for each prime <= limit in
// ascending order.
template <typename Fn>
void sieve_visit(std::uint64_t limit, Fn&& fn) {
  if (limit > kSieveLimitMax)
    throw capacity_error("sieve limit above 2^40 capacity bound");
  if (limit >= 2) fn(2);
  if (limit < 3) return;

  std::uint64_t root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(limit)));
  while ((root + 1) * (root + 1) <= limit) ++root;
  while (root * root > limit) --root;

  // Small odd primes <= sqrt(limit) by a plain sieve.
  std::vector<std::uint8_t> small(root / 2 + 1, 1);  // small[i] ~ 2i+1
  for (std::uint64_t i = 1; (2 * i + 1) * (2 * i + 1) <= root; ++i)
    if (small[i])
      for (std::uint64_t j = ((2 * i + 1) * (2 * i + 1)) / 2; j < small.size(); j += 2 * i + 1)
        small[j] = 0;
  std::vector<std::uint64_t> base;
  for (std::uint64_t i = 1; 2 * i + 1 <= root; ++i)
    if (small[i]) base.push_back(2 * i + 1);

  constexpr std::uint64_t kSegment = 1u << 20;  // odd numbers per segment
  std::vector<std::uint8_t> seg(kSegment);
  std::vector<std::uint64_t> next(base.size());
  for (std::size_t k = 0; k < base.size(); ++k) next[k] = (base[k] * base[k]) / 2;

  for (std::uint64_t low = 1; 2 * low + 1 <= limit; low += kSegment) {
    std::uint64_t high = std::min(low + kSegment, (limit - 1) / 2 + 1);
    std::fill(seg.begin(), seg.begin() + (high - low), 1);
    for (std::size_t k = 0; k < base.size(); ++k) {
      std::uint64_t j = next[k];
      for (; j < high; j += base[k]) seg[j - low] = 0;
      next[k] = j;
    }
    for (std::uint64_t j = low; j < high; ++j)
      if (seg[j - low]) fn(2 * j + 1);
  }
}

}  // namespace detail

// Ascending primes <= limit plus pi(limit).
struct PrimeTable {
  std::uint64_t limit = 0;
  std::vector<std::uint64_t> primes;

  std::size_t prime_count() const { return primes.size(); }
};

template <typename Fn>
void for_each_prime(std::uint64_t limit, Fn&& fn) {
  detail::sieve_visit(limit, fn);
}

inline PrimeTable sieve(std::uint64_t limit) {
  if (limit > kSieveLimitMax)
    throw capacity_error("sieve limit above 2^40 capacity bound");
  PrimeTable table;
  table.limit = limit;
  if (limit >= 2) {
    double ld = static_cast<double>(std::max<std::uint64_t>(limit, 17));
    table.primes.reserve(static_cast<std::size_t>(1.15 * ld / std::log(ld)) + 8);
  }
  detail::sieve_visit(limit, [&](std::uint64_t p) { table.primes.push_back(p); });
  return table;
}

// log p if n = p^k, else 0.
inline double von_mangoldt(std::uint64_t n) {
  if (n < 2) return 0.0;
  std::uint64_t p = 0;
  if (n % 2 == 0) {
    p = 2;
  } else {
    for (std::uint64_t d = 3; d * d <= n; d += 2)
      if (n % d == 0) {
        p = d;
        break;
      }
    if (p == 0) return std::log(static_cast<double>(n));  // n prime
  }
  while (n % p == 0) n /= p;
  return n == 1 ? std::log(static_cast<double>(p)) : 0.0;
}

enum class MollifierNorm {
  selberg,        // denominator 2 log^2 x: continuous at x and x^2, zero at x^3
  paper_literal,  // denominator log^2 n: discontinuous at n = x (kept for comparison)
};

// Selberg's smoothed von Mangoldt weight, supported on prime powers <= x^3.
inline double lambda_x(std::uint64_t n, double x,
                       MollifierNorm norm = MollifierNorm::selberg) {
  if (!(x > 1.0)) throw domain_error("lambda_x requires x > 1");
  double vm = von_mangoldt(n);
  if (vm == 0.0) return 0.0;
  double nd = static_cast<double>(n);
  if (nd <= x) return vm;
  double x3 = x * x * x;
  if (nd > x3) return 0.0;
  double logn = std::log(nd);
  double logx = std::log(x);
  double la = 3.0 * logx - logn;  // log(x^3 / n)
  double denom = (norm == MollifierNorm::selberg) ? 2.0 * logx * logx : logn * logn;
  if (nd <= x * x) {
    double lb = 2.0 * logx - logn;  // log(x^2 / n)
    return vm * (la * la - 2.0 * lb * lb) / denom;
  }
  return vm * (la * la) / denom;
}

// Streams (n, weight, log p) over all prime powers n = p^k <= x^3 with
// positive weight, in no particular order across k.
template <typename Fn>
void for_each_mollifier_entry(double x, Fn&& fn,
                              MollifierNorm norm = MollifierNorm::selberg) {
  if (!(x > 2.0)) throw domain_error("mollifier requires x > 2");
  double x3 = x * x * x;
  if (x3 > static_cast<double>(kSieveLimitMax))
    throw capacity_error("mollifier support above sieve capacity");
  auto limit = static_cast<std::uint64_t>(x3);
  double logx = std::log(x);
  for_each_prime(limit, [&](std::uint64_t p) {
    double logp = std::log(static_cast<double>(p));
    for (std::uint64_t n = p; n <= limit; ) {
      double nd = static_cast<double>(n);
      double w;
      if (nd <= x) {
        w = logp;
      } else {
        double logn = std::log(nd);
        double la = 3.0 * logx - logn;
        double denom = (norm == MollifierNorm::selberg) ? 2.0 * logx * logx
                                                        : logn * logn;
        if (nd <= x * x) {
          double lb = 2.0 * logx - logn;
          w = logp * (la * la - 2.0 * lb * lb) / denom;
        } else {
          w = logp * (la * la) / denom;
        }
      }
      if (w > 0.0) fn(n, w, logp);
      if (n > limit / p) break;
      n *= p;
    }
  });
}

// Materialized mollifier: every prime power n <= x^3 with Lambda_x(n) > 0,
// ascending in n.
struct MollifierTable {
  double x = 0.0;
  MollifierNorm norm = MollifierNorm::selberg;
  struct Entry {
    std::uint64_t n;
    double weight;
  };
  std::vector<Entry> entries;
};

inline MollifierTable build_mollifier(double x,
                                      MollifierNorm norm = MollifierNorm::selberg) {
  MollifierTable table;
  table.x = x;
  table.norm = norm;
  for_each_mollifier_entry(
      x, [&](std::uint64_t n, double w, double) { table.entries.push_back({n, w}); },
      norm);
  std::sort(table.entries.begin(), table.entries.end(),
            [](const MollifierTable::Entry& a, const MollifierTable::Entry& b) {
              return a.n < b.n;
            });
  return table;
}

// ---- Optional on-disk prime cache ------------------------------------------
//
// Format (all little-endian): magic "ZBPC", u32 version, u64 limit, u64 count,
// then count u64 values: the first prime followed by successive deltas.
// A version bump invalidates every cached table. The cache directory comes
// from the ZB_CACHE_DIR environment variable.

inline std::string prime_cache_path(const std::string& dir, std::uint64_t limit) {
  return dir + "/primes_v" + std::to_string(kPrimeCacheVersion) + "_" +
         std::to_string(limit) + ".bin";
}

inline bool save_prime_table(const PrimeTable& table, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  std::string path = prime_cache_path(dir, table.limit);
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) return false;
  auto put_u32 = [&](std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    std::fwrite(b, 1, 4, f);
  };
  auto put_u64 = [&](std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    std::fwrite(b, 1, 8, f);
  };
  std::fwrite("ZBPC", 1, 4, f);
  put_u32(kPrimeCacheVersion);
  put_u64(table.limit);
  put_u64(table.primes.size());
  std::uint64_t prev = 0;
  for (std::uint64_t p : table.primes) {
    put_u64(p - prev);
    prev = p;
  }
  bool ok = std::fclose(f) == 0;
  return ok;
}

inline bool load_prime_table(std::uint64_t limit, const std::string& dir,
                             PrimeTable& out) {
  std::string path = prime_cache_path(dir, limit);
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) return false;
  auto get_u32 = [&](std::uint32_t& v) {
    unsigned char b[4];
    if (std::fread(b, 1, 4, f) != 4) return false;
    v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
    return true;
  };
  auto get_u64 = [&](std::uint64_t& v) {
    unsigned char b[8];
    if (std::fread(b, 1, 8, f) != 8) return false;
    v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return true;
  };
  char magic[4];
  std::uint32_t version = 0;
  std::uint64_t stored_limit = 0, count = 0;
  bool ok = std::fread(magic, 1, 4, f) == 4 && magic[0] == 'Z' && magic[1] == 'B' &&
            magic[2] == 'P' && magic[3] == 'C' && get_u32(version) &&
            version == kPrimeCacheVersion && get_u64(stored_limit) &&
            stored_limit == limit && get_u64(count);
  if (ok) {
    out.limit = limit;
    out.primes.assign(count, 0);
    std::uint64_t prev = 0;
    for (std::uint64_t i = 0; i < count && ok; ++i) {
      std::uint64_t delta = 0;
      ok = get_u64(delta);
      prev += delta;
      out.primes[i] = prev;
    }
  }
  std::fclose(f);
  if (!ok) out = PrimeTable{};
  return ok;
}

// Sieve with cache lookup when ZB_CACHE_DIR is set.
inline PrimeTable sieve_cached(std::uint64_t limit) {
  const char* dir = std::getenv("ZB_CACHE_DIR");
  if (dir && *dir) {
    PrimeTable table;
    if (load_prime_table(limit, dir, table)) return table;
    table = sieve(limit);
    save_prime_table(table, dir);
    return table;
  }
  return sieve(limit);
}

}  // namespace zbm
