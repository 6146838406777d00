#pragma once

#include <cstdint>
#include <limits>

namespace adaiht {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Mixes a sequence of words into a single 64-bit key.
inline constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t v) {
  return splitmix64(seed ^ splitmix64(v + 0x632be59bd9b4e019ULL));
}

/// Counter-based generator: output i is a keyed hash of (key, i).
///
/// Any stream is fully determined by its key, so replications can derive
/// independent streams from (master_seed, replication) and run in any order.
/// Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit constexpr CounterRng(std::uint64_t key) : key_(splitmix64(key)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() { return splitmix64(key_ ^ splitmix64(counter_++)); }

  /// Child stream keyed on (this key, tag); does not advance this stream.
  constexpr CounterRng fork(std::uint64_t tag) const { return CounterRng(hash_combine(key_, tag)); }

  constexpr std::uint64_t key() const { return key_; }
  constexpr std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Seed for replication `rep` of scenario `scenario_hash` under `master_seed`.
inline constexpr std::uint64_t replication_seed(std::uint64_t master_seed,
                                                std::uint64_t scenario_hash,
                                                std::uint64_t rep) {
  return hash_combine(hash_combine(master_seed, scenario_hash), rep);
}

/// FNV-1a; stable across platforms, used to fold scenario ids into seeds.
inline constexpr std::uint64_t stable_hash(const char* s, std::size_t len) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= static_cast<unsigned char>(s[i]);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace adaiht
