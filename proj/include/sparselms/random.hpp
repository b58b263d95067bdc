#pragma once

// Reproducible random streams for the Monte-Carlo harness.
//
// Engine: std::mt19937_64, whose output sequence is fixed by the C++
// standard. Per-run streams are seeded with
//     splitmix64(base_seed ^ splitmix64(run_index + 1))
// so every (base seed, run index) pair owns an independent stream and
// results do not depend on execution order or thread count.
//
// The std <random> distributions are implementation-defined, so the
// variates are derived here:
//   uniform()   : top 53 bits of one engine draw, scaled to [0, 1)
//   below(n)    : Lemire's multiply-and-reject on 64-bit draws
//   bpsk()      : +1 if the top bit of one draw is set, else -1
//   gaussian()  : Box-Muller on (1 - uniform(), uniform()); both outputs
//                 of a pair are used, cosine branch first

#include <cstddef>
#include <cstdint>
#include <random>

namespace sparselms {

std::uint64_t splitmix64(std::uint64_t x) noexcept;

class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  static Rng for_run(std::uint64_t base_seed, std::uint64_t run_index);

  std::uint64_t next_u64() { return engine_(); }
  double uniform();
  std::size_t below(std::size_t n);
  double bpsk();
  double gaussian();

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace sparselms
