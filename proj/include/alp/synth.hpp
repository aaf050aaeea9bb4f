#pragma once

// Synthetic workload family.
//
// gen_synth_workload builds the two-loop producer/consumer kernel: a producer
// segment gathers three large inputs at random indices and appends to `out`;
// a consumer segment re-reads `out` n_reuse times. The other builders produce
// the fixtures used to exercise the runtime: an inseparable pair, a single
// memory-bound stream and a pure-compute loop.

#include <cstdint>

#include "alp/ir.hpp"

namespace alp {

enum class ConsumerPattern { random, sequential };

/// Elements of each random-access input array (32 MiB at 8 B).
inline constexpr std::int64_t kDefaultInputLength = std::int64_t{1} << 22;
/// Profiling input: 64 lines of inter-segment data.
inline constexpr std::int64_t kDefaultProfileElements = 64 * kLineBytes / 8;

Workload gen_synth_workload(std::int64_t n, std::int64_t n_reuse, std::uint64_t seed,
                            ConsumerPattern consumer = ConsumerPattern::random,
                            std::int64_t input_length = kDefaultInputLength);

/// Two segments in a repeated loop. Segment 1 gathers from a large array and
/// scans `buf`; segment 2 re-reads and rewrites `buf`. Registers tie the pair
/// together but no line written by segment 1 is read by segment 2.
Workload gen_inseparable_workload(std::int64_t buf_elements, std::int64_t reuse, std::int64_t rounds,
                                  std::uint64_t seed, std::int64_t input_length = kDefaultInputLength);

/// One segment of `accesses` random loads over a large array.
Workload gen_random_stream_workload(std::int64_t accesses, std::uint64_t seed,
                                    std::int64_t input_length = kDefaultInputLength);

/// One segment of register-only arithmetic.
Workload gen_compute_workload(std::int64_t iterations);

}  // namespace alp
