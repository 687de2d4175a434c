#pragma once

#include <string>
#include <vector>

#include "pommer/harness.hpp"

namespace pommer {

// Engine throughput: repeated full games with uniform-random actions,
// re-generating the board on every terminal. Returns step() calls per second
// of wall time; runs for at least min_seconds.
double bench_engine_steps(const GameConfig& game, uint64_t seed, double min_seconds);

// Observation corpus for latency measurements: smart_random self-play, every
// living agent's observation of every step. Bomb-rich and diverse.
std::vector<Observation> sample_observations(const GameConfig& game, uint64_t seed, int games);

// filter_actions wall time over the corpus.
LatencyStats measure_filter_latency(const std::vector<Observation>& corpus,
                                    const FilterConfig& cfg = {});

// Full decision wall time of one agent kind over matches against itself
// (samples from all four seats merged).
LatencyStats measure_agent_latency(const std::string& kind, const GameConfig& game,
                                   uint64_t seed, int games);

}  // namespace pommer
