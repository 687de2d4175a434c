#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "pommer/replay.hpp"

namespace pommer {

struct MatchSpec {
  GameConfig game;
  std::array<std::string, kNumAgents> roster;  // agent kinds by seat
  uint64_t seed = 0;
  bool record_replay = false;
};

struct MatchResult {
  Outcome outcome = Outcome::Ongoing;
  int steps = 0;
  uint64_t final_hash = 0;
  std::array<bool, kNumAgents> alive{};
  std::optional<Replay> replay;
  // Wall-clock decision times per seat, milliseconds. Non-deterministic;
  // excluded from replays and deterministic reports.
  std::array<std::vector<double>, kNumAgents> decision_ms;
};

// One 2v2 game: seats 0,2 versus 1,3. The board and every agent stream derive
// from spec.seed, so a match replays bit-identically.
MatchResult run_match(const MatchSpec& spec);

struct TournamentSpec {
  GameConfig game;
  std::array<std::string, 2> team_a;  // seats 0 and 2
  std::array<std::string, 2> team_b;  // seats 1 and 3
  int games = 20;
  uint64_t seed = 0;
};

struct LatencyStats {
  std::string kind;
  int samples = 0;
  double mean_ms = 0.0;
  double p50_ms = 0.0;
  double p99_ms = 0.0;
};

// Sorts the samples and fills mean/p50/p99 (percentile = the sample at the
// rounded fractional index q * (n - 1)).
LatencyStats latency_stats_from(const std::string& kind, std::vector<double> samples_ms);

struct TournamentReport {
  TournamentSpec spec;
  int games = 0;
  int wins_a = 0;
  int wins_b = 0;
  int draws = 0;
  double win_rate_a = 0.0;  // draws count as half
  double wilson_low = 0.0;  // 95% interval on win_rate_a
  double wilson_high = 0.0;
  double mean_steps = 0.0;
  // Wall-clock only; never part of the deterministic output.
  std::vector<LatencyStats> latency;
};

// Wilson score interval for p = successes/trials at 95% confidence
// (z = 1.959963984540054). Returns {low, high}; trials == 0 yields {0, 1}.
std::pair<double, double> wilson_interval(double successes, int trials);

// Plays spec.games matches with per-match seeds seed+index. Everything except
// the latency block is a pure function of the spec.
TournamentReport run_tournament(const TournamentSpec& spec);

// Deterministic machine-readable rows (no latency). Stable across runs and
// worker counts; diffable.
std::string tournament_csv(const TournamentReport& report);
// Human summary including the latency block.
std::string tournament_text(const TournamentReport& report);

}  // namespace pommer
