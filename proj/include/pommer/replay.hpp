#pragma once

#include <array>
#include <string>
#include <vector>

#include "pommer/engine.hpp"

namespace pommer {

// Replay file: line-delimited JSON.
//   line 1           header: format tag, version, config, match seed, roster
//   one line per step: the 4 actions plus the ids that died that step
//   last line        trailer: outcome, final state hash, step count
// The starting position is reproduced from the config (its rng_seed), so a
// replay is self-contained.
constexpr int kReplayVersion = 1;

struct ReplayStepRecord {
  std::array<Action, kNumAgents> actions;
  std::vector<int> deaths;
};

struct Replay {
  GameConfig config;
  uint64_t match_seed = 0;
  std::array<std::string, kNumAgents> roster;
  std::vector<ReplayStepRecord> steps;
  Outcome outcome = Outcome::Ongoing;
  uint64_t final_hash = 0;
};

std::string replay_to_text(const Replay& replay);
Replay replay_from_text(const std::string& text);
void write_replay_file(const std::string& path, const Replay& replay);
Replay read_replay_file(const std::string& path);

struct ResimulationResult {
  bool ok = false;
  std::string error;         // first divergence, empty when ok
  Outcome outcome = Outcome::Ongoing;
  uint64_t final_hash = 0;
  GameState final_state;
};

// Replays the recorded actions through the engine and checks every recorded
// death, the outcome, and the final state hash against the file.
ResimulationResult resimulate(const Replay& replay);

}  // namespace pommer
