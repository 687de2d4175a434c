#pragma once

#include <string>

#include "pommer/ppo.hpp"
#include "pommer/state.hpp"

namespace pommer {

// FIFO memory of the last 121 distinct cells an agent stood on, seeded with
// the spawn cell. Drives the exploration bonus.
class ShapingState {
 public:
  ShapingState(int board_size, Position spawn);
  // True when p was absent; records p, evicting the oldest entry past the
  // capacity of 121.
  bool visit(Position p);

 private:
  int n_ = 0;
  std::vector<Position> fifo_;  // insertion order, oldest first
  std::vector<uint8_t> present_;
};

// Dense per-step shaping: +0.001 for entering a cell absent from the FIFO,
// +0.01 per ExtraBomb or ExtraBlast pickup, +0.02 per EnableKick pickup,
// +0.5 per enemy death this step, -0.5 when the teammate dies.
double shaped_reward(const AgentEvents& events, ShapingState& shaping);

// Terminal credit added to the final transition: +1 alive on the winning
// team, +0.5 dead on the winning team, -1 on the losing team, 0 on a draw.
double terminal_reward(Outcome outcome, int team, bool alive_at_end);

struct CollectOptions {
  GameConfig game;
  PPOConfig ppo;
  FilterConfig filter;
  uint64_t base_seed = 0;
  std::string opponent = "static";  // seats 1 and 3
  int games = 0;                    // 0: ppo.games_per_iteration
  int workers = 0;                  // 0: ppo.num_workers; POMMER_WORKERS overrides
};

// Plays `games` episodes with the learner network on seats 0 and 2 and two
// fresh opponents on seats 1 and 3, recording one EpisodeRollout per learner.
// Every random stream derives from base_seed + game_index alone, and results
// merge in game order, so the batch is bit-identical for any worker count.
RolloutBatch collect_rollouts(const ConvNet<float>& net, const CollectOptions& options);

}  // namespace pommer
