#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pommer/net.hpp"
#include "pommer/rollout.hpp"

namespace pommer {

struct IterationStats {
  int iteration = 0;  // 1-based
  int stage = 0;      // 1-based curriculum stage the games were played at
  std::string opponent;
  int games = 0;
  int wins = 0;    // learner team
  int losses = 0;
  int draws = 0;
  double mean_shaped_reward = 0.0;  // mean per-episode reward total
  double mean_loss = 0.0;           // mean minibatch objective this iteration
};

struct TrainResult {
  bool diverged = false;
  int iterations_run = 0;
  int final_stage = 1;
  std::string last_checkpoint;  // newest intact checkpoint, empty when none
  std::vector<IterationStats> history;
};

// Curriculum PPO driver. Writes out_dir/curve.csv
// (iteration,games,wins,losses,draws,mean_shaped_reward,stage) and one
// checkpoint pair (weights + json sidecar) per completed iteration. Stages
// come from cfg.stages (comma-separated opponent kinds); the stage advances
// when the aggregate win rate over the last promotion_window in-stage
// iterations reaches promotion_threshold. A non-finite loss or network output
// aborts with diverged=true, leaving the previous checkpoint intact.
// All randomness derives from cfg.seed; a run is bit-reproducible for any
// worker count.
TrainResult train(const TrainConfig& cfg,
                  const std::function<void(const IterationStats&)>& on_iteration = {});

}  // namespace pommer
