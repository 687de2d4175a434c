#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pommer {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Rules of one episode. Defaults give the standard 11x11 game: bombs explode
// 10 steps after placement, flames last 2 steps, vision is a Chebyshev window
// of radius 4, and the game draws after 800 steps.
struct GameConfig {
  int board_size = 11;
  int rigid_count = 36;
  int wood_count = 36;
  double powerup_probability = 0.5;  // chance a wood cell hides a powerup
  int bomb_timer = 10;
  int flame_life = 2;
  int initial_ammo = 1;
  int initial_blast = 2;
  int max_steps = 800;
  int view_radius = 4;
  uint64_t rng_seed = 0;

  // Rule toggles for cases the classic game leaves ambiguous.
  bool kick_stops_on_powerup = false;   // false: kicked bombs slide over items
  bool flames_destroy_powerups = true;  // exposed items burn; just-revealed ones survive

  // Throws ConfigError when a field is out of range. board_size only needs to
  // be >= 5; small and even boards are required by tests and desk training.
  void validate() const;

  friend bool operator==(const GameConfig&, const GameConfig&) = default;
};

struct FilterConfig {
  // Strict mode: bomb placement additionally requires an escape to exist after
  // hypothetically adding the bomb. Off by default (crude rules).
  bool lookahead_bomb_check = false;
};

// PPO and curriculum settings.
struct PPOConfig {
  double clip_epsilon = 0.2;
  double value_coef = 0.5;     // alpha in the objective
  double discount = 0.99;      // gamma
  double learning_rate = 2.5e-4;
  int epochs_per_batch = 4;
  int minibatch_size = 256;
  int games_per_iteration = 120;
  int num_workers = 12;
  double promotion_threshold = 0.6;  // stage win rate over the promotion window
  int promotion_window = 5;          // iterations
  bool normalize_advantages = true;  // skipped when batch stddev < 1e-8
  double entropy_coef = 0.0;
  bool use_gae = false;  // generalized advantage mode, lambda below
  double gae_lambda = 0.95;

  void validate() const;
};

struct NetConfig {
  int channels = 64;  // kernels per trunk convolution
  int input_planes = 14;
  int board_size = 11;
};

struct TrainConfig {
  GameConfig game;
  PPOConfig ppo;
  FilterConfig filter;
  int channels = 64;
  int max_iterations = 1000;
  uint64_t seed = 0;
  int max_steps_override = 0;  // > 0 replaces game.max_steps during rollouts
  std::string stages = "static,smart_random_nobomb";
  std::string out_dir = "train_out";
};

// Loads a JSON config file; unknown keys are rejected so typos surface.
// Sections: "game", "filter", "ppo", "train" (all optional).
TrainConfig load_train_config(const std::string& path);
void apply_config_json(TrainConfig& cfg, const std::string& json_text);

// Worker-count override: POMMER_WORKERS, when set, replaces any configured
// worker count. Returns fallback when unset or unparsable.
int worker_count_override(int fallback);

// FNV-1a hash of the canonical serialized config, used in checkpoint headers.
uint64_t config_hash(const TrainConfig& cfg);

}  // namespace pommer
