#include "pommer/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "pommer/rng.hpp"

namespace pommer {

using nlohmann::json;

void GameConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("config: " + what); };
  if (board_size < 5) fail("board_size must be >= 5");
  if (bomb_timer < 1) fail("bomb_timer must be >= 1");
  if (flame_life < 1) fail("flame_life must be >= 1");
  if (initial_blast < 2) fail("initial_blast must be >= 2");
  if (view_radius < 1) fail("view_radius must be >= 1");
  if (initial_ammo < 1) fail("initial_ammo must be >= 1");
  if (max_steps < 1) fail("max_steps must be >= 1");
  if (rigid_count < 0 || wood_count < 0) fail("terrain counts must be >= 0");
  if (powerup_probability < 0.0 || powerup_probability > 1.0)
    fail("powerup_probability must be in [0,1]");
}

void PPOConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("config: " + what); };
  if (!(clip_epsilon > 0.0 && clip_epsilon < 1.0)) fail("clip_epsilon must be in (0,1)");
  if (!(discount > 0.0 && discount <= 1.0)) fail("discount must be in (0,1]");
  if (value_coef < 0.0) fail("value_coef must be >= 0");
  if (learning_rate <= 0.0) fail("learning_rate must be > 0");
  if (epochs_per_batch < 1) fail("epochs_per_batch must be >= 1");
  if (minibatch_size < 1) fail("minibatch_size must be >= 1");
  if (games_per_iteration < 1) fail("games_per_iteration must be >= 1");
  if (num_workers < 1) fail("num_workers must be >= 1");
  if (promotion_window < 1) fail("promotion_window must be >= 1");
}

namespace {

// Assigns cfg fields from a JSON object, rejecting unknown keys.
template <typename Fn>
void read_object(const json& j, const std::string& section, Fn&& field) {
  if (!j.is_object()) throw ConfigError("config: section '" + section + "' must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!field(it.key(), it.value()))
      throw ConfigError("config: unknown key '" + section + "." + it.key() + "'");
  }
}

void read_game(GameConfig& g, const json& j) {
  read_object(j, "game", [&](const std::string& k, const json& v) {
    if (k == "board_size") g.board_size = v.get<int>();
    else if (k == "rigid_count") g.rigid_count = v.get<int>();
    else if (k == "wood_count") g.wood_count = v.get<int>();
    else if (k == "powerup_probability") g.powerup_probability = v.get<double>();
    else if (k == "bomb_timer") g.bomb_timer = v.get<int>();
    else if (k == "flame_life") g.flame_life = v.get<int>();
    else if (k == "initial_ammo") g.initial_ammo = v.get<int>();
    else if (k == "initial_blast") g.initial_blast = v.get<int>();
    else if (k == "max_steps") g.max_steps = v.get<int>();
    else if (k == "view_radius") g.view_radius = v.get<int>();
    else if (k == "rng_seed") g.rng_seed = v.get<uint64_t>();
    else if (k == "kick_stops_on_powerup") g.kick_stops_on_powerup = v.get<bool>();
    else if (k == "flames_destroy_powerups") g.flames_destroy_powerups = v.get<bool>();
    else return false;
    return true;
  });
}

void read_filter(FilterConfig& f, const json& j) {
  read_object(j, "filter", [&](const std::string& k, const json& v) {
    if (k == "lookahead_bomb_check") f.lookahead_bomb_check = v.get<bool>();
    else return false;
    return true;
  });
}

void read_ppo(PPOConfig& p, const json& j) {
  read_object(j, "ppo", [&](const std::string& k, const json& v) {
    if (k == "clip_epsilon") p.clip_epsilon = v.get<double>();
    else if (k == "value_coef") p.value_coef = v.get<double>();
    else if (k == "discount") p.discount = v.get<double>();
    else if (k == "learning_rate") p.learning_rate = v.get<double>();
    else if (k == "epochs_per_batch") p.epochs_per_batch = v.get<int>();
    else if (k == "minibatch_size") p.minibatch_size = v.get<int>();
    else if (k == "games_per_iteration") p.games_per_iteration = v.get<int>();
    else if (k == "num_workers") p.num_workers = v.get<int>();
    else if (k == "promotion_threshold") p.promotion_threshold = v.get<double>();
    else if (k == "promotion_window") p.promotion_window = v.get<int>();
    else if (k == "normalize_advantages") p.normalize_advantages = v.get<bool>();
    else if (k == "entropy_coef") p.entropy_coef = v.get<double>();
    else if (k == "use_gae") p.use_gae = v.get<bool>();
    else if (k == "gae_lambda") p.gae_lambda = v.get<double>();
    else return false;
    return true;
  });
}

void read_train(TrainConfig& t, const json& j) {
  read_object(j, "train", [&](const std::string& k, const json& v) {
    if (k == "channels") t.channels = v.get<int>();
    else if (k == "max_iterations") t.max_iterations = v.get<int>();
    else if (k == "seed") t.seed = v.get<uint64_t>();
    else if (k == "max_steps_override") t.max_steps_override = v.get<int>();
    else if (k == "stages") t.stages = v.get<std::string>();
    else if (k == "out_dir") t.out_dir = v.get<std::string>();
    else return false;
    return true;
  });
}

}  // namespace

void apply_config_json(TrainConfig& cfg, const std::string& json_text) {
  json j = json::parse(json_text);
  read_object(j, "", [&](const std::string& k, const json& v) {
    if (k == "game") read_game(cfg.game, v);
    else if (k == "filter") read_filter(cfg.filter, v);
    else if (k == "ppo") read_ppo(cfg.ppo, v);
    else if (k == "train") read_train(cfg, v);
    else return false;
    return true;
  });
  cfg.game.validate();
  cfg.ppo.validate();
}

TrainConfig load_train_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  TrainConfig cfg;
  try {
    apply_config_json(cfg, ss.str());
  } catch (const json::exception& e) {
    throw ConfigError("config: " + path + ": " + e.what());
  }
  return cfg;
}

int worker_count_override(int fallback) {
  const char* env = std::getenv("POMMER_WORKERS");
  if (!env || !*env) return fallback;
  char* end = nullptr;
  long v = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || v < 1) return fallback;
  return static_cast<int>(v);
}

uint64_t config_hash(const TrainConfig& cfg) {
  json j;
  j["game"] = {{"board_size", cfg.game.board_size},
               {"rigid_count", cfg.game.rigid_count},
               {"wood_count", cfg.game.wood_count},
               {"powerup_probability", cfg.game.powerup_probability},
               {"bomb_timer", cfg.game.bomb_timer},
               {"flame_life", cfg.game.flame_life},
               {"initial_ammo", cfg.game.initial_ammo},
               {"initial_blast", cfg.game.initial_blast},
               {"max_steps", cfg.game.max_steps},
               {"view_radius", cfg.game.view_radius},
               {"kick_stops_on_powerup", cfg.game.kick_stops_on_powerup},
               {"flames_destroy_powerups", cfg.game.flames_destroy_powerups}};
  j["ppo"] = {{"clip_epsilon", cfg.ppo.clip_epsilon},
              {"value_coef", cfg.ppo.value_coef},
              {"discount", cfg.ppo.discount},
              {"learning_rate", cfg.ppo.learning_rate},
              {"epochs_per_batch", cfg.ppo.epochs_per_batch},
              {"minibatch_size", cfg.ppo.minibatch_size},
              {"normalize_advantages", cfg.ppo.normalize_advantages},
              {"entropy_coef", cfg.ppo.entropy_coef}};
  j["train"] = {{"channels", cfg.channels}, {"stages", cfg.stages}};
  std::string s = j.dump();
  Fnv1a h;
  for (char c : s) h.add_byte(static_cast<uint8_t>(c));
  return h.value();
}

}  // namespace pommer
