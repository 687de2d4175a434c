#include "pommer/train.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "pommer/agents.hpp"
#include "pommer/ppo.hpp"

#include "json.hpp"

namespace pommer {

namespace {

std::vector<std::string> split_stages(const std::string& stages) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : stages) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  if (out.empty()) throw UsageError("no curriculum stages configured");
  for (const std::string& kind : out) make_agent(kind);  // validates the kind
  return out;
}

std::string checkpoint_path(const std::string& dir, int iteration) {
  char name[32];
  std::snprintf(name, sizeof(name), "ckpt_%06d.pommer", iteration);
  return (std::filesystem::path(dir) / name).string();
}

void write_sidecar(const std::string& ckpt_path, const IterationStats& st, uint64_t cfg_hash) {
  nlohmann::json j;
  j["iteration"] = st.iteration;
  j["stage"] = st.stage;
  j["opponent"] = st.opponent;
  j["games"] = st.games;
  j["wins"] = st.wins;
  j["losses"] = st.losses;
  j["draws"] = st.draws;
  j["mean_shaped_reward"] = st.mean_shaped_reward;
  j["mean_loss"] = st.mean_loss;
  j["config_hash"] = cfg_hash;
  std::ofstream f(ckpt_path + ".json");
  f << j.dump(2) << "\n";
}

}  // namespace

TrainResult train(const TrainConfig& cfg,
                  const std::function<void(const IterationStats&)>& on_iteration) {
  cfg.game.validate();
  cfg.ppo.validate();
  const std::vector<std::string> stages = split_stages(cfg.stages);

  std::filesystem::create_directories(cfg.out_dir);
  std::ofstream curve((std::filesystem::path(cfg.out_dir) / "curve.csv").string());
  if (!curve) throw UsageError("cannot write curve.csv under " + cfg.out_dir);
  curve << "iteration,games,wins,losses,draws,mean_shaped_reward,stage\n";
  curve.flush();

  NetConfig net_cfg;
  net_cfg.channels = cfg.channels;
  net_cfg.board_size = cfg.game.board_size;
  ConvNet<float> net(net_cfg);
  {
    Rng init_rng(Rng::derive(cfg.seed, 7));
    net.init_he(init_rng);
  }
  AdamOptimizer<float> adam(net.param_count(), cfg.ppo.learning_rate);
  const uint64_t cfg_hash = config_hash(cfg);

  TrainResult result;
  int stage = 1;
  int stage_wins = 0;
  int stage_games = 0;
  std::vector<std::pair<int, int>> window;  // (wins, games) per in-stage iteration

  std::vector<float> grad;
  for (int iteration = 1; iteration <= cfg.max_iterations; ++iteration) {
    CollectOptions copt;
    copt.game = cfg.game;
    if (cfg.max_steps_override > 0) copt.game.max_steps = cfg.max_steps_override;
    copt.ppo = cfg.ppo;
    copt.filter = cfg.filter;
    copt.base_seed = Rng::derive(cfg.seed, 1000 + static_cast<uint64_t>(iteration));
    copt.opponent = stages[stage - 1];

    IterationStats st;
    st.iteration = iteration;
    st.stage = stage;
    st.opponent = copt.opponent;

    RolloutBatch batch;
    bool numeric_failure = false;
    try {
      batch = collect_rollouts(net, copt);
    } catch (const NumericError&) {
      numeric_failure = true;
    }
    if (!numeric_failure) {
      st.games = static_cast<int>(batch.episodes.size() / 2);
      double reward_sum = 0.0;
      for (size_t e = 0; e < batch.episodes.size(); ++e) {
        const EpisodeRollout& ep = batch.episodes[e];
        for (const Transition& t : ep.transitions) reward_sum += t.reward;
        if (e % 2 == 0) {
          switch (ep.outcome) {
            case Outcome::Team0Wins: ++st.wins; break;
            case Outcome::Team1Wins: ++st.losses; break;
            default: ++st.draws; break;
          }
        }
      }
      st.mean_shaped_reward = reward_sum / static_cast<double>(batch.episodes.size());

      try {
        compute_returns_advantages(batch, cfg.ppo);
        FlatBatch flat = flatten(batch);
        std::vector<size_t> order(flat.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = i;
        Rng shuffle_rng(Rng::derive(cfg.seed, 500000 + static_cast<uint64_t>(iteration)));
        double loss_sum = 0.0;
        int minibatches = 0;
        const size_t mb = static_cast<size_t>(std::max(1, cfg.ppo.minibatch_size));
        std::vector<size_t> slice;
        for (int epoch = 0; epoch < cfg.ppo.epochs_per_batch && !numeric_failure; ++epoch) {
          for (size_t i = order.size(); i > 1; --i) {
            std::swap(order[i - 1], order[shuffle_rng.next_below(i)]);
          }
          for (size_t at = 0; at < order.size(); at += mb) {
            slice.assign(order.begin() + at,
                         order.begin() + std::min(at + mb, order.size()));
            const double loss = ppo_loss_grad(net, flat, slice, cfg.ppo, grad);
            if (!std::isfinite(loss)) {
              numeric_failure = true;
              break;
            }
            adam.step(net.params(), grad);
            loss_sum += loss;
            ++minibatches;
          }
        }
        if (minibatches > 0) st.mean_loss = loss_sum / minibatches;
        for (float p : net.params()) {
          if (!std::isfinite(p)) {
            numeric_failure = true;
            break;
          }
        }
      } catch (const NumericError&) {
        numeric_failure = true;
      }
    }

    if (numeric_failure) {
      result.diverged = true;
      break;
    }

    curve << st.iteration << ',' << st.games << ',' << st.wins << ',' << st.losses << ','
          << st.draws << ',' << st.mean_shaped_reward << ',' << st.stage << "\n";
    curve.flush();

    const std::string ckpt = checkpoint_path(cfg.out_dir, iteration);
    CheckpointMeta meta;
    meta.iteration = iteration;
    meta.stage = stage;
    meta.config_hash = cfg_hash;
    save_checkpoint(ckpt, net, meta);
    write_sidecar(ckpt, st, cfg_hash);
    result.last_checkpoint = ckpt;
    result.iterations_run = iteration;
    result.history.push_back(st);
    if (on_iteration) on_iteration(st);

    stage_wins += st.wins;
    stage_games += st.games;
    window.emplace_back(st.wins, st.games);
    if (static_cast<int>(window.size()) > cfg.ppo.promotion_window) {
      stage_wins -= window.front().first;
      stage_games -= window.front().second;
      window.erase(window.begin());
    }
    if (static_cast<int>(window.size()) == cfg.ppo.promotion_window &&
        stage < static_cast<int>(stages.size()) && stage_games > 0 &&
        static_cast<double>(stage_wins) / stage_games >= cfg.ppo.promotion_threshold) {
      ++stage;
      window.clear();
      stage_wins = 0;
      stage_games = 0;
    }
  }
  result.final_stage = stage;
  return result;
}

}  // namespace pommer
