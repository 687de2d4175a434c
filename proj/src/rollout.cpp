#include "pommer/rollout.hpp"

#include <algorithm>
#include <memory>
#include <thread>

#include "pommer/agents.hpp"
#include "pommer/engine.hpp"

namespace pommer {

namespace {
constexpr size_t kFifoCapacity = 121;
}

ShapingState::ShapingState(int board_size, Position spawn)
    : n_(board_size), present_(board_size * board_size, 0) {
  fifo_.reserve(kFifoCapacity + 1);
  visit(spawn);
}

bool ShapingState::visit(Position p) {
  uint8_t& flag = present_[p.row * n_ + p.col];
  if (flag) return false;
  flag = 1;
  fifo_.push_back(p);
  if (fifo_.size() > kFifoCapacity) {
    Position old = fifo_.front();
    fifo_.erase(fifo_.begin());
    present_[old.row * n_ + old.col] = 0;
  }
  return true;
}

double shaped_reward(const AgentEvents& events, ShapingState& shaping) {
  double r = 0.0;
  if (events.entered_cell && shaping.visit(*events.entered_cell)) r += 0.001;
  if (events.picked_powerup) {
    switch (*events.picked_powerup) {
      case Powerup::ExtraBomb: r += 0.01; break;
      case Powerup::ExtraBlast: r += 0.01; break;
      case Powerup::EnableKick: r += 0.02; break;
    }
  }
  r += 0.5 * events.killed_enemy_count;
  if (events.teammate_died) r -= 0.5;
  return r;
}

double terminal_reward(Outcome outcome, int team, bool alive_at_end) {
  const bool team0 = (team == 0);
  switch (outcome) {
    case Outcome::Team0Wins: return team0 ? (alive_at_end ? 1.0 : 0.5) : -1.0;
    case Outcome::Team1Wins: return team0 ? -1.0 : (alive_at_end ? 1.0 : 0.5);
    case Outcome::Draw: return 0.0;
    case Outcome::Ongoing: return 0.0;
  }
  return 0.0;
}

namespace {

struct GameEpisodes {
  std::array<EpisodeRollout, 2> learner;  // seats 0 and 2
};

GameEpisodes play_game(const ConvNet<float>& net, const CollectOptions& opt, int game_index) {
  const uint64_t game_seed = opt.base_seed + static_cast<uint64_t>(game_index);
  GameConfig gc = opt.game;
  gc.rng_seed = Rng::derive(game_seed, 0);
  GameState state = generate_board(gc);
  const int n = gc.board_size;

  // Non-owning alias: the network outlives the game.
  std::shared_ptr<const ConvNet<float>> net_ref(std::shared_ptr<void>(), &net);
  const int seats[2] = {0, 2};
  std::array<std::unique_ptr<NeuralAgent>, 2> learners;
  std::array<std::unique_ptr<ShapingState>, 2> shaping;
  GameEpisodes out;
  for (int li = 0; li < 2; ++li) {
    learners[li] = std::make_unique<NeuralAgent>(net_ref, opt.filter);
    learners[li]->reset(Rng::derive(game_seed, 16 + seats[li]));
    shaping[li] = std::make_unique<ShapingState>(n, state.agents[seats[li]].position);
    out.learner[li].game_index = game_index;
    out.learner[li].agent_pos = seats[li];
  }
  std::array<std::unique_ptr<Agent>, kNumAgents> opponents;
  for (int seat : {1, 3}) {
    opponents[seat] = make_agent(opt.opponent);
    opponents[seat]->reset(Rng::derive(game_seed, 1 + seat));
  }

  while (is_terminal(state) == Outcome::Ongoing) {
    std::array<Action, kNumAgents> actions{Action::Stop, Action::Stop, Action::Stop,
                                           Action::Stop};
    bool acted[2] = {false, false};
    for (int li = 0; li < 2; ++li) {
      const int seat = seats[li];
      if (!state.agents[seat].alive) continue;
      NeuralDecision d = learners[li]->act_full(observe(state, seat));
      Transition tr;
      tr.features = std::move(d.features);
      tr.action = static_cast<int>(d.action);
      tr.logprob_old = d.logprob;
      tr.value_old = d.value;
      actions[seat] = d.action;
      acted[li] = true;
      out.learner[li].transitions.push_back(std::move(tr));
    }
    for (int seat : {1, 3}) {
      if (state.agents[seat].alive) actions[seat] = opponents[seat]->act(observe(state, seat));
    }
    auto [next, events] = step(state, actions);
    for (int li = 0; li < 2; ++li) {
      if (acted[li]) {
        out.learner[li].transitions.back().reward =
            static_cast<float>(shaped_reward(events.agent[seats[li]], *shaping[li]));
      }
    }
    state = std::move(next);
  }

  const Outcome outcome = is_terminal(state);
  for (int li = 0; li < 2; ++li) {
    out.learner[li].outcome = outcome;
    if (!out.learner[li].transitions.empty()) {
      out.learner[li].transitions.back().reward += static_cast<float>(
          terminal_reward(outcome, 0, state.agents[seats[li]].alive));
    }
  }
  return out;
}

}  // namespace

RolloutBatch collect_rollouts(const ConvNet<float>& net, const CollectOptions& options) {
  const int games = options.games > 0 ? options.games : options.ppo.games_per_iteration;
  if (games <= 0) throw UsageError("no games to collect");
  int workers = worker_count_override(options.workers > 0 ? options.workers
                                                          : options.ppo.num_workers);
  workers = std::clamp(workers, 1, games);

  std::vector<GameEpisodes> results(games);
  if (workers == 1) {
    for (int g = 0; g < games; ++g) results[g] = play_game(net, options, g);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w]() {
        try {
          for (int g = w; g < games; g += workers) results[g] = play_game(net, options, g);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (std::thread& t : pool) t.join();
    for (const std::exception_ptr& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  RolloutBatch batch;
  batch.episodes.reserve(static_cast<size_t>(games) * 2);
  for (int g = 0; g < games; ++g) {
    batch.episodes.push_back(std::move(results[g].learner[0]));
    batch.episodes.push_back(std::move(results[g].learner[1]));
  }
  return batch;
}

}  // namespace pommer
