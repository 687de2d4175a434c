#include "pommer/bench.hpp"

#include <chrono>

#include "pommer/agents.hpp"
#include "pommer/engine.hpp"

namespace pommer {

using Clock = std::chrono::steady_clock;

double bench_engine_steps(const GameConfig& game, uint64_t seed, double min_seconds) {
  Rng rng(Rng::derive(seed, 0));
  uint64_t game_index = 0;
  long long steps = 0;
  const auto t0 = Clock::now();
  double elapsed = 0.0;
  GameConfig gc = game;
  gc.rng_seed = Rng::derive(seed, 1000 + game_index);
  GameState state = generate_board(gc);
  while (elapsed < min_seconds) {
    for (int burst = 0; burst < 64; ++burst) {
      if (is_terminal(state) != Outcome::Ongoing) {
        ++game_index;
        gc.rng_seed = Rng::derive(seed, 1000 + game_index);
        state = generate_board(gc);
      }
      std::array<Action, kNumAgents> actions;
      for (int i = 0; i < kNumAgents; ++i) {
        actions[i] = state.agents[i].alive
                         ? static_cast<Action>(rng.next_below(kNumActions))
                         : Action::Stop;
      }
      state = step(state, actions).first;
      ++steps;
    }
    elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
  }
  return steps / elapsed;
}

std::vector<Observation> sample_observations(const GameConfig& game, uint64_t seed, int games) {
  std::vector<Observation> corpus;
  for (int g = 0; g < games; ++g) {
    GameConfig gc = game;
    gc.rng_seed = Rng::derive(seed, 2000 + static_cast<uint64_t>(g));
    GameState state = generate_board(gc);
    std::array<std::unique_ptr<Agent>, kNumAgents> agents;
    for (int i = 0; i < kNumAgents; ++i) {
      agents[i] = make_agent("smart_random");
      agents[i]->reset(Rng::derive(seed, 3000 + static_cast<uint64_t>(g) * 8 + i));
    }
    while (is_terminal(state) == Outcome::Ongoing) {
      std::array<Action, kNumAgents> actions{Action::Stop, Action::Stop, Action::Stop,
                                             Action::Stop};
      for (int i = 0; i < kNumAgents; ++i) {
        if (!state.agents[i].alive) continue;
        Observation obs = observe(state, i);
        actions[i] = agents[i]->act(obs);
        corpus.push_back(std::move(obs));
      }
      state = step(state, actions).first;
    }
  }
  return corpus;
}

LatencyStats measure_filter_latency(const std::vector<Observation>& corpus,
                                    const FilterConfig& cfg) {
  std::vector<double> samples;
  samples.reserve(corpus.size());
  for (const Observation& obs : corpus) {
    const auto t0 = Clock::now();
    FilterResult f = filter_actions(obs, cfg);
    const auto t1 = Clock::now();
    (void)f;
    samples.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return latency_stats_from("filter", std::move(samples));
}

LatencyStats measure_agent_latency(const std::string& kind, const GameConfig& game,
                                   uint64_t seed, int games) {
  std::vector<double> samples;
  for (int g = 0; g < games; ++g) {
    MatchSpec spec;
    spec.game = game;
    spec.roster = {kind, kind, kind, kind};
    spec.seed = seed + static_cast<uint64_t>(g);
    MatchResult r = run_match(spec);
    for (int i = 0; i < kNumAgents; ++i) {
      samples.insert(samples.end(), r.decision_ms[i].begin(), r.decision_ms[i].end());
    }
  }
  return latency_stats_from(kind, std::move(samples));
}

}  // namespace pommer
