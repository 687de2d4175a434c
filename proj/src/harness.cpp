#include "pommer/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <sstream>

#include "pommer/agents.hpp"
#include "pommer/engine.hpp"

namespace pommer {

MatchResult run_match(const MatchSpec& spec) {
  GameConfig gc = spec.game;
  gc.rng_seed = Rng::derive(spec.seed, 0);
  gc.validate();
  GameState state = generate_board(gc);

  std::array<std::unique_ptr<Agent>, kNumAgents> agents;
  for (int i = 0; i < kNumAgents; ++i) {
    agents[i] = make_agent(spec.roster[i]);
    agents[i]->reset(Rng::derive(spec.seed, 1 + static_cast<uint64_t>(i)));
  }

  MatchResult result;
  if (spec.record_replay) {
    Replay r;
    r.config = gc;
    r.match_seed = spec.seed;
    r.roster = spec.roster;
    result.replay = std::move(r);
  }

  using Clock = std::chrono::steady_clock;
  while (is_terminal(state) == Outcome::Ongoing) {
    std::array<Action, kNumAgents> actions{Action::Stop, Action::Stop, Action::Stop,
                                           Action::Stop};
    for (int i = 0; i < kNumAgents; ++i) {
      if (!state.agents[i].alive) continue;
      Observation obs = observe(state, i);
      const auto t0 = Clock::now();
      actions[i] = agents[i]->act(obs);
      const auto t1 = Clock::now();
      result.decision_ms[i].push_back(
          std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    auto [next, events] = step(state, actions);
    if (result.replay) {
      ReplayStepRecord rec;
      rec.actions = actions;
      for (int i = 0; i < kNumAgents; ++i) {
        if (events.agent[i].died) rec.deaths.push_back(i);
      }
      result.replay->steps.push_back(std::move(rec));
    }
    state = std::move(next);
  }

  result.outcome = is_terminal(state);
  result.steps = state.step;
  result.final_hash = state_hash(state);
  for (int i = 0; i < kNumAgents; ++i) result.alive[i] = state.agents[i].alive;
  if (result.replay) {
    result.replay->outcome = result.outcome;
    result.replay->final_hash = result.final_hash;
  }
  return result;
}

std::pair<double, double> wilson_interval(double successes, int trials) {
  if (trials <= 0) return {0.0, 1.0};
  const double z = 1.959963984540054;
  const double n = trials;
  const double p = successes / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = p + z2 / (2.0 * n);
  const double spread = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return {std::max(0.0, (center - spread) / denom), std::min(1.0, (center + spread) / denom)};
}

TournamentReport run_tournament(const TournamentSpec& spec) {
  if (spec.games <= 0) throw UsageError("tournament needs at least one game");
  TournamentReport report;
  report.spec = spec;

  std::map<std::string, std::vector<double>> latency;
  double steps_sum = 0.0;
  for (int g = 0; g < spec.games; ++g) {
    MatchSpec ms;
    ms.game = spec.game;
    ms.roster = {spec.team_a[0], spec.team_b[0], spec.team_a[1], spec.team_b[1]};
    ms.seed = spec.seed + static_cast<uint64_t>(g);
    MatchResult r = run_match(ms);
    ++report.games;
    switch (r.outcome) {
      case Outcome::Team0Wins: ++report.wins_a; break;
      case Outcome::Team1Wins: ++report.wins_b; break;
      default: ++report.draws; break;
    }
    steps_sum += r.steps;
    for (int i = 0; i < kNumAgents; ++i) {
      std::vector<double>& bucket = latency[ms.roster[i]];
      bucket.insert(bucket.end(), r.decision_ms[i].begin(), r.decision_ms[i].end());
    }
  }

  report.mean_steps = steps_sum / report.games;
  const double successes = report.wins_a + 0.5 * report.draws;
  report.win_rate_a = successes / report.games;
  std::tie(report.wilson_low, report.wilson_high) = wilson_interval(successes, report.games);

  for (auto& [kind, samples] : latency) {
    if (samples.empty()) continue;
    report.latency.push_back(latency_stats_from(kind, std::move(samples)));
  }
  return report;
}

LatencyStats latency_stats_from(const std::string& kind, std::vector<double> samples_ms) {
  LatencyStats ls;
  ls.kind = kind;
  if (samples_ms.empty()) return ls;
  std::sort(samples_ms.begin(), samples_ms.end());
  ls.samples = static_cast<int>(samples_ms.size());
  double sum = 0.0;
  for (double v : samples_ms) sum += v;
  ls.mean_ms = sum / samples_ms.size();
  auto pct = [&samples_ms](double q) {
    const size_t idx = static_cast<size_t>(q * (samples_ms.size() - 1) + 0.5);
    return samples_ms[std::min(idx, samples_ms.size() - 1)];
  };
  ls.p50_ms = pct(0.5);
  ls.p99_ms = pct(0.99);
  return ls;
}

std::string tournament_csv(const TournamentReport& r) {
  std::ostringstream out;
  out << "team_a,team_b,games,wins_a,wins_b,draws,win_rate_a,wilson_low,wilson_high,mean_steps\n";
  out << r.spec.team_a[0] << '+' << r.spec.team_a[1] << ',' << r.spec.team_b[0] << '+'
      << r.spec.team_b[1] << ',' << r.games << ',' << r.wins_a << ',' << r.wins_b << ','
      << r.draws << ',';
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f,%.2f\n", r.win_rate_a, r.wilson_low,
                r.wilson_high, r.mean_steps);
  out << buf;
  return out.str();
}

std::string tournament_text(const TournamentReport& r) {
  std::ostringstream out;
  out << r.spec.team_a[0] << '+' << r.spec.team_a[1] << " vs " << r.spec.team_b[0] << '+'
      << r.spec.team_b[1] << " over " << r.games << " games\n";
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "wins %d, losses %d, draws %d; win rate %.3f (95%% CI %.3f..%.3f); mean length "
                "%.1f steps\n",
                r.wins_a, r.wins_b, r.draws, r.win_rate_a, r.wilson_low, r.wilson_high,
                r.mean_steps);
  out << buf;
  for (const LatencyStats& ls : r.latency) {
    std::snprintf(buf, sizeof(buf),
                  "latency %s: mean %.3f ms, p50 %.3f ms, p99 %.3f ms (%d decisions)\n",
                  ls.kind.c_str(), ls.mean_ms, ls.p50_ms, ls.p99_ms, ls.samples);
    out << buf;
  }
  return out.str();
}

}  // namespace pommer
