#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "pommer/agents.hpp"
#include "pommer/bench.hpp"
#include "pommer/engine.hpp"
#include "pommer/harness.hpp"
#include "pommer/train.hpp"
#include "pommer/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitVerification = 2;
constexpr int kExitDivergence = 3;

std::array<std::string, pommer::kNumAgents> parse_roster(const std::string& csv) {
  std::array<std::string, pommer::kNumAgents> roster;
  std::stringstream ss(csv);
  std::string item;
  int i = 0;
  while (std::getline(ss, item, ',')) {
    if (i >= pommer::kNumAgents) throw pommer::UsageError("roster needs exactly 4 agent kinds");
    roster[i++] = item;
  }
  if (i != pommer::kNumAgents) throw pommer::UsageError("roster needs exactly 4 agent kinds");
  return roster;
}

std::array<std::string, 2> parse_team(const std::string& csv) {
  auto comma = csv.find(',');
  if (comma == std::string::npos) return {csv, csv};
  return {csv.substr(0, comma), csv.substr(comma + 1)};
}

int cmd_play(const std::string& config_path, uint64_t seed, const std::string& agents_csv,
             const std::string& replay_out, bool show_board) {
  pommer::TrainConfig cfg;
  if (!config_path.empty()) cfg = pommer::load_train_config(config_path);
  pommer::MatchSpec spec;
  spec.game = cfg.game;
  spec.roster = parse_roster(agents_csv);
  spec.seed = seed;
  spec.record_replay = !replay_out.empty();
  pommer::MatchResult r = pommer::run_match(spec);
  if (!replay_out.empty()) pommer::write_replay_file(replay_out, *r.replay);

  std::printf("outcome %s after %d steps (final hash %016llx)\n",
              pommer::outcome_name(r.outcome), r.steps,
              static_cast<unsigned long long>(r.final_hash));
  for (int i = 0; i < pommer::kNumAgents; ++i) {
    std::printf("  seat %d (%s): %s\n", i, spec.roster[i].c_str(),
                r.alive[i] ? "alive" : "dead");
  }
  if (show_board) {
    pommer::Replay check;
    if (r.replay) {
      check = *r.replay;
    } else {
      spec.record_replay = true;
      check = *pommer::run_match(spec).replay;
    }
    pommer::ResimulationResult sim = pommer::resimulate(check);
    if (sim.ok) std::fputs(pommer::dump_board(sim.final_state).c_str(), stdout);
  }
  return kExitOk;
}

int cmd_tournament(const std::string& config_path, uint64_t seed, const std::string& team_a,
                   const std::string& team_b, int games, const std::string& out_csv) {
  pommer::TrainConfig cfg;
  if (!config_path.empty()) cfg = pommer::load_train_config(config_path);
  pommer::TournamentSpec spec;
  spec.game = cfg.game;
  spec.team_a = parse_team(team_a);
  spec.team_b = parse_team(team_b);
  spec.games = games;
  spec.seed = seed;
  pommer::TournamentReport report = pommer::run_tournament(spec);
  std::fputs(pommer::tournament_text(report).c_str(), stdout);
  if (!out_csv.empty()) {
    std::ofstream f(out_csv);
    if (!f) throw pommer::UsageError("cannot write " + out_csv);
    f << pommer::tournament_csv(report);
  }
  return kExitOk;
}

int cmd_train(const std::string& config_path, uint64_t seed, bool seed_set, int iterations,
              const std::string& out_dir) {
  pommer::TrainConfig cfg;
  if (!config_path.empty()) cfg = pommer::load_train_config(config_path);
  if (seed_set) cfg.seed = seed;
  if (iterations > 0) cfg.max_iterations = iterations;
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  pommer::TrainResult result = pommer::train(cfg, [](const pommer::IterationStats& st) {
    std::printf("iter %4d stage %d vs %-20s games %3d W/L/D %d/%d/%d reward %+.4f loss %+.5f\n",
                st.iteration, st.stage, st.opponent.c_str(), st.games, st.wins, st.losses,
                st.draws, st.mean_shaped_reward, st.mean_loss);
    std::fflush(stdout);
  });
  if (result.diverged) {
    std::fprintf(stderr, "training diverged after %d iterations; last good checkpoint: %s\n",
                 result.iterations_run,
                 result.last_checkpoint.empty() ? "(none)" : result.last_checkpoint.c_str());
    return kExitDivergence;
  }
  std::printf("done: %d iterations, final stage %d, last checkpoint %s\n", result.iterations_run,
              result.final_stage, result.last_checkpoint.c_str());
  return kExitOk;
}

int cmd_bench(const std::string& config_path, uint64_t seed, const std::string& what,
              const std::string& kind, double seconds, int games) {
  pommer::TrainConfig cfg;
  if (!config_path.empty()) cfg = pommer::load_train_config(config_path);
  if (what == "engine") {
    const double rate = pommer::bench_engine_steps(cfg.game, seed, seconds);
    std::printf("bench,engine,steps_per_sec,%.0f\n", rate);
    return kExitOk;
  }
  if (what == "filter") {
    auto corpus = pommer::sample_observations(cfg.game, seed, games);
    pommer::LatencyStats ls = pommer::measure_filter_latency(corpus, cfg.filter);
    std::printf("bench,filter,samples,%d\n", ls.samples);
    std::printf("bench,filter,mean_ms,%.4f\n", ls.mean_ms);
    std::printf("bench,filter,p50_ms,%.4f\n", ls.p50_ms);
    std::printf("bench,filter,p99_ms,%.4f\n", ls.p99_ms);
    return kExitOk;
  }
  if (what == "agent") {
    pommer::LatencyStats ls = pommer::measure_agent_latency(kind, cfg.game, seed, games);
    std::printf("bench,agent:%s,samples,%d\n", kind.c_str(), ls.samples);
    std::printf("bench,agent:%s,mean_ms,%.4f\n", kind.c_str(), ls.mean_ms);
    std::printf("bench,agent:%s,p50_ms,%.4f\n", kind.c_str(), ls.p50_ms);
    std::printf("bench,agent:%s,p99_ms,%.4f\n", kind.c_str(), ls.p99_ms);
    return kExitOk;
  }
  throw pommer::UsageError("bench target must be engine, filter, or agent");
}

int cmd_verify(uint64_t seed, int random_boards, bool lookahead, const std::string& dump_dir) {
  pommer::VerifyOptions opt;
  opt.seed = seed;
  opt.random_boards = random_boards;
  opt.filter.lookahead_bomb_check = lookahead;
  opt.counterexample_dir = dump_dir;
  opt.progress = true;
  pommer::VerifyStats stats = pommer::verify_filter(opt);
  std::printf("states checked      %lld\n", stats.states);
  std::printf("action checks       %lld\n", stats.action_checks);
  std::printf("fallback states     %lld\n", stats.fallback_states);
  std::printf("bomb allowed        %lld\n", stats.bomb_allowed);
  for (int i = 0; i < 5; ++i) {
    std::printf("rejected %-16s %lld\n",
                pommer::reject_reason_name(static_cast<pommer::RejectReason>(i)),
                stats.reject_counts[i]);
  }
  std::printf("violations          %lld\n", stats.violations);
  for (const std::string& ex : stats.examples) std::printf("  %s\n", ex.c_str());
  return stats.ok() ? kExitOk : kExitVerification;
}

int cmd_replay(const std::string& in_path) {
  pommer::Replay replay = pommer::read_replay_file(in_path);
  pommer::ResimulationResult sim = pommer::resimulate(replay);
  if (!sim.ok) {
    std::fprintf(stderr, "replay mismatch: %s\n", sim.error.c_str());
    return kExitVerification;
  }
  std::printf("replay ok: %s after %d steps (final hash %016llx)\n",
              pommer::outcome_name(sim.outcome), static_cast<int>(replay.steps.size()),
              static_cast<unsigned long long>(sim.final_hash));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pommerman 2v2 team environment and agent harness"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "JSON config file (game/filter/ppo/train sections)");

  uint64_t seed = 0;
  bool seed_set = false;
  app.add_option("--seed", seed, "base random seed")->each([&](const std::string&) {
    seed_set = true;
  });

  auto* play = app.add_subcommand("play", "run one match");
  std::string agents_csv = "simple,simple,simple,simple";
  std::string replay_out;
  bool show_board = false;
  play->add_option("--agents", agents_csv, "4 comma-separated agent kinds (seats 0..3)");
  play->add_option("--replay", replay_out, "write a replay file");
  play->add_flag("--board", show_board, "print the final board");

  auto* tournament = app.add_subcommand("tournament", "team A vs team B over many seeds");
  std::string team_a = "simple,simple";
  std::string team_b = "static,static";
  int games = 20;
  std::string out_csv;
  tournament->add_option("--team-a", team_a, "seats 0 and 2 (comma-separated, or one kind)");
  tournament->add_option("--team-b", team_b, "seats 1 and 3");
  tournament->add_option("--games", games, "number of matches");
  tournament->add_option("--out", out_csv, "write the deterministic CSV report here");

  auto* train = app.add_subcommand("train", "curriculum PPO training");
  int iterations = 0;
  std::string out_dir;
  train->add_option("--iterations", iterations, "override max iterations");
  train->add_option("--out-dir", out_dir, "checkpoint/curve output directory");

  auto* bench = app.add_subcommand("bench", "throughput and latency measurements");
  std::string what = "engine";
  std::string kind = "simple";
  double seconds = 3.0;
  int bench_games = 5;
  bench->add_option("--target", what, "engine, filter, or agent");
  bench->add_option("--kind", kind, "agent kind for --target agent");
  bench->add_option("--seconds", seconds, "minimum engine benchmark duration");
  bench->add_option("--games", bench_games, "games for corpus/latency sampling");

  auto* verify = app.add_subcommand("verify-filter", "filter soundness sweep vs the oracle");
  int random_boards = 25;
  bool lookahead = false;
  std::string dump_dir;
  verify->add_option("--random-boards", random_boards, "scatter boards per size");
  verify->add_flag("--lookahead", lookahead, "verify with the strict bomb lookahead");
  verify->add_option("--dump", dump_dir, "write violation JSON files here");

  auto* replay = app.add_subcommand("replay", "resimulate and check a replay file");
  std::string replay_in;
  replay->add_option("file", replay_in, "replay file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (play->parsed()) return cmd_play(config_path, seed, agents_csv, replay_out, show_board);
    if (tournament->parsed())
      return cmd_tournament(config_path, seed, team_a, team_b, games, out_csv);
    if (train->parsed()) return cmd_train(config_path, seed, seed_set, iterations, out_dir);
    if (bench->parsed()) return cmd_bench(config_path, seed, what, kind, seconds, bench_games);
    if (verify->parsed()) return cmd_verify(seed, random_boards, lookahead, dump_dir);
    if (replay->parsed()) return cmd_replay(replay_in);
  } catch (const pommer::UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const pommer::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitUsage;
  } catch (const pommer::GenerationError& e) {
    std::fprintf(stderr, "board generation failed: %s\n", e.what());
    return kExitUsage;
  } catch (const pommer::NumericError& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return kExitDivergence;
  }
  return kExitUsage;
}
