#include "pommer/replay.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace pommer {

using nlohmann::json;

namespace {

json config_json(const GameConfig& c) {
  return {{"board_size", c.board_size},
          {"rigid_count", c.rigid_count},
          {"wood_count", c.wood_count},
          {"powerup_probability", c.powerup_probability},
          {"bomb_timer", c.bomb_timer},
          {"flame_life", c.flame_life},
          {"initial_ammo", c.initial_ammo},
          {"initial_blast", c.initial_blast},
          {"max_steps", c.max_steps},
          {"view_radius", c.view_radius},
          {"rng_seed", c.rng_seed},
          {"kick_stops_on_powerup", c.kick_stops_on_powerup},
          {"flames_destroy_powerups", c.flames_destroy_powerups}};
}

GameConfig config_from(const json& j) {
  GameConfig c;
  c.board_size = j.at("board_size").get<int>();
  c.rigid_count = j.at("rigid_count").get<int>();
  c.wood_count = j.at("wood_count").get<int>();
  c.powerup_probability = j.at("powerup_probability").get<double>();
  c.bomb_timer = j.at("bomb_timer").get<int>();
  c.flame_life = j.at("flame_life").get<int>();
  c.initial_ammo = j.at("initial_ammo").get<int>();
  c.initial_blast = j.at("initial_blast").get<int>();
  c.max_steps = j.at("max_steps").get<int>();
  c.view_radius = j.at("view_radius").get<int>();
  c.rng_seed = j.at("rng_seed").get<uint64_t>();
  c.kick_stops_on_powerup = j.at("kick_stops_on_powerup").get<bool>();
  c.flames_destroy_powerups = j.at("flames_destroy_powerups").get<bool>();
  return c;
}

}  // namespace

std::string replay_to_text(const Replay& replay) {
  std::ostringstream out;
  json header = {{"format", "pommer-replay"},
                 {"version", kReplayVersion},
                 {"config", config_json(replay.config)},
                 {"seed", replay.match_seed},
                 {"roster", replay.roster}};
  out << header.dump() << "\n";
  for (const ReplayStepRecord& s : replay.steps) {
    json line;
    json acts = json::array();
    for (Action a : s.actions) acts.push_back(static_cast<int>(a));
    line["a"] = acts;
    line["d"] = s.deaths;
    out << line.dump() << "\n";
  }
  json trailer = {{"outcome", outcome_name(replay.outcome)},
                  {"final_hash", replay.final_hash},
                  {"steps", replay.steps.size()}};
  out << trailer.dump() << "\n";
  return out.str();
}

Replay replay_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line))
    if (!line.empty()) lines.push_back(line);
  if (lines.size() < 2) throw UsageError("replay: file too short");

  Replay r;
  json header = json::parse(lines.front());
  if (header.at("format").get<std::string>() != "pommer-replay")
    throw UsageError("replay: not a replay file");
  if (header.at("version").get<int>() != kReplayVersion)
    throw UsageError("replay: unsupported version");
  r.config = config_from(header.at("config"));
  r.match_seed = header.at("seed").get<uint64_t>();
  auto roster = header.at("roster").get<std::vector<std::string>>();
  if (roster.size() != kNumAgents) throw UsageError("replay: roster must list 4 agents");
  for (int i = 0; i < kNumAgents; ++i) r.roster[i] = roster[i];

  json trailer = json::parse(lines.back());
  if (!parse_outcome(trailer.at("outcome").get<std::string>(), r.outcome))
    throw UsageError("replay: bad outcome in trailer");
  r.final_hash = trailer.at("final_hash").get<uint64_t>();
  size_t declared_steps = trailer.at("steps").get<size_t>();

  for (size_t i = 1; i + 1 < lines.size(); ++i) {
    json sj = json::parse(lines[i]);
    ReplayStepRecord rec;
    auto acts = sj.at("a").get<std::vector<int>>();
    if (acts.size() != kNumAgents) throw UsageError("replay: step needs 4 actions");
    for (int k = 0; k < kNumAgents; ++k) {
      if (acts[k] < 0 || acts[k] >= kNumActions) throw UsageError("replay: bad action value");
      rec.actions[k] = static_cast<Action>(acts[k]);
    }
    rec.deaths = sj.at("d").get<std::vector<int>>();
    r.steps.push_back(rec);
  }
  if (r.steps.size() != declared_steps) throw UsageError("replay: step count mismatch");
  return r;
}

void write_replay_file(const std::string& path, const Replay& replay) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("replay: cannot write " + path);
  out << replay_to_text(replay);
}

Replay read_replay_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("replay: cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return replay_from_text(ss.str());
}

ResimulationResult resimulate(const Replay& replay) {
  ResimulationResult res;
  GameState state = generate_board(replay.config);
  for (size_t i = 0; i < replay.steps.size(); ++i) {
    if (is_terminal(state) != Outcome::Ongoing) {
      res.error = "terminal before recorded step " + std::to_string(i);
      return res;
    }
    auto [next, events] = step(state, replay.steps[i].actions);
    std::vector<int> deaths;
    for (int a = 0; a < kNumAgents; ++a)
      if (events.agent[a].died) deaths.push_back(a);
    if (deaths != replay.steps[i].deaths) {
      res.error = "death mismatch at step " + std::to_string(i);
      return res;
    }
    state = std::move(next);
  }
  res.outcome = is_terminal(state);
  res.final_hash = state_hash(state);
  res.final_state = std::move(state);
  if (res.outcome != replay.outcome)
    res.error = "outcome mismatch";
  else if (res.final_hash != replay.final_hash)
    res.error = "final state hash mismatch";
  else
    res.ok = true;
  return res;
}

}  // namespace pommer
