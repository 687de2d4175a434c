#include "pommer/state.hpp"

#include "json.hpp"

namespace pommer {

using nlohmann::json;

const AgentState* GameState::agent_at(Position p) const {
  for (const AgentState& a : agents)
    if (a.alive && a.position == p) return &a;
  return nullptr;
}

const Bomb* GameState::bomb_at(Position p) const {
  for (const Bomb& b : bombs)
    if (b.position == p) return &b;
  return nullptr;
}

const ObservedBomb* Observation::bomb_at(Position p) const {
  for (const ObservedBomb& b : bombs)
    if (b.position == p) return &b;
  return nullptr;
}

const ObservedAgent* Observation::agent_at(Position p) const {
  for (const ObservedAgent& a : agents)
    if (a.position == p) return &a;
  return nullptr;
}

uint64_t state_hash(const GameState& state) {
  Fnv1a h;
  h.add_i32(state.config.board_size);
  h.add_i32(state.step);
  for (uint8_t c : state.terrain.raw()) h.add_byte(c);
  for (uint8_t c : state.powerups.raw()) h.add_byte(c);
  for (uint8_t c : state.hidden_powerups.raw()) h.add_byte(c);
  h.add_i32(static_cast<int32_t>(state.bombs.size()));
  for (const Bomb& b : state.bombs) {
    h.add_i32(b.position.row);
    h.add_i32(b.position.col);
    h.add_i32(b.owner);
    h.add_i32(b.blast_strength);
    h.add_i32(b.life);
    h.add_byte(static_cast<uint8_t>(b.velocity));
  }
  h.add_i32(static_cast<int32_t>(state.flames.size()));
  for (const Flame& f : state.flames) {
    h.add_i32(f.position.row);
    h.add_i32(f.position.col);
    h.add_i32(f.life);
  }
  for (const AgentState& a : state.agents) {
    h.add_i32(a.position.row);
    h.add_i32(a.position.col);
    h.add_byte(a.alive ? 1 : 0);
    h.add_i32(a.ammo);
    h.add_i32(a.max_ammo);
    h.add_i32(a.blast_strength);
    h.add_byte(a.can_kick ? 1 : 0);
  }
  return h.value();
}

std::string dump_board(const GameState& state) {
  const int n = state.size();
  std::string grid(n * (n + 1), '\n');
  auto put = [&](Position p, char c) { grid[p.row * (n + 1) + p.col] = c; };
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      char ch = '.';
      switch (static_cast<Cell>(state.terrain.at(r, c))) {
        case Cell::Passage: ch = '.'; break;
        case Cell::Rigid: ch = '#'; break;
        case Cell::Wood: ch = '+'; break;
      }
      if (ch == '.' && state.powerups.at(r, c) != kNoPowerup) {
        switch (static_cast<Powerup>(state.powerups.at(r, c) - 1)) {
          case Powerup::ExtraBomb: ch = 'a'; break;
          case Powerup::EnableKick: ch = 'k'; break;
          case Powerup::ExtraBlast: ch = 's'; break;
        }
      }
      put({r, c}, ch);
    }
  for (const Bomb& b : state.bombs) put(b.position, 'o');
  for (const Flame& f : state.flames) put(f.position, 'F');
  for (const AgentState& a : state.agents)
    if (a.alive) put(a.position, static_cast<char>('0' + a.id));
  return grid;
}

namespace {

json position_to_json(Position p) { return json::array({p.row, p.col}); }
Position position_from_json(const json& j) { return {j.at(0).get<int>(), j.at(1).get<int>()}; }

json config_to_json(const GameConfig& c) {
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

GameConfig config_from_json(const json& j) {
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

std::string state_to_json(const GameState& state) {
  json j;
  j["config"] = config_to_json(state.config);
  j["step"] = state.step;
  j["terrain"] = state.terrain.raw();
  j["powerups"] = state.powerups.raw();
  j["hidden_powerups"] = state.hidden_powerups.raw();
  j["bombs"] = json::array();
  for (const Bomb& b : state.bombs)
    j["bombs"].push_back({{"pos", position_to_json(b.position)},
                          {"owner", b.owner},
                          {"blast", b.blast_strength},
                          {"life", b.life},
                          {"vel", static_cast<int>(b.velocity)}});
  j["flames"] = json::array();
  for (const Flame& f : state.flames)
    j["flames"].push_back({{"pos", position_to_json(f.position)}, {"life", f.life}});
  j["agents"] = json::array();
  for (const AgentState& a : state.agents)
    j["agents"].push_back({{"id", a.id},
                           {"pos", position_to_json(a.position)},
                           {"alive", a.alive},
                           {"ammo", a.ammo},
                           {"max_ammo", a.max_ammo},
                           {"blast", a.blast_strength},
                           {"can_kick", a.can_kick}});
  // Generator state serialized verbatim so a round trip is exact.
  j["rng"] = state.rng.state_words();
  return j.dump();
}

GameState state_from_json(const std::string& text) {
  json j = json::parse(text);
  GameState s;
  s.config = config_from_json(j.at("config"));
  s.step = j.at("step").get<int>();
  const int n = s.config.board_size;
  s.terrain = Grid(n, 0);
  s.powerups = Grid(n, 0);
  s.hidden_powerups = Grid(n, 0);
  s.terrain.raw() = j.at("terrain").get<std::vector<uint8_t>>();
  s.powerups.raw() = j.at("powerups").get<std::vector<uint8_t>>();
  s.hidden_powerups.raw() = j.at("hidden_powerups").get<std::vector<uint8_t>>();
  if (s.terrain.raw().size() != static_cast<size_t>(n * n))
    throw UsageError("state json: terrain size mismatch");
  for (const json& b : j.at("bombs")) {
    Bomb bomb;
    bomb.position = position_from_json(b.at("pos"));
    bomb.owner = b.at("owner").get<int>();
    bomb.blast_strength = b.at("blast").get<int>();
    bomb.life = b.at("life").get<int>();
    bomb.velocity = static_cast<Direction>(b.at("vel").get<int>());
    s.bombs.push_back(bomb);
  }
  for (const json& f : j.at("flames"))
    s.flames.push_back({position_from_json(f.at("pos")), f.at("life").get<int>()});
  int idx = 0;
  for (const json& a : j.at("agents")) {
    AgentState& st = s.agents[idx++];
    st.id = a.at("id").get<int>();
    st.position = position_from_json(a.at("pos"));
    st.alive = a.at("alive").get<bool>();
    st.ammo = a.at("ammo").get<int>();
    st.max_ammo = a.at("max_ammo").get<int>();
    st.blast_strength = a.at("blast").get<int>();
    st.can_kick = a.at("can_kick").get<bool>();
  }
  s.rng.set_state_words(j.at("rng").get<std::array<uint64_t, 4>>());
  return s;
}

}  // namespace pommer
