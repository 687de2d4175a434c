#include "pommer/engine.hpp"

#include <algorithm>

namespace pommer {

std::vector<Position> blast_cells(Position origin, int strength, const Grid& terrain) {
  std::vector<Position> cells;
  cells.push_back(origin);
  const Direction rays[4] = {Direction::Up, Direction::Down, Direction::Left, Direction::Right};
  for (Direction d : rays) {
    Position delta = direction_delta(d);
    Position p = origin;
    for (int k = 1; k < strength; ++k) {
      p.row += delta.row;
      p.col += delta.col;
      if (!terrain.in_bounds(p)) break;
      Cell cell = static_cast<Cell>(terrain.at(p));
      if (cell == Cell::Rigid) break;
      cells.push_back(p);
      if (cell == Cell::Wood) break;  // wood terminates the ray inclusively
    }
  }
  return cells;
}

Outcome is_terminal(const GameState& state) {
  bool team0 = state.agents[0].alive || state.agents[2].alive;
  bool team1 = state.agents[1].alive || state.agents[3].alive;
  if (!team0 && !team1) return Outcome::Draw;
  if (team0 && !team1) return Outcome::Team0Wins;
  if (!team0 && team1) return Outcome::Team1Wins;
  if (state.step >= state.config.max_steps) return Outcome::Draw;
  return Outcome::Ongoing;
}

namespace {

bool bomb_on(const std::vector<Bomb>& bombs, Position p) {
  for (const Bomb& b : bombs)
    if (b.position == p) return true;
  return false;
}

int alive_agent_on(const std::array<AgentState, kNumAgents>& agents, Position p) {
  for (const AgentState& a : agents)
    if (a.alive && a.position == p) return a.id;
  return -1;
}

}  // namespace

std::pair<GameState, StepEvents> step(const GameState& state,
                                      const std::array<Action, kNumAgents>& actions_in) {
  if (is_terminal(state) != Outcome::Ongoing) throw UsageError("step: state is terminal");

  GameState s = state;
  StepEvents events{};
  std::array<Action, kNumAgents> act = actions_in;
  const int n = s.size();

  // Phase 1: dead agents and un-payable Bomb actions become Stop.
  for (int i = 0; i < kNumAgents; ++i) {
    AgentState& a = s.agents[i];
    if (!a.alive) {
      act[i] = Action::Stop;
      continue;
    }
    if (act[i] == Action::Bomb && (a.ammo <= 0 || bomb_on(s.bombs, a.position)))
      act[i] = Action::Stop;
  }

  // Phase 2: bomb placement.
  for (int i = 0; i < kNumAgents; ++i) {
    if (act[i] != Action::Bomb) continue;
    AgentState& a = s.agents[i];
    a.ammo -= 1;
    s.bombs.push_back({a.position, i, a.blast_strength, s.config.bomb_timer, Direction::None});
    events.agent[i].placed_bomb = true;
  }

  // Phase 3: movement. Kickers stay in place and set the bomb's velocity;
  // position conflicts bounce everyone involved, iterated to fixpoint.
  std::array<Position, kNumAgents> desired;
  std::array<bool, kNumAgents> moving{};
  struct Kick {
    int bomb_index;
    Direction dir;
  };
  std::vector<Kick> kicks;
  std::vector<int> kicked_bombs;  // lowest agent id wins a contested bomb

  for (int i = 0; i < kNumAgents; ++i) {
    const AgentState& a = s.agents[i];
    desired[i] = a.position;
    if (!a.alive) continue;
    Direction dir = action_direction(act[i]);
    if (dir == Direction::None) continue;
    Position delta = direction_delta(dir);
    Position target{a.position.row + delta.row, a.position.col + delta.col};
    if (!s.terrain.in_bounds(target)) continue;
    Cell cell = static_cast<Cell>(s.terrain.at(target));
    if (cell != Cell::Passage) continue;

    int bomb_index = -1;
    for (size_t bi = 0; bi < s.bombs.size(); ++bi)
      if (s.bombs[bi].position == target) bomb_index = static_cast<int>(bi);

    if (bomb_index >= 0) {
      // A bomb someone stands on (its placer) cannot be kicked.
      if (!a.can_kick || alive_agent_on(s.agents, target) >= 0) continue;
      if (std::find(kicked_bombs.begin(), kicked_bombs.end(), bomb_index) != kicked_bombs.end())
        continue;
      Position far{target.row + delta.row, target.col + delta.col};
      if (!s.terrain.in_bounds(far)) continue;
      if (static_cast<Cell>(s.terrain.at(far)) != Cell::Passage) continue;
      if (bomb_on(s.bombs, far) || alive_agent_on(s.agents, far) >= 0) continue;
      kicks.push_back({bomb_index, dir});
      kicked_bombs.push_back(bomb_index);
      continue;  // kicker stays adjacent
    }
    desired[i] = target;
    moving[i] = true;
  }

  for (bool changed = true; changed;) {
    changed = false;
    for (int i = 0; i < kNumAgents; ++i) {
      if (!moving[i]) continue;
      for (int j = 0; j < kNumAgents; ++j) {
        if (i == j || !s.agents[j].alive) continue;
        bool same_target = moving[j] && desired[j] == desired[i];
        bool swap = moving[j] && desired[i] == s.agents[j].position &&
                    desired[j] == s.agents[i].position;
        bool blocked = !moving[j] && desired[i] == s.agents[j].position;
        if (same_target || swap) {
          moving[i] = moving[j] = false;
          desired[i] = s.agents[i].position;
          desired[j] = s.agents[j].position;
          changed = true;
        } else if (blocked) {
          moving[i] = false;
          desired[i] = s.agents[i].position;
          changed = true;
        }
      }
    }
  }
  for (int i = 0; i < kNumAgents; ++i) s.agents[i].position = desired[i];
  for (const Kick& k : kicks) s.bombs[k.bomb_index].velocity = k.dir;

  // Phase 4: bomb motion, in storage order.
  for (Bomb& b : s.bombs) {
    if (b.velocity == Direction::None) continue;
    Position delta = direction_delta(b.velocity);
    Position next{b.position.row + delta.row, b.position.col + delta.col};
    bool blocked = !s.terrain.in_bounds(next) ||
                   static_cast<Cell>(s.terrain.at(next)) != Cell::Passage ||
                   bomb_on(s.bombs, next) || alive_agent_on(s.agents, next) >= 0;
    if (blocked) {
      b.velocity = Direction::None;
      continue;
    }
    b.position = next;
    if (s.config.kick_stops_on_powerup && s.powerups.at(next) != kNoPowerup)
      b.velocity = Direction::None;
  }

  // Phase 5: timers and explosions, chained to fixpoint against this step's
  // terrain. Owners regain one ammo per exploded bomb, dead or alive.
  for (Bomb& b : s.bombs) b.life -= 1;
  std::vector<char> exploded(s.bombs.size(), 0);
  for (size_t i = 0; i < s.bombs.size(); ++i)
    if (s.bombs[i].life <= 0) exploded[i] = 1;
  std::vector<std::vector<Position>> blasts(s.bombs.size());
  for (bool grew = true; grew;) {
    grew = false;
    for (size_t i = 0; i < s.bombs.size(); ++i) {
      if (!exploded[i] || !blasts[i].empty()) continue;
      blasts[i] = blast_cells(s.bombs[i].position, s.bombs[i].blast_strength, s.terrain);
      for (size_t j = 0; j < s.bombs.size(); ++j) {
        if (exploded[j]) continue;
        for (Position p : blasts[i])
          if (p == s.bombs[j].position) {
            exploded[j] = 1;
            grew = true;
            break;
          }
      }
    }
  }

  Grid blast_union(n, 0);
  std::array<Grid, kNumAgents> owner_blast;
  bool any_explosion = false;
  for (size_t i = 0; i < s.bombs.size(); ++i) {
    if (!exploded[i]) continue;
    any_explosion = true;
    s.agents[s.bombs[i].owner].ammo += 1;
    if (owner_blast[s.bombs[i].owner].size() == 0) owner_blast[s.bombs[i].owner] = Grid(n, 0);
    for (Position p : blasts[i]) {
      blast_union.set(p, 1);
      owner_blast[s.bombs[i].owner].set(p, 1);
    }
  }
  if (any_explosion) {
    std::vector<Bomb> kept;
    kept.reserve(s.bombs.size());
    for (size_t i = 0; i < s.bombs.size(); ++i)
      if (!exploded[i]) kept.push_back(s.bombs[i]);
    s.bombs.swap(kept);
  }

  // Phase 6: lay flames over the blast, row-major; re-ignition refreshes.
  // Phase 7: pre-existing flames decay.
  std::vector<char> fresh(s.flames.size(), 0);
  if (any_explosion)
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        if (!blast_union.at(r, c)) continue;
        bool found = false;
        for (size_t fi = 0; fi < s.flames.size(); ++fi)
          if (s.flames[fi].position == Position{r, c}) {
            s.flames[fi].life = s.config.flame_life;
            fresh[fi] = 1;
            found = true;
            break;
          }
        if (!found) {
          s.flames.push_back({{r, c}, s.config.flame_life});
          fresh.push_back(1);
        }
      }
  {
    std::vector<Flame> kept;
    kept.reserve(s.flames.size());
    for (size_t i = 0; i < s.flames.size(); ++i) {
      Flame f = s.flames[i];
      if (!fresh[i]) f.life -= 1;
      if (f.life > 0) kept.push_back(f);
    }
    s.flames.swap(kept);
  }

  // Phase 8: agents on flame cells die.
  Grid flame_now(n, 0);
  for (const Flame& f : s.flames) flame_now.set(f.position, 1);
  std::array<bool, kNumAgents> died{};
  for (AgentState& a : s.agents) {
    if (!a.alive) continue;
    if (flame_now.at(a.position)) {
      a.alive = false;
      a.position = kDeadPosition;
      died[a.id] = true;
    }
  }
  for (int i = 0; i < kNumAgents; ++i) {
    events.agent[i].died = died[i];
    events.agent[i].teammate_died = died[teammate_of(i)];
    for (int j = 0; j < kNumAgents; ++j)
      if (team_of(j) != team_of(i) && died[j]) events.agent[i].killed_enemy_count += 1;
  }

  // Phase 9: items burn before wood opens, so a just-revealed item survives
  // the blast that exposed it.
  if (any_explosion) {
    if (s.config.flames_destroy_powerups)
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
          if (blast_union.at(r, c)) s.powerups.set(r, c, kNoPowerup);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        if (!blast_union.at(r, c)) continue;
        if (static_cast<Cell>(s.terrain.at(r, c)) != Cell::Wood) continue;
        s.terrain.set(r, c, static_cast<uint8_t>(Cell::Passage));
        if (s.hidden_powerups.at(r, c) != kNoPowerup) {
          s.powerups.set(r, c, s.hidden_powerups.at(r, c));
          s.hidden_powerups.set(r, c, kNoPowerup);
        }
        for (int o = 0; o < kNumAgents; ++o)
          if (owner_blast[o].size() > 0 && owner_blast[o].at(r, c))
            events.agent[o].woods_destroyed += 1;
      }
  }

  // Phase 10: pickups by surviving agents.
  for (AgentState& a : s.agents) {
    if (!a.alive) continue;
    events.agent[a.id].entered_cell = a.position;
    uint8_t code = s.powerups.at(a.position);
    if (code == kNoPowerup) continue;
    Powerup p = static_cast<Powerup>(code - 1);
    switch (p) {
      case Powerup::ExtraBomb:
        a.ammo += 1;
        a.max_ammo += 1;
        break;
      case Powerup::EnableKick:
        a.can_kick = true;
        break;
      case Powerup::ExtraBlast:
        a.blast_strength += 1;
        break;
    }
    s.powerups.set(a.position, kNoPowerup);
    events.agent[a.id].picked_powerup = p;
  }

  // Phase 11.
  s.step += 1;
  return {std::move(s), events};
}

Observation observe(const GameState& state, int agent_id) {
  const AgentState& self = state.agents[agent_id];
  if (!self.alive) throw UsageError("observe: agent is dead");

  const int n = state.size();
  Observation obs;
  obs.self_id = agent_id;
  obs.self_position = self.position;
  obs.ammo = self.ammo;
  obs.blast_strength = self.blast_strength;
  obs.can_kick = self.can_kick;
  obs.step = state.step;
  obs.teammate_alive = state.agents[teammate_of(agent_id)].alive;
  obs.board_size = n;
  obs.view_radius = state.config.view_radius;
  obs.bomb_timer = state.config.bomb_timer;
  obs.flame_life = state.config.flame_life;
  obs.max_steps = state.config.max_steps;

  obs.terrain = Grid(n, kUnknownCell);
  obs.powerups = Grid(n, kUnknownCell);
  obs.flame_lives = Grid(n, kUnknownCell);

  const int r0 = std::max(0, self.position.row - obs.view_radius);
  const int r1 = std::min(n - 1, self.position.row + obs.view_radius);
  const int c0 = std::max(0, self.position.col - obs.view_radius);
  const int c1 = std::min(n - 1, self.position.col + obs.view_radius);
  for (int r = r0; r <= r1; ++r)
    for (int c = c0; c <= c1; ++c) {
      obs.terrain.set(r, c, state.terrain.at(r, c));
      obs.powerups.set(r, c, state.powerups.at(r, c));
      obs.flame_lives.set(r, c, 0);
    }
  for (const Flame& f : state.flames)
    if (obs.visible(f.position)) obs.flame_lives.set(f.position, static_cast<uint8_t>(f.life));
  for (const Bomb& b : state.bombs)
    if (obs.visible(b.position))
      obs.bombs.push_back({b.position, b.life, b.blast_strength, b.velocity});
  for (const AgentState& a : state.agents)
    if (a.alive && a.id != agent_id && obs.visible(a.position))
      obs.agents.push_back({a.id, a.position});
  return obs;
}

}  // namespace pommer
