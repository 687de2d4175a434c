#include "support/reference_engine.hpp"

#include <vector>

namespace pommer::testing {

bool reference_blast_covers(const Grid& terrain, Position origin, int strength, Position cell) {
  if (cell == origin) return true;
  if (cell.row != origin.row && cell.col != origin.col) return false;
  int dist = manhattan(origin, cell);
  if (dist > strength - 1) return false;
  int dr = (cell.row > origin.row) - (cell.row < origin.row);
  int dc = (cell.col > origin.col) - (cell.col < origin.col);
  Position p = origin;
  for (int k = 1; k <= dist; ++k) {
    p.row += dr;
    p.col += dc;
    if (static_cast<Cell>(terrain.at(p)) == Cell::Rigid) return false;
    if (p == cell) return true;
    if (static_cast<Cell>(terrain.at(p)) == Cell::Wood) return false;
  }
  return false;
}

Outcome reference_terminal(const GameState& state) {
  int alive_by_team[2] = {0, 0};
  for (const AgentState& a : state.agents)
    if (a.alive) alive_by_team[a.id & 1] += 1;
  if (alive_by_team[0] == 0 && alive_by_team[1] == 0) return Outcome::Draw;
  if (alive_by_team[1] == 0) return Outcome::Team0Wins;
  if (alive_by_team[0] == 0) return Outcome::Team1Wins;
  if (state.step >= state.config.max_steps) return Outcome::Draw;
  return Outcome::Ongoing;
}

std::pair<GameState, StepEvents> reference_step(const GameState& state,
                                                const std::array<Action, kNumAgents>& actions) {
  if (reference_terminal(state) != Outcome::Ongoing)
    throw UsageError("reference_step: state is terminal");

  GameState s = state;
  StepEvents ev{};
  const int n = s.config.board_size;

  auto passage = [&](Position p) {
    return s.terrain.in_bounds(p) && static_cast<Cell>(s.terrain.at(p)) == Cell::Passage;
  };
  auto bomb_index_at = [&](Position p) {
    for (size_t i = 0; i < s.bombs.size(); ++i)
      if (s.bombs[i].position == p) return static_cast<int>(i);
    return -1;
  };
  auto living_agent_at = [&](Position p) {
    for (int i = 0; i < kNumAgents; ++i)
      if (s.agents[i].alive && s.agents[i].position == p) return i;
    return -1;
  };

  // 1. Dead agents and un-payable Bomb actions act as Stop.
  Action act[kNumAgents];
  for (int i = 0; i < kNumAgents; ++i) {
    act[i] = actions[i];
    if (!s.agents[i].alive)
      act[i] = Action::Stop;
    else if (act[i] == Action::Bomb &&
             (s.agents[i].ammo <= 0 || bomb_index_at(s.agents[i].position) >= 0))
      act[i] = Action::Stop;
  }

  // 2. Placements.
  for (int i = 0; i < kNumAgents; ++i) {
    if (act[i] != Action::Bomb) continue;
    s.agents[i].ammo -= 1;
    Bomb b;
    b.position = s.agents[i].position;
    b.owner = i;
    b.blast_strength = s.agents[i].blast_strength;
    b.life = s.config.bomb_timer;
    b.velocity = Direction::None;
    s.bombs.push_back(b);
    ev.agent[i].placed_bomb = true;
  }

  // 3. Movement. Kick attempts leave the kicker in place; every positional
  // conflict bounces all participants, re-examined until nothing changes.
  Position want[kNumAgents];
  bool mover[kNumAgents] = {false, false, false, false};
  std::vector<Direction> kick(s.bombs.size(), Direction::None);
  for (int i = 0; i < kNumAgents; ++i) {
    want[i] = s.agents[i].position;
    if (!s.agents[i].alive) continue;
    Direction dir = action_direction(act[i]);
    if (dir == Direction::None) continue;
    Position target = s.agents[i].position + direction_delta(dir);
    if (!passage(target)) continue;
    int bi = bomb_index_at(target);
    if (bi >= 0) {
      if (!s.agents[i].can_kick) continue;
      if (living_agent_at(target) >= 0) continue;
      if (kick[bi] != Direction::None) continue;  // an earlier (lower) id owns the kick
      Position far = target + direction_delta(dir);
      if (!passage(far)) continue;
      if (bomb_index_at(far) >= 0 || living_agent_at(far) >= 0) continue;
      kick[bi] = dir;
      continue;
    }
    want[i] = target;
    mover[i] = true;
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (int i = 0; i < kNumAgents; ++i) {
      if (!mover[i]) continue;
      for (int j = 0; j < kNumAgents; ++j) {
        if (j == i || !s.agents[j].alive) continue;
        bool same_target = mover[j] && want[j] == want[i];
        bool swap = mover[j] && want[i] == s.agents[j].position && want[j] == s.agents[i].position;
        bool stationary_block = !mover[j] && want[i] == s.agents[j].position;
        if (same_target || swap) {
          mover[i] = false;
          mover[j] = false;
          want[i] = s.agents[i].position;
          want[j] = s.agents[j].position;
          changed = true;
        } else if (stationary_block) {
          mover[i] = false;
          want[i] = s.agents[i].position;
          changed = true;
        }
      }
    }
  }
  for (int i = 0; i < kNumAgents; ++i) s.agents[i].position = want[i];
  for (size_t bi = 0; bi < s.bombs.size(); ++bi)
    if (kick[bi] != Direction::None) s.bombs[bi].velocity = kick[bi];

  // 4. Bomb motion in storage order.
  for (size_t bi = 0; bi < s.bombs.size(); ++bi) {
    Bomb& b = s.bombs[bi];
    if (b.velocity == Direction::None) continue;
    Position next = b.position + direction_delta(b.velocity);
    if (!passage(next) || bomb_index_at(next) >= 0 || living_agent_at(next) >= 0) {
      b.velocity = Direction::None;
      continue;
    }
    b.position = next;
    if (s.config.kick_stops_on_powerup && s.powerups.at(next) != kNoPowerup)
      b.velocity = Direction::None;
  }

  // 5. Timers, then a worklist chain: every bomb covered by an explosion
  // explodes as well. Owners get their ammo back whether or not they live.
  for (Bomb& b : s.bombs) b.life -= 1;
  std::vector<char> boom(s.bombs.size(), 0);
  std::vector<size_t> work;
  for (size_t i = 0; i < s.bombs.size(); ++i)
    if (s.bombs[i].life <= 0) {
      boom[i] = 1;
      work.push_back(i);
    }
  while (!work.empty()) {
    size_t i = work.back();
    work.pop_back();
    for (size_t j = 0; j < s.bombs.size(); ++j) {
      if (boom[j]) continue;
      if (reference_blast_covers(s.terrain, s.bombs[i].position, s.bombs[i].blast_strength,
                                 s.bombs[j].position)) {
        boom[j] = 1;
        work.push_back(j);
      }
    }
  }
  bool any_explosion = false;
  Grid covered(n, 0);
  Grid owner_covered[kNumAgents] = {Grid(n, 0), Grid(n, 0), Grid(n, 0), Grid(n, 0)};
  for (size_t i = 0; i < s.bombs.size(); ++i) {
    if (!boom[i]) continue;
    any_explosion = true;
    s.agents[s.bombs[i].owner].ammo += 1;
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        if (!reference_blast_covers(s.terrain, s.bombs[i].position, s.bombs[i].blast_strength,
                                    {r, c}))
          continue;
        covered.set(r, c, 1);
        owner_covered[s.bombs[i].owner].set(r, c, 1);
      }
  }
  {
    std::vector<Bomb> kept;
    for (size_t i = 0; i < s.bombs.size(); ++i)
      if (!boom[i]) kept.push_back(s.bombs[i]);
    s.bombs.swap(kept);
  }

  // 6. Flames laid row-major over the covered cells; hitting an existing
  // flame refreshes it in place. 7. Only flames not touched this step decay.
  std::vector<char> fresh(s.flames.size(), 0);
  for (int r = 0; r < n && any_explosion; ++r)
    for (int c = 0; c < n; ++c) {
      if (!covered.at(r, c)) continue;
      bool found = false;
      for (size_t fi = 0; fi < s.flames.size(); ++fi)
        if (s.flames[fi].position == Position{r, c}) {
          s.flames[fi].life = s.config.flame_life;
          fresh[fi] = 1;
          found = true;
          break;
        }
      if (!found) {
        Flame f;
        f.position = {r, c};
        f.life = s.config.flame_life;
        s.flames.push_back(f);
        fresh.push_back(1);
      }
    }
  {
    std::vector<Flame> kept;
    for (size_t i = 0; i < s.flames.size(); ++i) {
      Flame f = s.flames[i];
      if (!fresh[i]) f.life -= 1;
      if (f.life > 0) kept.push_back(f);
    }
    s.flames.swap(kept);
  }

  // 8. Deaths.
  bool died[kNumAgents] = {false, false, false, false};
  for (int i = 0; i < kNumAgents; ++i) {
    if (!s.agents[i].alive) continue;
    for (const Flame& f : s.flames)
      if (f.position == s.agents[i].position) {
        s.agents[i].alive = false;
        s.agents[i].position = kDeadPosition;
        died[i] = true;
        break;
      }
  }
  for (int i = 0; i < kNumAgents; ++i) {
    ev.agent[i].died = died[i];
    ev.agent[i].teammate_died = died[teammate_of(i)];
    for (int j = 0; j < kNumAgents; ++j)
      if ((j & 1) != (i & 1) && died[j]) ev.agent[i].killed_enemy_count += 1;
  }

  // 9. Exposed items in the blast burn first; wood then opens and reveals its
  // hidden item, which therefore survives. Every owner covering a wood cell
  // gets credit for it.
  if (any_explosion) {
    if (s.config.flames_destroy_powerups)
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
          if (covered.at(r, c)) s.powerups.set(r, c, kNoPowerup);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        if (!covered.at(r, c)) continue;
        if (static_cast<Cell>(s.terrain.at(r, c)) != Cell::Wood) continue;
        s.terrain.set(r, c, static_cast<uint8_t>(Cell::Passage));
        if (s.hidden_powerups.at(r, c) != kNoPowerup) {
          s.powerups.set(r, c, s.hidden_powerups.at(r, c));
          s.hidden_powerups.set(r, c, kNoPowerup);
        }
        for (int o = 0; o < kNumAgents; ++o)
          if (owner_covered[o].at(r, c)) ev.agent[o].woods_destroyed += 1;
      }
  }

  // 10. Pickups by the agents still standing.
  for (int i = 0; i < kNumAgents; ++i) {
    AgentState& a = s.agents[i];
    if (!a.alive) continue;
    ev.agent[i].entered_cell = a.position;
    uint8_t code = s.powerups.at(a.position);
    if (code == kNoPowerup) continue;
    Powerup p = static_cast<Powerup>(code - 1);
    if (p == Powerup::ExtraBomb) {
      a.ammo += 1;
      a.max_ammo += 1;
    } else if (p == Powerup::EnableKick) {
      a.can_kick = true;
    } else {
      a.blast_strength += 1;
    }
    s.powerups.set(a.position, kNoPowerup);
    ev.agent[i].picked_powerup = p;
  }

  // 11.
  s.step += 1;
  return {std::move(s), ev};
}

}  // namespace pommer::testing
