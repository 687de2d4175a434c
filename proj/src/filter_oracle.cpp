#include "pommer/filter_oracle.hpp"

#include <algorithm>

namespace pommer {

namespace {

struct SimBomb {
  Position position;
  int strength;
  int life;
};

struct SimFlame {
  Position position;
  int life;
};

// Ray scan over observed terrain, written out directly: unknown and rigid
// cells stop the ray, the first wood cell is burned and stops it.
std::vector<Position> ray_cells(const Observation& obs, Position origin, int strength) {
  std::vector<Position> out;
  out.push_back(origin);
  const int dr[4] = {-1, 1, 0, 0};
  const int dc[4] = {0, 0, -1, 1};
  for (int dir = 0; dir < 4; ++dir) {
    for (int k = 1; k < strength; ++k) {
      Position p{origin.row + dr[dir] * k, origin.col + dc[dir] * k};
      if (!obs.terrain.in_bounds(p)) break;
      uint8_t t = obs.terrain.at(p);
      if (t == kUnknownCell || t == static_cast<uint8_t>(Cell::Rigid)) break;
      out.push_back(p);
      if (t == static_cast<uint8_t>(Cell::Wood)) break;
    }
  }
  return out;
}

}  // namespace

EscapeOracle::EscapeOracle(const Observation& obs, const std::optional<ObservedBomb>& extra,
                           const std::optional<Position>& searcher) {
  n_ = obs.board_size;
  horizon_ = obs.bomb_timer + obs.flame_life;
  searcher_ = searcher.value_or(obs.self_position);

  walkable_ = Grid(n_, 0);
  for (int r = 0; r < n_; ++r)
    for (int c = 0; c < n_; ++c)
      if (obs.terrain.at(r, c) == static_cast<uint8_t>(Cell::Passage)) walkable_.set(r, c, 1);

  blockers_ = Grid(n_, 0);
  for (const ObservedAgent& a : obs.agents)
    if (!(a.position == searcher_)) blockers_.set(a.position, 1);
  if (!(obs.self_position == searcher_)) blockers_.set(obs.self_position, 1);

  std::vector<SimBomb> bombs;
  for (const ObservedBomb& b : obs.bombs) bombs.push_back({b.position, b.blast_strength, b.life});
  if (extra) bombs.push_back({extra->position, extra->blast_strength, extra->life});
  std::vector<SimFlame> flames;
  for (int r = 0; r < n_; ++r)
    for (int c = 0; c < n_; ++c) {
      uint8_t f = obs.flame_lives.at(r, c);
      if (f != kUnknownCell && f > 0) flames.push_back({{r, c}, static_cast<int>(f)});
    }

  // Tick the static world forward, mirroring the engine's ordering: timers
  // down, explosions chain by rescanning, new flames lay, old flames decay.
  flames_.assign(horizon_ + 1, Grid(n_, 0));
  bombs_.assign(horizon_ + 1, Grid(n_, 0));
  for (const SimFlame& f : flames) flames_[0].set(f.position, 1);
  for (const SimBomb& b : bombs) bombs_[0].set(b.position, 1);

  for (int k = 1; k <= horizon_; ++k) {
    for (SimBomb& b : bombs) b.life -= 1;
    std::vector<char> exploding(bombs.size(), 0);
    for (size_t i = 0; i < bombs.size(); ++i)
      if (bombs[i].life <= 0) exploding[i] = 1;
    std::vector<Position> blast;
    for (bool grew = true; grew;) {
      grew = false;
      blast.clear();
      for (size_t i = 0; i < bombs.size(); ++i) {
        if (!exploding[i]) continue;
        for (Position p : ray_cells(obs, bombs[i].position, bombs[i].strength))
          blast.push_back(p);
      }
      for (size_t i = 0; i < bombs.size(); ++i) {
        if (exploding[i]) continue;
        for (Position p : blast)
          if (p == bombs[i].position) {
            exploding[i] = 1;
            grew = true;
            break;
          }
      }
    }
    for (SimFlame& f : flames) f.life -= 1;
    std::erase_if(flames, [](const SimFlame& f) { return f.life <= 0; });
    for (Position p : blast) {
      bool found = false;
      for (SimFlame& f : flames)
        if (f.position == p) {
          f.life = obs.flame_life;
          found = true;
        }
      if (!found) flames.push_back({p, obs.flame_life});
    }
    std::vector<SimBomb> kept;
    for (size_t i = 0; i < bombs.size(); ++i)
      if (!exploding[i]) kept.push_back(bombs[i]);
    bombs.swap(kept);

    for (const SimFlame& f : flames) flames_[k].set(f.position, 1);
    for (const SimBomb& b : bombs) bombs_[k].set(b.position, 1);
  }
}

bool EscapeOracle::entry_blocked(Position p) const {
  return !walkable_.in_bounds(p) || !walkable_.at(p) || blockers_.at(p);
}

bool EscapeOracle::dfs(Position p, int k) const {
  if (flames_[k].at(p)) return false;
  if (k >= horizon_) return true;
  uint8_t& failed = failed_[(k * n_ + p.row) * n_ + p.col];
  if (failed) return false;
  if (dfs(p, k + 1)) return true;  // stay, own bomb cell included
  const int dr[4] = {-1, 1, 0, 0};
  const int dc[4] = {0, 0, -1, 1};
  for (int dir = 0; dir < 4; ++dir) {
    Position q{p.row + dr[dir], p.col + dc[dir]};
    if (entry_blocked(q) || bombs_[k + 1].at(q)) continue;
    if (dfs(q, k + 1)) return true;
  }
  failed = 1;
  return false;
}

bool EscapeOracle::survivable(Action first) const {
  if (failed_.empty()) failed_.assign((horizon_ + 1) * n_ * n_, 0);
  Position entry = searcher_;
  Direction dir = action_direction(first);
  if (dir != Direction::None) {
    Position delta = direction_delta(dir);
    Position target{searcher_.row + delta.row, searcher_.col + delta.col};
    // A bomb on the target now means the mover stays put this step, whether
    // that is a kick attempt or a bounce; the engine moves agents before any
    // bomb leaves its cell.
    if (!entry_blocked(target) && !bombs_[0].at(target)) entry = target;
  }
  return dfs(entry, 1);
}

bool EscapeOracle::any_survivable() const {
  for (Action a : kAllActions)
    if (survivable(a)) return true;
  return false;
}

bool EscapeOracle::escapes() const {
  if (failed_.empty()) failed_.assign((horizon_ + 1) * n_ * n_, 0);
  if (dfs(searcher_, 1)) return true;  // staying put
  const int dr[4] = {-1, 1, 0, 0};
  const int dc[4] = {0, 0, -1, 1};
  for (int dir = 0; dir < 4; ++dir) {
    Position q{searcher_.row + dr[dir], searcher_.col + dc[dir]};
    if (entry_blocked(q) || bombs_[0].at(q)) continue;
    if (dfs(q, 1)) return true;
  }
  return false;
}

}  // namespace pommer
