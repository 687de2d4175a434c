#include "pommer/filter.hpp"

#include <algorithm>

namespace pommer {

namespace {

constexpr int kMaxHorizon = 62;  // flame bits live in a uint64 per cell

// Blast ray over observed terrain: stops before Rigid and before unknown
// cells, includes the first Wood cell and stops there.
template <typename Emit>
void observed_blast(const Observation& obs, Position origin, int strength, Emit&& emit) {
  emit(origin);
  const Direction rays[4] = {Direction::Up, Direction::Down, Direction::Left, Direction::Right};
  for (Direction d : rays) {
    Position delta = direction_delta(d);
    Position p = origin;
    for (int k = 1; k < strength; ++k) {
      p.row += delta.row;
      p.col += delta.col;
      if (!obs.terrain.in_bounds(p)) break;
      uint8_t t = obs.terrain.at(p);
      if (t == kUnknownCell || t == static_cast<uint8_t>(Cell::Rigid)) break;
      emit(p);
      if (t == static_cast<uint8_t>(Cell::Wood)) break;
    }
  }
}

}  // namespace

BombTimeline::BombTimeline(const Observation& obs, const std::optional<ObservedBomb>& extra,
                           const std::optional<Position>& searcher) {
  n_ = obs.board_size;
  horizon_ = std::min(obs.bomb_timer + obs.flame_life, kMaxHorizon);
  flame_mask_.assign(n_ * n_, 0);
  blocked_until_.assign(n_ * n_, 0);
  walkable_ = Grid(n_, 0);
  agent_block_ = Grid(n_, 0);

  for (int r = 0; r < n_; ++r)
    for (int c = 0; c < n_; ++c)
      if (obs.terrain.at(r, c) == static_cast<uint8_t>(Cell::Passage)) walkable_.set(r, c, 1);
  const Position mover = searcher.value_or(obs.self_position);
  for (const ObservedAgent& a : obs.agents)
    if (a.position != mover) agent_block_.set(a.position, 1);
  if (mover != obs.self_position) agent_block_.set(obs.self_position, 1);

  std::vector<ObservedBomb> bombs = obs.bombs;
  if (extra) bombs.push_back(*extra);

  // Chain relaxation: a bomb covered by an earlier explosion adopts that
  // explosion's time. Fixpoint over pairs; bomb counts are small.
  std::vector<std::vector<Position>> blasts(bombs.size());
  std::vector<int> explode_at(bombs.size());
  for (size_t i = 0; i < bombs.size(); ++i) {
    explode_at[i] = std::min(bombs[i].life, horizon_);
    observed_blast(obs, bombs[i].position, bombs[i].blast_strength,
                   [&](Position p) { blasts[i].push_back(p); });
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (size_t i = 0; i < bombs.size(); ++i)
      for (size_t j = 0; j < bombs.size(); ++j) {
        if (i == j) continue;
        for (Position p : blasts[i])
          if (p == bombs[j].position && explode_at[i] < explode_at[j]) {
            explode_at[j] = explode_at[i];
            changed = true;
            break;
          }
      }
  }

  for (int r = 0; r < n_; ++r)
    for (int c = 0; c < n_; ++c) {
      uint8_t f = obs.flame_lives.at(r, c);
      if (f == kUnknownCell || f == 0) continue;
      int last = std::min(static_cast<int>(f) - 1, horizon_);
      for (int k = 0; k <= last; ++k) flame_mask_[r * n_ + c] |= 1ull << k;
    }
  for (size_t i = 0; i < bombs.size(); ++i) {
    int first = explode_at[i];
    int last = std::min(first + obs.flame_life - 1, horizon_);
    uint64_t bits = 0;
    for (int k = first; k <= last; ++k) bits |= 1ull << k;
    for (Position p : blasts[i]) flame_mask_[p.row * n_ + p.col] |= bits;
    int idx = bombs[i].position.row * n_ + bombs[i].position.col;
    blocked_until_[idx] = std::max(blocked_until_[idx], explode_at[i]);
  }
}

bool BombTimeline::walkable_terrain(Position p) const {
  return walkable_.in_bounds(p) && walkable_.at(p) != 0;
}

int BombTimeline::search(Position cell, int k) const {
  if (flame_at(cell, k)) return k - 1;
  if (k >= horizon_) return horizon_ + 1;
  int& slot = memo_[(k * n_ + cell.row) * n_ + cell.col];
  if (slot != -1) return slot;
  slot = -2;  // in progress; unreachable since k only grows
  int best = search(cell, k + 1);  // staying is always available
  if (best <= horizon_) {
    const Position deltas[4] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
    for (Position d : deltas) {
      Position q{cell.row + d.row, cell.col + d.col};
      if (!walkable_terrain(q) || agent_block_.at(q) || bomb_blocks(q, k + 1)) continue;
      best = std::max(best, search(q, k + 1));
      if (best > horizon_) break;
    }
  }
  slot = best;
  return best;
}

int BombTimeline::survival_time(Position cell) const {
  if (memo_.empty()) memo_.assign((horizon_ + 1) * n_ * n_, -1);
  return search(cell, 1);
}

std::vector<Position> observed_blast_cells(const Observation& obs, Position origin, int strength) {
  std::vector<Position> cells;
  observed_blast(obs, origin, strength, [&](Position p) { cells.push_back(p); });
  return cells;
}

bool position_doomed(const BombTimeline& timeline, Position cell) {
  if (!timeline.doomed(cell)) return false;
  const Position deltas[4] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
  for (Position d : deltas) {
    Position q{cell.row + d.row, cell.col + d.col};
    if (!timeline.walkable_terrain(q) || timeline.agent_blocks(q) || timeline.bomb_blocks(q, 1)) {
      continue;
    }
    if (!timeline.doomed(q)) return false;
  }
  return true;
}

const char* reject_reason_name(RejectReason r) {
  switch (r) {
    case RejectReason::FlameNextStep: return "flame_next_step";
    case RejectReason::DoomedTarget: return "doomed_target";
    case RejectReason::TeammateTooClose: return "teammate_too_close";
    case RejectReason::CoveredByBlast: return "covered_by_blast";
    case RejectReason::Illegal: return "illegal";
  }
  return "?";
}

std::vector<Action> FilterResult::allowed_list() const {
  std::vector<Action> out;
  for (int i = 0; i < kNumActions; ++i)
    if (allowed[i]) out.push_back(static_cast<Action>(i));
  return out;
}

std::vector<Position> next_step_flames(const Observation& obs) {
  BombTimeline t(obs);
  std::vector<Position> cells;
  for (int r = 0; r < obs.board_size; ++r)
    for (int c = 0; c < obs.board_size; ++c)
      if (t.flame_at({r, c}, 1)) cells.push_back({r, c});
  return cells;
}

std::vector<Position> doomed_positions(const Observation& obs) {
  BombTimeline t(obs);
  std::vector<Position> cells;
  Position own = obs.self_position;
  auto consider = [&](Position p, bool is_own) {
    if (!is_own) {
      if (!t.walkable_terrain(p) || t.agent_blocks(p) || obs.bomb_at(p)) return;
    }
    if (t.doomed(p)) cells.push_back(p);
  };
  consider(own, true);
  const Position deltas[4] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
  for (Position d : deltas) consider({own.row + d.row, own.col + d.col}, false);
  return cells;
}

FilterResult filter_actions(const Observation& obs, const FilterConfig& cfg) {
  BombTimeline t(obs);
  FilterResult res;
  const Position own = obs.self_position;

  auto entry_reason = [&](Position entry) -> std::optional<RejectReason> {
    if (t.flame_at(entry, 1)) return RejectReason::FlameNextStep;
    if (t.doomed(entry)) return RejectReason::DoomedTarget;
    return std::nullopt;
  };

  for (Action a : kMoveActions) {
    std::optional<RejectReason> reason;
    if (a == Action::Stop) {
      reason = entry_reason(own);
    } else {
      Position delta = direction_delta(action_direction(a));
      Position target{own.row + delta.row, own.col + delta.col};
      if (!t.walkable_terrain(target) || t.agent_blocks(target)) {
        reason = RejectReason::Illegal;
      } else if (obs.bomb_at(target)) {
        // Kicking leaves the kicker in place, so its safety equals Stop's.
        reason = obs.can_kick ? entry_reason(own)
                              : std::optional<RejectReason>(RejectReason::Illegal);
      } else {
        reason = entry_reason(target);
      }
    }
    int idx = static_cast<int>(a);
    res.allowed[idx] = !reason.has_value();
    res.rejected[idx] = reason;
  }

  {
    std::optional<RejectReason> reason;
    if (obs.ammo <= 0 || obs.bomb_at(own)) {
      reason = RejectReason::Illegal;
    } else {
      const ObservedAgent* teammate = nullptr;
      for (const ObservedAgent& a : obs.agents)
        if (a.id == teammate_of(obs.self_id)) teammate = &a;
      // The teammate's strength is unobservable; assume it matches our own.
      if (teammate &&
          manhattan(own, teammate->position) < obs.blast_strength + obs.blast_strength) {
        reason = RejectReason::TeammateTooClose;
      } else {
        bool covered = false;
        for (const ObservedBomb& b : obs.bombs) {
          observed_blast(obs, b.position, b.blast_strength, [&](Position p) {
            if (p == own) covered = true;
          });
          if (covered) break;
        }
        if (covered)
          reason = RejectReason::CoveredByBlast;
        else if (cfg.lookahead_bomb_check && !lookahead_bomb_check(obs))
          reason = RejectReason::DoomedTarget;
      }
    }
    int idx = static_cast<int>(Action::Bomb);
    res.allowed[idx] = !reason.has_value();
    res.rejected[idx] = reason;
  }

  bool any = false;
  for (bool b : res.allowed) any = any || b;
  if (!any) {
    // Everything is lethal under the model; keep the action that stays
    // flame-free the longest. Stop comes first, so kick-moves (same survival
    // as Stop) never win the tie and are skipped.
    Action best = Action::Stop;
    int best_time = t.survival_time(own);
    for (Action a : {Action::Up, Action::Down, Action::Left, Action::Right}) {
      Position delta = direction_delta(action_direction(a));
      Position target{own.row + delta.row, own.col + delta.col};
      if (!t.walkable_terrain(target) || t.agent_blocks(target) || obs.bomb_at(target)) continue;
      int st = t.survival_time(target);
      if (st > best_time) {
        best_time = st;
        best = a;
      }
    }
    res.allowed[static_cast<int>(best)] = true;
    res.rejected[static_cast<int>(best)].reset();
    res.used_fallback = true;
  }
  return res;
}

bool lookahead_bomb_check(const Observation& obs) {
  ObservedBomb hypothetical{obs.self_position, obs.bomb_timer, obs.blast_strength,
                            Direction::None};
  BombTimeline t(obs, hypothetical);
  return !t.doomed(obs.self_position);
}

}  // namespace pommer
