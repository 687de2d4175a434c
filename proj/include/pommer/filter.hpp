#pragma once

#include <array>
#include <optional>
#include <vector>

#include "pommer/state.hpp"

namespace pommer {

// Flame forecast from one observation under the shipped model: every visible
// bomb is static (kicked bombs included), other agents are frozen, and chains
// propagate (a bomb inside another's blast explodes at the earlier time).
// k = 0 is the current state; a bomb with life L burns its blast cells over
// k in [L, L+flame_life-1]; a flame with life f covers k in [0, f-1]. The
// horizon bomb_timer + flame_life is the last step any visible threat can
// reach. Blast rays and escape paths treat cells outside the view window as
// blocked; the filter never uses information the agent cannot see.
class BombTimeline {
 public:
  // extra, when given, is a hypothetical bomb added before chaining (its life
  // counts from now, so a bomb placed this step has life = bomb_timer).
  // searcher names the agent whose escape is being scored; every other agent
  // (the observer included) freezes into an obstacle. Defaults to the
  // observer itself.
  explicit BombTimeline(const Observation& obs,
                        const std::optional<ObservedBomb>& extra = std::nullopt,
                        const std::optional<Position>& searcher = std::nullopt);

  int horizon() const { return horizon_; }
  int board_size() const { return n_; }
  bool flame_at(Position p, int k) const {
    return (flame_mask_[p.row * n_ + p.col] >> k) & 1;
  }
  // True while an unexploded bomb physically occupies p at time k.
  bool bomb_blocks(Position p, int k) const {
    return k < blocked_until_[p.row * n_ + p.col];
  }
  // On-board, inside the view window, and not Rigid/Wood.
  bool walkable_terrain(Position p) const;
  // A frozen other agent stands on p.
  bool agent_blocks(Position p) const { return agent_block_.at(p) != 0; }

  // Longest survivable prefix entering `cell` at time k=1: the largest time
  // the agent can remain flame-free, horizon()+1 when it can outlive every
  // visible threat. Memoized exhaustive search over (cell, time); staying put
  // is always available (an agent may sit on its own bomb), moving into a
  // cell is not while a bomb or frozen agent occupies it.
  int survival_time(Position cell) const;
  bool doomed(Position cell) const { return survival_time(cell) <= horizon_; }

 private:
  int n_ = 0;
  int horizon_ = 0;
  std::vector<uint64_t> flame_mask_;  // bit k set when the cell burns at time k
  std::vector<int> blocked_until_;    // bomb occupies the cell for k < value
  Grid walkable_;
  Grid agent_block_;
  mutable std::vector<int> memo_;  // survival search cache, lazily built
  int search(Position cell, int k) const;
};

enum class RejectReason : uint8_t {
  FlameNextStep,
  DoomedTarget,
  TeammateTooClose,
  CoveredByBlast,
  Illegal,
};

const char* reject_reason_name(RejectReason r);

struct FilterResult {
  std::array<bool, kNumActions> allowed{};
  std::array<std::optional<RejectReason>, kNumActions> rejected{};
  // Set when every action was rejected; `allowed` then holds only the action
  // with the latest predicted flame contact (ties: Stop<Up<Down<Left<Right).
  bool used_fallback = false;

  bool is_allowed(Action a) const { return allowed[static_cast<int>(a)]; }
  std::vector<Action> allowed_list() const;
};

// True when an agent standing on `cell` now cannot avoid flame contact: the
// cell itself is doomed and so is every walkable, unoccupied neighbor.
bool position_doomed(const BombTimeline& timeline, Position cell);

// Blast ray cells for a bomb at origin over observed terrain (stops before
// Rigid and unknown cells, includes the first Wood cell). Row order: origin,
// then the up, down, left, right rays outward.
std::vector<Position> observed_blast_cells(const Observation& obs, Position origin, int strength);

// Cells burning at k=1, row-major order.
std::vector<Position> next_step_flames(const Observation& obs);

// Doomed cells among the agent's move range (own cell and the four walkable
// neighbors): entering the cell next step leads to certain flame contact
// within the horizon, whatever the agent does afterwards.
std::vector<Position> doomed_positions(const Observation& obs);

// The ActionFilter. Movement is rejected when the target is blocked
// (off-board, Rigid/Wood, unknown, a frozen agent, or a bomb the agent cannot
// kick), burns next step, or is doomed; Stop and kick-moves leave the agent
// on its own cell and are checked against it. Bomb is rejected without ammo
// or on top of an existing bomb, when the visible teammate is closer in
// Manhattan distance than the combined blast strength (the teammate is
// assumed to match the owner's strength), or when the agent's cell is covered
// by any visible bomb's blast; with cfg.lookahead_bomb_check, placing must
// also leave an escape. Rejecting everything falls back to the max-survival
// action (see FilterResult::used_fallback).
FilterResult filter_actions(const Observation& obs, const FilterConfig& cfg = {});

// True when the agent's own cell is not doomed after hypothetically placing
// its bomb there (chains included).
bool lookahead_bomb_check(const Observation& obs);

}  // namespace pommer
