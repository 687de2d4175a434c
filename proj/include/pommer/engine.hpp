#pragma once

#include <array>
#include <utility>
#include <vector>

#include "pommer/state.hpp"

namespace pommer {

struct GenerationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Procedurally generates a start position: agents at the four corners, rigid
// and wood placed with 180-degree rotational symmetry, spawn pockets kept
// clear, and every pair of agents mutually reachable through passage and wood
// cells. Deterministic in config.rng_seed; regenerates (bounded retries) when
// the connectivity check fails.
GameState generate_board(const GameConfig& config);

// Cells a blast of the given strength reaches from origin: the origin plus up
// to strength-1 cells along each cardinal ray; a ray stops before Rigid and
// includes the first Wood cell it meets, stopping there.
std::vector<Position> blast_cells(Position origin, int strength, const Grid& terrain);

// Advances one simultaneous move. Pure: the input state is never modified.
// Phase order (fixed; determinism and replay depend on it):
//   1. dead agents and illegal Bomb actions (no ammo, bomb already on the
//      cell) become Stop
//   2. Bomb placements: ammo-1, bomb life = bomb_timer, blast = placer's
//   3. movement: target must be passage (items ok) without a bomb; a can_kick
//      agent moving into an unoccupied bomb cell whose far side is free sets
//      the bomb's velocity and stays in place (ties between kickers: lowest
//      id); same-target and swap conflicts bounce everyone involved, applied
//      to fixpoint (pure rotations, which conflict with nothing, resolve)
//   4. bombs with velocity advance one cell in storage order, stopping with
//      velocity cleared before Rigid/Wood/bomb/agent/off-board (and on item
//      cells when kick_stops_on_powerup)
//   5. bomb lives decrement; life-0 bombs explode; any bomb whose cell is
//      covered by an explosion explodes too, repeated to fixpoint; owners
//      regain one ammo per exploded bomb
//   6. flames with life = flame_life laid over all blast cells (re-ignition
//      refreshes an existing flame)
//   7. pre-existing flames decrement; life-0 flames removed
//   8. agents standing on flame cells die
//   9. exposed items covered by this step's new flames burn; Wood in blast
//      becomes Passage, revealing its hidden item (which survives this step)
//  10. surviving agents pick up the item on their cell
//  11. step counter +1
// Throws UsageError when the state is already terminal.
std::pair<GameState, StepEvents> step(const GameState& state,
                                      const std::array<Action, kNumAgents>& actions);

// Team k wins when it has a living agent and the other team has none; both
// teams dead is a draw, as is reaching max_steps with both teams alive.
Outcome is_terminal(const GameState& state);

// The agent's partial view: layers clipped to Chebyshev distance view_radius,
// everything beyond marked unknown. Throws UsageError for a dead agent.
Observation observe(const GameState& state, int agent_id);

}  // namespace pommer
