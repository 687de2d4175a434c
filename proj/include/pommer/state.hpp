#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pommer/config.hpp"
#include "pommer/rng.hpp"
#include "pommer/types.hpp"

namespace pommer {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat board-sized grid of bytes; meaning of the byte depends on the layer.
class Grid {
 public:
  Grid() = default;
  Grid(int size, uint8_t fill) : size_(size), cells_(size * size, fill) {}

  int size() const { return size_; }
  uint8_t at(int r, int c) const { return cells_[r * size_ + c]; }
  uint8_t at(Position p) const { return at(p.row, p.col); }
  void set(int r, int c, uint8_t v) { cells_[r * size_ + c] = v; }
  void set(Position p, uint8_t v) { set(p.row, p.col, v); }
  bool in_bounds(Position p) const {
    return p.row >= 0 && p.row < size_ && p.col >= 0 && p.col < size_;
  }
  const std::vector<uint8_t>& raw() const { return cells_; }
  std::vector<uint8_t>& raw() { return cells_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int size_ = 0;
  std::vector<uint8_t> cells_;
};

// Powerup layers store 0 for none, otherwise powerup kind + 1.
constexpr uint8_t kNoPowerup = 0;
inline uint8_t powerup_code(Powerup p) { return static_cast<uint8_t>(p) + 1; }

struct Bomb {
  Position position;
  int owner = 0;
  int blast_strength = 2;
  int life = 0;  // explodes when decremented to 0
  Direction velocity = Direction::None;

  friend bool operator==(const Bomb&, const Bomb&) = default;
};

struct Flame {
  Position position;
  int life = 0;  // steps the flame remains, in 1..flame_life

  friend bool operator==(const Flame&, const Flame&) = default;
};

constexpr Position kDeadPosition{-1, -1};

struct AgentState {
  int id = 0;
  Position position = kDeadPosition;  // kDeadPosition once dead
  bool alive = true;
  int ammo = 1;
  int max_ammo = 1;  // historic maximum, grows with ExtraBomb pickups
  int blast_strength = 2;
  bool can_kick = false;

  int team() const { return team_of(id); }

  friend bool operator==(const AgentState&, const AgentState&) = default;
};

// Ground-truth state of one game. A self-contained value: copyable,
// serializable, and usable from any thread.
struct GameState {
  GameConfig config;
  int step = 0;
  Grid terrain;           // Cell values
  Grid powerups;          // exposed items, powerup codes
  Grid hidden_powerups;   // items concealed under Wood, powerup codes
  std::vector<Bomb> bombs;    // stored in placement order; order is semantic
  std::vector<Flame> flames;  // stored in lay order
  std::array<AgentState, kNumAgents> agents;
  Rng rng;  // consumed by board generation only; carried for reproducibility

  int size() const { return config.board_size; }
  const AgentState* agent_at(Position p) const;
  const Bomb* bomb_at(Position p) const;

  friend bool operator==(const GameState&, const GameState&) = default;
};

struct AgentEvents {
  bool died = false;
  int killed_enemy_count = 0;   // enemy deaths this step, seen from this agent
  bool teammate_died = false;
  std::optional<Powerup> picked_powerup;
  std::optional<Position> entered_cell;  // position after moves, alive agents only
  bool placed_bomb = false;
  int woods_destroyed = 0;  // woods removed this step by bombs this agent owns
};

struct StepEvents {
  std::array<AgentEvents, kNumAgents> agent;
};

// One agent's partial view: layers restricted to the Chebyshev window, plus
// the agent's own scalars. kUnknownCell marks cells outside the window.
constexpr uint8_t kUnknownCell = 255;

struct ObservedBomb {
  Position position;
  int life = 0;
  int blast_strength = 2;
  Direction velocity = Direction::None;
};

struct ObservedAgent {
  int id = 0;
  Position position;
};

struct Observation {
  int self_id = 0;
  Position self_position;
  int ammo = 0;
  int blast_strength = 2;
  bool can_kick = false;
  int step = 0;
  bool teammate_alive = true;
  int board_size = 11;
  int view_radius = 4;
  int bomb_timer = 10;   // copied from config for downstream consumers
  int flame_life = 2;
  int max_steps = 800;

  Grid terrain;      // Cell values, kUnknownCell outside the window
  Grid powerups;     // powerup codes, kUnknownCell outside the window
  Grid flame_lives;  // remaining flame life, 0 none, kUnknownCell outside
  std::vector<ObservedBomb> bombs;    // visible bombs only
  std::vector<ObservedAgent> agents;  // visible living agents, self excluded

  bool visible(Position p) const {
    return chebyshev(p, self_position) <= view_radius;
  }
  const ObservedBomb* bomb_at(Position p) const;
  const ObservedAgent* agent_at(Position p) const;
};

// Canonical FNV-1a fingerprint over the full semantic state, including bomb
// storage order (it determines motion order). Used by replays and tests.
uint64_t state_hash(const GameState& state);

// Human-readable grid dump. Legend, one char per cell:
//   '.' passage   '#' rigid   '+' wood   'F' flame   'o' bomb
//   'a' extra-bomb item   'k' kick item   's' blast item
//   '0'..'3' agent (drawn over anything beneath it)
std::string dump_board(const GameState& state);

// JSON round-trip; deserializing the output reproduces an identical state.
std::string state_to_json(const GameState& state);
GameState state_from_json(const std::string& text);

}  // namespace pommer
