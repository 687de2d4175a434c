#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace pommer {

constexpr int kNumAgents = 4;
constexpr int kNumActions = 6;

// Team 0 holds agents {0,2}, team 1 holds agents {1,3} (diagonal corners).
inline constexpr int team_of(int agent_id) { return agent_id & 1; }
inline constexpr int teammate_of(int agent_id) { return (agent_id + 2) % 4; }

enum class Action : uint8_t { Stop = 0, Up = 1, Down = 2, Left = 3, Right = 4, Bomb = 5 };

constexpr std::array<Action, kNumActions> kAllActions = {
    Action::Stop, Action::Up, Action::Down, Action::Left, Action::Right, Action::Bomb};

// Movement actions in the canonical tie-break order Stop < Up < Down < Left < Right.
constexpr std::array<Action, 5> kMoveActions = {
    Action::Stop, Action::Up, Action::Down, Action::Left, Action::Right};

const char* action_name(Action a);
bool parse_action(const std::string& s, Action& out);

enum class Cell : uint8_t { Passage = 0, Rigid = 1, Wood = 2 };

enum class Powerup : uint8_t { ExtraBomb = 0, EnableKick = 1, ExtraBlast = 2 };

const char* powerup_name(Powerup p);

enum class Direction : uint8_t { None = 0, Up = 1, Down = 2, Left = 3, Right = 4 };

struct Position {
  int row = 0;
  int col = 0;

  friend bool operator==(const Position&, const Position&) = default;
  friend Position operator+(Position a, Position b) { return {a.row + b.row, a.col + b.col}; }
};

// Row/col delta for a direction; Direction::None yields (0,0).
Position direction_delta(Direction d);

// Up/Down/Left/Right for the four movement actions, None otherwise.
Direction action_direction(Action a);

inline int manhattan(Position a, Position b) {
  int dr = a.row - b.row;
  int dc = a.col - b.col;
  return (dr < 0 ? -dr : dr) + (dc < 0 ? -dc : dc);
}

inline int chebyshev(Position a, Position b) {
  int dr = a.row - b.row;
  int dc = a.col - b.col;
  if (dr < 0) dr = -dr;
  if (dc < 0) dc = -dc;
  return dr > dc ? dr : dc;
}

enum class Outcome : uint8_t { Ongoing = 0, Team0Wins = 1, Team1Wins = 2, Draw = 3 };

const char* outcome_name(Outcome o);
bool parse_outcome(const std::string& s, Outcome& out);

}  // namespace pommer
