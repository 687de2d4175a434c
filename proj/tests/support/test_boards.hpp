#pragma once

#include <string>
#include <vector>

#include "pommer/engine.hpp"

namespace pommer::testing {

// Builds a game state from ASCII rows. Legend matches dump_board:
//   '.' passage  '#' rigid  '+' wood
//   'a' extra-bomb item  'k' kick item  's' blast item
//   '0'..'3' living agent standing on passage
// Agents absent from the art are dead. Bombs and flames are added by the
// caller. view_radius defaults to the whole board so observations are total.
inline GameState state_from_rows(const std::vector<std::string>& rows) {
  const int n = static_cast<int>(rows.size());
  GameState s;
  s.config.board_size = n;
  s.config.view_radius = 2 * n;
  s.terrain = Grid(n, static_cast<uint8_t>(Cell::Passage));
  s.powerups = Grid(n, kNoPowerup);
  s.hidden_powerups = Grid(n, kNoPowerup);
  for (int i = 0; i < kNumAgents; ++i) {
    s.agents[i].id = i;
    s.agents[i].alive = false;
    s.agents[i].position = kDeadPosition;
  }
  for (int r = 0; r < n; ++r) {
    if (static_cast<int>(rows[r].size()) != n)
      throw UsageError("state_from_rows: rows must form a square");
    for (int c = 0; c < n; ++c) {
      char ch = rows[r][c];
      switch (ch) {
        case '.':
          break;
        case '#':
          s.terrain.set(r, c, static_cast<uint8_t>(Cell::Rigid));
          break;
        case '+':
          s.terrain.set(r, c, static_cast<uint8_t>(Cell::Wood));
          break;
        case 'a':
          s.powerups.set(r, c, powerup_code(Powerup::ExtraBomb));
          break;
        case 'k':
          s.powerups.set(r, c, powerup_code(Powerup::EnableKick));
          break;
        case 's':
          s.powerups.set(r, c, powerup_code(Powerup::ExtraBlast));
          break;
        case '0':
        case '1':
        case '2':
        case '3': {
          AgentState& a = s.agents[ch - '0'];
          a.alive = true;
          a.position = {r, c};
          break;
        }
        default:
          throw UsageError("state_from_rows: unknown cell character");
      }
    }
  }
  return s;
}

inline void add_bomb(GameState& s, Position p, int owner, int strength, int life,
                     Direction velocity = Direction::None) {
  s.bombs.push_back({p, owner, strength, life, velocity});
}

inline void add_flame(GameState& s, Position p, int life) { s.flames.push_back({p, life}); }

}  // namespace pommer::testing
