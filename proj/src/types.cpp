#include "pommer/types.hpp"

namespace pommer {

const char* action_name(Action a) {
  switch (a) {
    case Action::Stop: return "stop";
    case Action::Up: return "up";
    case Action::Down: return "down";
    case Action::Left: return "left";
    case Action::Right: return "right";
    case Action::Bomb: return "bomb";
  }
  return "?";
}

bool parse_action(const std::string& s, Action& out) {
  for (Action a : kAllActions) {
    if (s == action_name(a)) {
      out = a;
      return true;
    }
  }
  return false;
}

const char* powerup_name(Powerup p) {
  switch (p) {
    case Powerup::ExtraBomb: return "extra_bomb";
    case Powerup::EnableKick: return "enable_kick";
    case Powerup::ExtraBlast: return "extra_blast";
  }
  return "?";
}

Position direction_delta(Direction d) {
  switch (d) {
    case Direction::None: return {0, 0};
    case Direction::Up: return {-1, 0};
    case Direction::Down: return {1, 0};
    case Direction::Left: return {0, -1};
    case Direction::Right: return {0, 1};
  }
  return {0, 0};
}

Direction action_direction(Action a) {
  switch (a) {
    case Action::Up: return Direction::Up;
    case Action::Down: return Direction::Down;
    case Action::Left: return Direction::Left;
    case Action::Right: return Direction::Right;
    default: return Direction::None;
  }
}

const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Ongoing: return "ongoing";
    case Outcome::Team0Wins: return "team0";
    case Outcome::Team1Wins: return "team1";
    case Outcome::Draw: return "draw";
  }
  return "?";
}

bool parse_outcome(const std::string& s, Outcome& out) {
  for (Outcome o : {Outcome::Ongoing, Outcome::Team0Wins, Outcome::Team1Wins, Outcome::Draw}) {
    if (s == outcome_name(o)) {
      out = o;
      return true;
    }
  }
  return false;
}

}  // namespace pommer
