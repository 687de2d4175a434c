#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pommer/featurize.hpp"
#include "pommer/filter.hpp"
#include "pommer/rng.hpp"
#include "pommer/state.hpp"

namespace pommer {

template <typename Scalar>
class ConvNet;

// Always Stop.
Action static_act(const Observation& obs);

// Uniform over the filter-allowed set; with allow_bomb false, Bomb is removed
// first (unless it is the filter's sole fallback action).
Action smart_random_act(const Observation& obs, bool allow_bomb, Rng& rng,
                        const FilterConfig& cfg = {});

// Deterministic priority pipeline, every choice filter-checked:
//   evade when staying is unsafe; walk toward the nearest visible powerup;
//   bomb when an enemy sits inside the hypothetical blast and an escape
//   exists; walk toward the nearest visible enemy; bomb adjacent Wood; Stop.
Action simple_act(const Observation& obs, const FilterConfig& cfg = {});

// simple_act with every bomb decision replaced by a guaranteed-kill test: a
// bomb is placed only when, under the filter's static model, some visible
// enemy has no surviving reply. Never bombs Wood.
Action cautious_act(const Observation& obs, const FilterConfig& cfg = {});

// The cautious agent's trigger, exposed for verification: true when placing
// the observer's bomb now dooms some visible enemy (the enemy moves, the
// observer and everyone else freeze).
bool guaranteed_kill(const Observation& obs);

class Agent {
 public:
  virtual ~Agent() = default;
  const std::string& kind() const { return kind_; }
  // Resets per-episode state (memory boards, private rng). Call before every
  // episode; seeds make stochastic agents reproducible.
  virtual void reset(uint64_t seed) {}
  virtual Action act(const Observation& obs) = 0;

 protected:
  explicit Agent(std::string kind) : kind_(std::move(kind)) {}

 private:
  std::string kind_;
};

// Policy decision with everything the trainer stores per transition.
// logprob is the raw softmax log-probability of the chosen action, before
// filter masking; masking is an execution-layer concern.
struct NeuralDecision {
  Action action = Action::Stop;
  float logprob = 0.0f;
  float value = 0.0f;
  FeatureStack features;
};

class NeuralAgent : public Agent {
 public:
  // Shares immutable network parameters; safe across threads, each agent
  // keeps its own scratch workspace and memory board.
  NeuralAgent(std::shared_ptr<const ConvNet<float>> net, FilterConfig filter_cfg = {},
              bool greedy = false, std::string kind = "neural");
  ~NeuralAgent() override;

  void reset(uint64_t seed) override;
  Action act(const Observation& obs) override;
  // act plus the training-side bookkeeping.
  NeuralDecision act_full(const Observation& obs);

  const ConvNet<float>& net() const { return *net_; }

 private:
  std::shared_ptr<const ConvNet<float>> net_;
  FilterConfig filter_cfg_;
  bool greedy_ = false;
  Rng rng_;
  RetrospectiveBoard memory_;
  struct Scratch;
  std::unique_ptr<Scratch> scratch_;
};

// Kinds: static, random, smart_random, smart_random_nobomb, simple, cautious,
// neural:<checkpoint path>. Throws UsageError on anything else.
std::unique_ptr<Agent> make_agent(const std::string& kind);

}  // namespace pommer
