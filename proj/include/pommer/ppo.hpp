#pragma once

#include <vector>

#include "pommer/net.hpp"

namespace pommer {

// One decision made by a learner during collection. logprob_old and value_old
// come from the collecting network; logprob_old is the raw softmax
// log-probability (no filter masking). reward already includes shaping and,
// on the final transition, the terminal credit.
struct Transition {
  FeatureStack features;
  int action = 0;
  float logprob_old = 0.0f;
  float value_old = 0.0f;
  float reward = 0.0f;
};

struct EpisodeRollout {
  int game_index = 0;
  int agent_pos = 0;  // learner seat, 0 or 2
  Outcome outcome = Outcome::Ongoing;
  std::vector<Transition> transitions;
};

struct RolloutBatch {
  std::vector<EpisodeRollout> episodes;
  // Flattened per transition (episode order, then time order); filled by
  // compute_returns_advantages.
  std::vector<double> returns;
  std::vector<double> advantages;

  size_t transition_count() const;
};

// Discounted return R_t = sum_k gamma^k r_{t+k} per episode (terminal value
// zero; every stored episode ends at a terminal or the step cap). Advantage
// A_t = R_t - value_old(s_t), or the lambda-weighted temporal-difference form
// when cfg.use_gae is set (returns then become A_t + value_old). With
// cfg.normalize_advantages, advantages are shifted/scaled to mean 0 std 1
// across the batch, skipped when the population std is below 1e-8.
void compute_returns_advantages(RolloutBatch& batch, const PPOConfig& cfg);

// Flat indexable view for minibatching; arrays share one transition order.
struct FlatBatch {
  std::vector<const FeatureStack*> features;
  std::vector<int> actions;
  std::vector<double> logprob_old;
  std::vector<double> value_old;
  std::vector<double> returns;
  std::vector<double> advantages;

  size_t size() const { return actions.size(); }
};

// Requires compute_returns_advantages to have run on the batch.
FlatBatch flatten(const RolloutBatch& batch);

// Mean over transitions of
//   -clip(r, 1-eps, 1+eps) * A
//   + (alpha/2) * max((v-R)^2, (v_old + clip(v-v_old, -eps, eps) - R)^2)
//   - beta * entropy(pi(s))
// where r = exp(logpi(a|s) - logpi_old(a|s)) uses raw softmax probabilities.
// There is no pessimistic min on the policy term: the clip alone bounds the
// update, so the gradient vanishes whenever the ratio sits outside (and
// exactly at) the clip boundaries, on both sides. Old quantities are
// recomputed from net_old; batch advantages/returns are consumed as data.
template <typename Scalar>
double ppo_loss(const ConvNet<Scalar>& net, const ConvNet<Scalar>& net_old,
                const RolloutBatch& batch, const PPOConfig& cfg);

// Loss over flat[indices] plus parameter gradient (overwritten, not
// accumulated). Subgradient conventions: clip boundaries saturate to zero
// slope; the value branches tie toward the unclipped term.
template <typename Scalar>
double ppo_loss_grad(const ConvNet<Scalar>& net, const FlatBatch& flat,
                     const std::vector<size_t>& indices, const PPOConfig& cfg,
                     std::vector<Scalar>& grad);

// Adam with bias correction:
//   m <- b1 m + (1-b1) g        v <- b2 v + (1-b2) g^2
//   theta <- theta - lr * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + 1e-8)
// Moment accumulators are double regardless of the parameter type.
template <typename Scalar>
class AdamOptimizer {
 public:
  AdamOptimizer(size_t param_count, double learning_rate);
  void step(std::vector<Scalar>& params, const std::vector<Scalar>& grad);

 private:
  double lr_;
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double eps_ = 1e-8;
  int64_t t_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
};

}  // namespace pommer
