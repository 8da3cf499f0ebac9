#pragma once

#include <vector>

#include "rltbd/motion_model.hpp"
#include "rltbd/observation_model.hpp"
#include "rltbd/rng.hpp"

namespace rltbd {

/// Equally-weighted particle representation of a filtering posterior.
struct EmpiricalPosterior {
  std::vector<StateVector> particles;
};

/// Chain state over the pair (current state x_k, predecessor x_prev). The
/// two log-densities that appear in every acceptance ratio are cached here;
/// keeping them next to the states is what holds the sampler to one
/// likelihood evaluation per proposal.
struct ChainState {
  StateVector x_k = StateVector::Zero();
  StateVector x_prev = StateVector::Zero();
  double log_lik = 0.0;    // log p(y_k | x_k)
  double log_trans = 0.0;  // log p(x_k | x_prev)
};

ChainState make_chain_state(const ObservationModel& obs, const NcvModel& motion,
                            const StateVector& x_k, const StateVector& x_prev);

struct JointDraw {
  StateVector x_k;
  StateVector x_prev;
};

/// Fresh chain proposal: x_prev uniformly from the previous posterior's
/// particles, x_k from the motion model given that particle. Proposing from
/// the product of dynamics and empirical posterior is what cancels both out
/// of the acceptance ratio. Throws std::invalid_argument on an empty prior.
JointDraw joint_draw(const EmpiricalPosterior& prior, const NcvModel& motion, Rng& rng);

/// Acceptance probability for a joint draw: min(1, exp(loglik_star - loglik_cur)).
double accept_joint(double loglik_star, double loglik_cur);

/// Acceptance probability for a refinement move, from log target-times-reverse
/// -proposal weights: min(1, exp(logw_star - logw_cur)).
double accept_refine(double logw_star, double logw_cur);

}  // namespace rltbd
