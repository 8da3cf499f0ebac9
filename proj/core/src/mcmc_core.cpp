#include "rltbd/mcmc_core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rltbd {

namespace {

// min(1, exp(diff)) without overflow for large positive diffs.
double clamped_exp_ratio(double log_diff) {
  if (log_diff >= 0.0) {
    return 1.0;
  }
  return std::exp(log_diff);
}

}  // namespace

ChainState make_chain_state(const ObservationModel& obs, const NcvModel& motion,
                            const StateVector& x_k, const StateVector& x_prev) {
  ChainState c;
  c.x_k = x_k;
  c.x_prev = x_prev;
  c.log_lik = obs.log_likelihood(x_k);
  c.log_trans = transition_logpdf(motion, x_k, x_prev);
  return c;
}

JointDraw joint_draw(const EmpiricalPosterior& prior, const NcvModel& motion, Rng& rng) {
  if (prior.particles.empty()) {
    throw std::invalid_argument("joint_draw: empty prior posterior");
  }
  JointDraw d;
  d.x_prev = prior.particles[draw_index(rng, prior.particles.size())];
  d.x_k = transition_sample(motion, d.x_prev, rng);
  return d;
}

double accept_joint(double loglik_star, double loglik_cur) {
  if (std::isnan(loglik_star) || std::isnan(loglik_cur)) {
    throw std::invalid_argument("accept_joint: NaN log-likelihood");
  }
  // A proposal with zero likelihood is rejected outright; this also covers
  // the -inf/-inf pair, whose difference would otherwise be NaN.
  if (std::isinf(loglik_star) && loglik_star < 0.0) {
    return 0.0;
  }
  return clamped_exp_ratio(loglik_star - loglik_cur);
}

double accept_refine(double logw_star, double logw_cur) {
  if (std::isnan(logw_star) || std::isnan(logw_cur)) {
    throw std::invalid_argument("accept_refine: NaN log-weight");
  }
  if (std::isinf(logw_star) && logw_star < 0.0) {
    return 0.0;
  }
  return clamped_exp_ratio(logw_star - logw_cur);
}

}  // namespace rltbd
