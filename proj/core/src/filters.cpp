#include "rltbd/filters.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rltbd {

namespace {

void check_mcmc_config(const EmpiricalPosterior& prior, const FilterConfig& cfg,
                       const char* where) {
  if (prior.particles.empty()) {
    throw std::invalid_argument(std::string(where) + ": empty prior posterior");
  }
  if (cfg.n_particles <= 0) {
    throw std::invalid_argument(std::string(where) + ": n_particles must be positive");
  }
  if (cfg.n_burn_in < 0) {
    throw std::invalid_argument(std::string(where) + ": n_burn_in must be non-negative");
  }
}

// Both MCMC filters run this chain; `refine` switches the second phase on.
// Accepted values carry their cached densities forward, so each iteration
// costs one likelihood evaluation per phase.
McmcStepResult sequential_mcmc_step(const EmpiricalPosterior& prior, const ObservationModel& obs,
                                    const NcvModel& motion, const FilterConfig& cfg, bool refine,
                                    Rng& rng) {
  const JointDraw init = joint_draw(prior, motion, rng);
  ChainState chain = make_chain_state(obs, motion, init.x_k, init.x_prev);

  const int total = cfg.n_burn_in + cfg.n_particles;
  McmcStepResult result;
  result.posterior.particles.reserve(cfg.n_particles);
  result.diag.iterations = total;

  for (int i = 0; i < total; ++i) {
    // Joint-draw phase: replace the whole pair; prior and dynamics cancel
    // out of the ratio, leaving the likelihoods.
    const JointDraw star = joint_draw(prior, motion, rng);
    const double loglik_star = obs.log_likelihood(star.x_k);
    if (draw_uniform(rng) < accept_joint(loglik_star, chain.log_lik)) {
      chain.x_k = star.x_k;
      chain.x_prev = star.x_prev;
      chain.log_lik = loglik_star;
      chain.log_trans = transition_logpdf(motion, star.x_k, star.x_prev);
      ++result.diag.joint_accepts;
    }

    if (refine) {
      // Refinement phase: move x_k alone, x_prev pinned. The proposal is not
      // symmetric, so forward and reverse densities both enter the ratio.
      const RlMoments fwd = rl_moments(obs, motion, chain.x_k, chain.x_prev, cfg.proposal);
      const StateVector star_x = rl_sample(fwd, rng);
      const double star_lik = obs.log_likelihood(star_x);
      const double star_trans = transition_logpdf(motion, star_x, chain.x_prev);
      const RlMoments rev = rl_moments(obs, motion, star_x, chain.x_prev, cfg.proposal);

      const double logw_star = star_lik + star_trans + rl_logpdf(rev, chain.x_k);
      const double logw_cur = chain.log_lik + chain.log_trans + rl_logpdf(fwd, star_x);
      if (draw_uniform(rng) < accept_refine(logw_star, logw_cur)) {
        chain.x_k = star_x;
        chain.log_lik = star_lik;
        chain.log_trans = star_trans;
        ++result.diag.refine_accepts;
      }
    }

    if (i >= cfg.n_burn_in) {
      result.posterior.particles.push_back(chain.x_k);
    }
  }
  return result;
}

}  // namespace

McmcStepResult rlmcf_step(const EmpiricalPosterior& prior, const ObservationModel& obs,
                          const NcvModel& motion, const FilterConfig& cfg, Rng& rng) {
  check_mcmc_config(prior, cfg, "rlmcf_step");
  return sequential_mcmc_step(prior, obs, motion, cfg, cfg.refine, rng);
}

McmcStepResult rlmcf_step(const EmpiricalPosterior& prior, const Measurement& z,
                          const SensorModel& sensor, const NcvModel& motion,
                          const FilterConfig& cfg, Rng& rng) {
  const TbdObservation obs(sensor, z);
  return rlmcf_step(prior, obs, motion, cfg, rng);
}

McmcStepResult smcmc_prior_step(const EmpiricalPosterior& prior, const ObservationModel& obs,
                                const NcvModel& motion, const FilterConfig& cfg, Rng& rng) {
  check_mcmc_config(prior, cfg, "smcmc_prior_step");
  return sequential_mcmc_step(prior, obs, motion, cfg, false, rng);
}

McmcStepResult smcmc_prior_step(const EmpiricalPosterior& prior, const Measurement& z,
                                const SensorModel& sensor, const NcvModel& motion,
                                const FilterConfig& cfg, Rng& rng) {
  const TbdObservation obs(sensor, z);
  return smcmc_prior_step(prior, obs, motion, cfg, rng);
}

ParticleCloud bootstrap_step(const ParticleCloud& prior, const ObservationModel& obs,
                             const NcvModel& motion, const FilterConfig& cfg, Rng& rng) {
  if (prior.particles.empty()) {
    throw std::invalid_argument("bootstrap_step: empty prior cloud");
  }
  if (prior.weighted() && prior.weights.size() != prior.particles.size()) {
    throw std::invalid_argument("bootstrap_step: weights misaligned with particles");
  }
  if (cfg.n_particles <= 0) {
    throw std::invalid_argument("bootstrap_step: n_particles must be positive");
  }

  const std::size_t n_in = prior.particles.size();
  std::vector<StateVector> propagated(n_in);
  std::vector<double> log_weights(n_in);
  for (std::size_t i = 0; i < n_in; ++i) {
    propagated[i] = transition_sample(motion, prior.particles[i], rng);
    log_weights[i] = obs.log_likelihood(propagated[i]);
    if (prior.weighted()) {
      log_weights[i] += std::log(prior.weights[i]);
    }
  }

  const std::vector<double> weights = normalize_log_weights(log_weights);
  const std::vector<std::size_t> ancestors =
      resample_indices(weights, static_cast<std::size_t>(cfg.n_particles), cfg.resampling, rng);

  ParticleCloud out;
  out.particles.reserve(ancestors.size());
  for (const std::size_t a : ancestors) {
    out.particles.push_back(propagated[a]);
  }
  return out;
}

ParticleCloud bootstrap_step(const ParticleCloud& prior, const Measurement& z,
                             const SensorModel& sensor, const NcvModel& motion,
                             const FilterConfig& cfg, Rng& rng) {
  const TbdObservation obs(sensor, z);
  return bootstrap_step(prior, obs, motion, cfg, rng);
}

StateVector point_estimate(const EmpiricalPosterior& posterior) {
  if (posterior.particles.empty()) {
    throw std::invalid_argument("point_estimate: empty posterior");
  }
  StateVector sum = StateVector::Zero();
  for (const StateVector& p : posterior.particles) {
    sum += p;
  }
  return sum / static_cast<double>(posterior.particles.size());
}

StateVector point_estimate(const ParticleCloud& cloud) {
  if (cloud.particles.empty()) {
    throw std::invalid_argument("point_estimate: empty cloud");
  }
  if (!cloud.weighted()) {
    EmpiricalPosterior tmp;
    tmp.particles = cloud.particles;
    return point_estimate(tmp);
  }
  if (cloud.weights.size() != cloud.particles.size()) {
    throw std::invalid_argument("point_estimate: weights misaligned with particles");
  }
  StateVector sum = StateVector::Zero();
  for (std::size_t i = 0; i < cloud.particles.size(); ++i) {
    sum += cloud.weights[i] * cloud.particles[i];
  }
  return sum;
}

std::vector<double> normalize_log_weights(const std::vector<double>& log_weights) {
  if (log_weights.empty()) {
    throw std::invalid_argument("normalize_log_weights: empty input");
  }
  double max_lw = -std::numeric_limits<double>::infinity();
  for (const double lw : log_weights) {
    if (std::isnan(lw)) {
      throw std::invalid_argument("normalize_log_weights: NaN log-weight");
    }
    max_lw = std::max(max_lw, lw);
  }
  if (!std::isfinite(max_lw)) {
    throw DegenerateLikelihoodError(
        "normalize_log_weights: every log-weight is -inf; the cloud has lost the target");
  }

  std::vector<double> weights(log_weights.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < log_weights.size(); ++i) {
    weights[i] = std::exp(log_weights[i] - max_lw);
    sum += weights[i];
  }
  for (double& w : weights) {
    w /= sum;
  }
  return weights;
}

std::vector<std::size_t> resample_indices(const std::vector<double>& weights, std::size_t count,
                                          ResamplingScheme scheme, Rng& rng) {
  if (weights.empty() || count == 0) {
    throw std::invalid_argument("resample_indices: empty weights or zero count");
  }

  std::vector<std::size_t> out(count);
  switch (scheme) {
    case ResamplingScheme::systematic: {
      const double step = 1.0 / static_cast<double>(count);
      const double offset = draw_uniform(rng) * step;
      std::size_t i = 0;
      double cum = weights[0];
      for (std::size_t j = 0; j < count; ++j) {
        const double target = offset + static_cast<double>(j) * step;
        while (cum < target && i + 1 < weights.size()) {
          ++i;
          cum += weights[i];
        }
        out[j] = i;
      }
      break;
    }
    case ResamplingScheme::multinomial: {
      std::vector<double> cdf(weights.size());
      double cum = 0.0;
      for (std::size_t i = 0; i < weights.size(); ++i) {
        cum += weights[i];
        cdf[i] = cum;
      }
      cdf.back() = std::max(cdf.back(), 1.0);  // guard the top against round-off
      for (std::size_t j = 0; j < count; ++j) {
        const double u = draw_uniform(rng);
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        out[j] = static_cast<std::size_t>(std::distance(cdf.begin(), it));
      }
      break;
    }
  }
  return out;
}

}  // namespace rltbd
