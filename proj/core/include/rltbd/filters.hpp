#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rltbd/mcmc_core.hpp"
#include "rltbd/proposals.hpp"

namespace rltbd {

enum class ResamplingScheme { systematic, multinomial };

/// Per-step settings shared by all filters; each filter reads the fields
/// that concern it.
struct FilterConfig {
  int n_particles = 0;
  int n_burn_in = 0;                // MCMC filters only
  RlProposalParams proposal;        // Riemann-Langevin filter only
  bool refine = true;               // false drops the refinement phase,
                                    // leaving the prior-proposal sampler
  ResamplingScheme resampling = ResamplingScheme::systematic;  // bootstrap only
};

/// Weighted particle set. Empty `weights` means equally weighted; otherwise
/// weights are normalized and aligned with `particles`.
struct ParticleCloud {
  std::vector<StateVector> particles;
  std::vector<double> weights;

  bool weighted() const { return !weights.empty(); }
};

struct McmcDiagnostics {
  std::int64_t iterations = 0;
  std::int64_t joint_accepts = 0;
  std::int64_t refine_accepts = 0;

  double joint_rate() const {
    return iterations > 0 ? static_cast<double>(joint_accepts) / iterations : 0.0;
  }
  double refine_rate() const {
    return iterations > 0 ? static_cast<double>(refine_accepts) / iterations : 0.0;
  }
};

struct McmcStepResult {
  EmpiricalPosterior posterior;
  McmcDiagnostics diag;
};

/// Every particle weight underflowed to zero: the measurement assigns no
/// mass anywhere near the cloud.
class DegenerateLikelihoodError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One step of the Riemann-Langevin MCMC filter: a joint-draw phase that
/// refreshes the (x_k, x_prev) pair from the previous posterior and the
/// motion model, then a refinement phase that moves x_k with the
/// Riemann-Langevin proposal under a full reversible acceptance ratio.
/// Burn-in iterations are discarded; the last n_particles chain states form
/// the new posterior.
McmcStepResult rlmcf_step(const EmpiricalPosterior& prior, const ObservationModel& obs,
                          const NcvModel& motion, const FilterConfig& cfg, Rng& rng);
McmcStepResult rlmcf_step(const EmpiricalPosterior& prior, const Measurement& z,
                          const SensorModel& sensor, const NcvModel& motion,
                          const FilterConfig& cfg, Rng& rng);

/// Baseline sequential MCMC step: identical chain with the refinement phase
/// removed, so every move is a prior-driven joint draw.
McmcStepResult smcmc_prior_step(const EmpiricalPosterior& prior, const ObservationModel& obs,
                                const NcvModel& motion, const FilterConfig& cfg, Rng& rng);
McmcStepResult smcmc_prior_step(const EmpiricalPosterior& prior, const Measurement& z,
                                const SensorModel& sensor, const NcvModel& motion,
                                const FilterConfig& cfg, Rng& rng);

/// One bootstrap particle-filter step: propagate through the motion model,
/// weight by likelihood (in log space, normalized by log-sum-exp), resample
/// down to cfg.n_particles. Throws DegenerateLikelihoodError when every
/// weight underflows.
ParticleCloud bootstrap_step(const ParticleCloud& prior, const ObservationModel& obs,
                             const NcvModel& motion, const FilterConfig& cfg, Rng& rng);
ParticleCloud bootstrap_step(const ParticleCloud& prior, const Measurement& z,
                             const SensorModel& sensor, const NcvModel& motion,
                             const FilterConfig& cfg, Rng& rng);

/// Posterior mean: plain average of an MCMC posterior, weighted average of a
/// weighted cloud. Throws std::invalid_argument on an empty input.
StateVector point_estimate(const EmpiricalPosterior& posterior);
StateVector point_estimate(const ParticleCloud& cloud);

/// Log-sum-exp normalization of log-weights into linear weights summing to
/// one. Throws DegenerateLikelihoodError if every entry is -inf and
/// std::invalid_argument on an empty input or NaN entries.
std::vector<double> normalize_log_weights(const std::vector<double>& log_weights);

/// Draws `count` ancestor indices proportional to `weights` (assumed
/// normalized). Systematic uses one uniform offset and a stratified sweep;
/// multinomial inverts the CDF per draw.
std::vector<std::size_t> resample_indices(const std::vector<double>& weights, std::size_t count,
                                          ResamplingScheme scheme, Rng& rng);

}  // namespace rltbd
