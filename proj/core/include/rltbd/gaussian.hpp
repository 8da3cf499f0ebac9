#pragma once

#include <cmath>

namespace rltbd {

inline constexpr double kLog2Pi = 1.8378770664093454835606594728112;

// log N(z; mean, var), var > 0 assumed.
inline double log_normal_pdf(double z, double mean, double var) {
  const double d = z - mean;
  return -0.5 * (kLog2Pi + std::log(var) + d * d / var);
}

}  // namespace rltbd
