#pragma once

#include "kot/problem.hpp"

namespace kot {

struct EgConfig {
  double stepsize = 0.01;

  void validate() const;
};

// One projected extragradient step on the saddle problem
//   min_gamma max_{X PSD} f(gamma) - <X, Phi*(gamma) + l1 I>.
// v.x is expected to be PSD; the returned X always is.
IteratePair eg_step(const ProblemData& pd, const IteratePair& v,
                    const EgConfig& cfg);

}  // namespace kot
