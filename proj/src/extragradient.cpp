#include "kot/extragradient.hpp"

#include "kot/psd_cone.hpp"

#include <stdexcept>

namespace kot {
namespace {

// Descent field for gamma and ascent field for X at (gamma, X).
struct Field {
  Vector gamma;  // grad_gamma L = (1/2l2)(Q g - z) - Phi(X)
  Matrix x;      // grad_X L = -(Phi*(g) + l1 I)
};

Field saddle_field(const ProblemData& pd, const IteratePair& w) {
  return {objective_gradient(pd, w.gamma) - phi_forward(pd, w.x),
          -constraint_matrix(pd, w.gamma)};
}

}  // namespace

void EgConfig::validate() const {
  if (!(stepsize > 0.0)) {
    throw std::invalid_argument("EgConfig: stepsize must be positive");
  }
}

IteratePair eg_step(const ProblemData& pd, const IteratePair& v,
                    const EgConfig& cfg) {
  const double s = cfg.stepsize;
  const Field f0 = saddle_field(pd, v);
  IteratePair half;
  half.gamma = v.gamma - s * f0.gamma;
  half.x = proj_psd(Matrix(v.x + s * f0.x));

  const Field f1 = saddle_field(pd, half);
  IteratePair out;
  out.gamma = v.gamma - s * f1.gamma;
  out.x = proj_psd(Matrix(v.x + s * f1.x));
  return out;
}

}  // namespace kot
