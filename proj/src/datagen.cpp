#include "kot/datagen.hpp"

#include "kot/sobol_table.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace kot {
namespace {

constexpr int kSobolBits = 52;

// Direction numbers v_k = m_k / 2^k for one dimension, scaled to 2^52.
std::array<std::uint64_t, kSobolBits> direction_numbers(int d) {
  const auto& e = detail::kSobolTable[static_cast<std::size_t>(d)];
  std::array<std::uint64_t, kSobolBits> v{};
  if (d == 0) {
    for (int k = 0; k < kSobolBits; ++k) v[k] = std::uint64_t{1} << (kSobolBits - 1 - k);
    return v;
  }
  const int s = static_cast<int>(e.degree);
  for (int k = 0; k < s && k < kSobolBits; ++k) {
    v[k] = static_cast<std::uint64_t>(e.m[static_cast<std::size_t>(k)])
           << (kSobolBits - 1 - k);
  }
  for (int k = s; k < kSobolBits; ++k) {
    std::uint64_t val = v[k - s] ^ (v[k - s] >> s);
    for (int j = 1; j < s; ++j) {
      if ((e.coeffs >> (s - 1 - j)) & 1U) val ^= v[k - j];
    }
    v[k] = val;
  }
  return v;
}

const std::array<std::uint64_t, kSobolBits>& cached_directions(int d) {
  static const auto table = [] {
    std::array<std::array<std::uint64_t, kSobolBits>, detail::kSobolMaxDim> t{};
    for (int i = 0; i < detail::kSobolMaxDim; ++i) t[i] = direction_numbers(i);
    return t;
  }();
  return table[static_cast<std::size_t>(d)];
}

}  // namespace

void MixtureSpec::validate() const {
  if (dim < 1) throw std::invalid_argument("MixtureSpec: dim must be >= 1");
  if (components.empty()) {
    throw std::invalid_argument("MixtureSpec: no components");
  }
  double total = 0.0;
  for (const auto& c : components) {
    if (!(c.weight > 0.0) || !(c.isotropic_std > 0.0)) {
      throw std::invalid_argument("MixtureSpec: weights and stds must be > 0");
    }
    if (c.mean.size() != dim) {
      throw std::invalid_argument("MixtureSpec: component mean has wrong dim");
    }
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("MixtureSpec: weights must sum to 1");
  }
}

MixtureSpec default_mixture(Index dim, int num_components, std::uint64_t seed) {
  if (num_components < 1) {
    throw std::invalid_argument("default_mixture: need >= 1 component");
  }
  MixtureSpec spec;
  spec.dim = dim;
  spec.seed = seed;
  std::mt19937_64 rng(seed ^ 0x6d65616e73ULL);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int c = 0; c < num_components; ++c) {
    MixtureComponent comp;
    comp.weight = 1.0 / num_components;
    comp.mean.resize(dim);
    for (Index j = 0; j < dim; ++j) comp.mean(j) = unif(rng);
    comp.isotropic_std = 0.1;
    spec.components.push_back(std::move(comp));
  }
  return spec;
}

SampleSet sample_mixture(const MixtureSpec& spec, Index count, SampleRole role) {
  spec.validate();
  if (count < 1) throw std::invalid_argument("sample_mixture: count must be >= 1");
  std::vector<double> weights;
  for (const auto& c : spec.components) weights.push_back(c.weight);

  std::mt19937_64 rng(spec.seed);
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  std::normal_distribution<double> gauss(0.0, 1.0);

  SampleSet out;
  out.role = role;
  out.points.resize(count, spec.dim);
  for (Index i = 0; i < count; ++i) {
    const MixtureComponent& c = spec.components[pick(rng)];
    for (Index j = 0; j < spec.dim; ++j) {
      out.points(i, j) = c.mean(j) + c.isotropic_std * gauss(rng);
    }
  }
  return out;
}

SobolStream::SobolStream(int dim, std::uint64_t index) : dim_(dim), index_(index) {
  if (dim < 1 || dim > kMaxDim) {
    throw std::invalid_argument("SobolStream: dim " + std::to_string(dim) +
                                " outside supported range [1, " +
                                std::to_string(kMaxDim) + "]");
  }
}

std::vector<double> SobolStream::point(int dim, std::uint64_t index) {
  if (dim < 1 || dim > kMaxDim) {
    throw std::invalid_argument("SobolStream: unsupported dim");
  }
  if (index >> kSobolBits) {
    throw std::out_of_range("SobolStream: index exceeds 2^52");
  }
  constexpr double scale = 1.0 / static_cast<double>(std::uint64_t{1} << kSobolBits);
  std::vector<double> out(static_cast<std::size_t>(dim));
  for (int d = 0; d < dim; ++d) {
    const auto& v = cached_directions(d);
    std::uint64_t acc = 0;
    for (int k = 0; k < kSobolBits && (index >> k) != 0; ++k) {
      if ((index >> k) & 1U) acc ^= v[static_cast<std::size_t>(k)];
    }
    out[static_cast<std::size_t>(d)] = static_cast<double>(acc) * scale;
  }
  return out;
}

std::vector<double> SobolStream::next() { return point(dim_, index_++); }

Box Box::unit(Index dim) {
  return {Vector::Zero(dim), Vector::Ones(dim)};
}

Box Box::bounding(const Matrix& pts, double inflate) {
  if (pts.rows() == 0) throw std::invalid_argument("Box::bounding: no points");
  Box b{pts.colwise().minCoeff().transpose(), pts.colwise().maxCoeff().transpose()};
  const Vector pad = 0.5 * inflate * (b.hi - b.lo);
  b.lo -= pad;
  b.hi += pad;
  return b;
}

FillingPoints sobol_points(Index d, Index count, const Box& x_box,
                           const Box& y_box) {
  if (count < 1) throw std::invalid_argument("sobol_points: count must be >= 1");
  if (x_box.lo.size() != d || y_box.lo.size() != d) {
    throw std::invalid_argument("sobol_points: box dimension mismatch");
  }
  SobolStream stream(static_cast<int>(2 * d), 1);
  FillingPoints fp;
  fp.x_tilde.resize(count, d);
  fp.y_tilde.resize(count, d);
  for (Index i = 0; i < count; ++i) {
    const std::vector<double> p = stream.next();
    for (Index j = 0; j < d; ++j) {
      const auto jx = static_cast<std::size_t>(j);
      const auto jy = static_cast<std::size_t>(d + j);
      fp.x_tilde(i, j) = x_box.lo(j) + p[jx] * (x_box.hi(j) - x_box.lo(j));
      fp.y_tilde(i, j) = y_box.lo(j) + p[jy] * (y_box.hi(j) - y_box.lo(j));
    }
  }
  return fp;
}

}  // namespace kot
