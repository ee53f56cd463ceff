#include "maslov/sampling.hpp"

#include "maslov/errors.hpp"

#include <array>

namespace maslov {

namespace {

constexpr std::array<int, 24> kPrimes = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37,
                                         41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89};

double radical_inverse(std::size_t index, int base) {
  double f = 1.0;
  double r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * static_cast<double>(index % base);
    index /= base;
  }
  return r;
}

}  // namespace

std::vector<PhasePoint> halton_points(int dim, std::size_t count, const Vector& center, double half_width,
                                      std::size_t skip) {
  if (dim > static_cast<int>(kPrimes.size())) throw DimensionError("Halton sequence limited to 24 dimensions");
  if (center.size() != dim) throw DimensionError("box center has wrong dimension");
  std::vector<PhasePoint> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Vector z(dim);
    for (int i = 0; i < dim; ++i)
      z[i] = center[i] + half_width * (2.0 * radical_inverse(k + skip + 1, kPrimes[i]) - 1.0);
    out.emplace_back(z);
  }
  return out;
}

}  // namespace maslov
