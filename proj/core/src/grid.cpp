#include "mfns/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mfns {

PeriodicGrid::PeriodicGrid(double length, int cells) : L(length), N(cells) {
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw std::invalid_argument("PeriodicGrid: L must be positive and finite");
  }
  if (cells < 4) {
    throw std::invalid_argument("PeriodicGrid: N must be >= 4");
  }
  dx = length / cells;
}

ScalarField ScalarField::sample(const PeriodicGrid& grid,
                                const std::function<double(double)>& f) {
  ScalarField out(grid);
  for (int j = 0; j < grid.N; ++j) {
    out[j] = f(grid.center(j));
  }
  return out;
}

void require_same_grid(const ScalarField& a, const ScalarField& b) {
  if (!(a.grid() == b.grid())) {
    throw std::invalid_argument("field grid mismatch");
  }
}

ScalarField ddx_central(const ScalarField& f) {
  const auto& g = f.grid();
  ScalarField out(g);
  const double inv2dx = 1.0 / (2.0 * g.dx);
  const int n = g.N;
  for (int j = 0; j < n; ++j) {
    const int jm = j == 0 ? n - 1 : j - 1;
    const int jp = j == n - 1 ? 0 : j + 1;
    out[j] = (f[jp] - f[jm]) * inv2dx;
  }
  return out;
}

ScalarField ddx_upwind(const ScalarField& f, const ScalarField& velocity) {
  require_same_grid(f, velocity);
  const auto& g = f.grid();
  ScalarField out(g);
  const double invdx = 1.0 / g.dx;
  const int n = g.N;
  for (int j = 0; j < n; ++j) {
    const int jm = j == 0 ? n - 1 : j - 1;
    const int jp = j == n - 1 ? 0 : j + 1;
    const double u = velocity[j];
    if (u > 0.0) {
      out[j] = (f[j] - f[jm]) * invdx;
    } else if (u < 0.0) {
      out[j] = (f[jp] - f[j]) * invdx;
    } else {
      out[j] = (f[jp] - f[jm]) * 0.5 * invdx;
    }
  }
  return out;
}

double integrate(const ScalarField& f) {
  double sum = 0.0;
  for (double v : f.values()) sum += v;
  return f.grid().dx * sum;
}

FieldNorms norms(const ScalarField& f) {
  FieldNorms out;
  double sumsq = 0.0;
  for (double v : f.values()) {
    sumsq += v * v;
    out.linf = std::max(out.linf, std::abs(v));
  }
  out.l2 = std::sqrt(f.grid().dx * sumsq);
  const ScalarField df = ddx_central(f);
  double dsumsq = 0.0;
  for (double v : df.values()) dsumsq += v * v;
  out.h1_seminorm = std::sqrt(f.grid().dx * dsumsq);
  return out;
}

double min_value(const ScalarField& f) {
  return *std::min_element(f.values().begin(), f.values().end());
}

double max_value(const ScalarField& f) {
  return *std::max_element(f.values().begin(), f.values().end());
}

bool all_finite(const ScalarField& f) {
  for (double v : f.values()) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace mfns
