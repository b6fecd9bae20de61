#pragma once

#include <functional>
#include <span>
#include <vector>

namespace mfns {

/// Uniform periodic 1D mesh on [0, L) with N cells, centers at (j+1/2)*dx.
struct PeriodicGrid {
  double L = 1.0;
  int N = 4;
  double dx = 0.25;

  PeriodicGrid() = default;
  PeriodicGrid(double length, int cells);

  double center(int j) const { return (j + 0.5) * dx; }

  friend bool operator==(const PeriodicGrid& a, const PeriodicGrid& b) {
    return a.L == b.L && a.N == b.N;
  }
};

/// Cell-centered values on a PeriodicGrid. Value-semantic; operations on
/// fields are pure and safe to evaluate concurrently on disjoint fields.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const PeriodicGrid& grid, double fill = 0.0)
      : grid_(grid), values_(static_cast<size_t>(grid.N), fill) {}

  static ScalarField sample(const PeriodicGrid& grid, const std::function<double(double)>& f);

  const PeriodicGrid& grid() const { return grid_; }
  int size() const { return static_cast<int>(values_.size()); }

  double operator[](int j) const { return values_[static_cast<size_t>(j)]; }
  double& operator[](int j) { return values_[static_cast<size_t>(j)]; }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

 private:
  PeriodicGrid grid_;
  std::vector<double> values_;
};

/// Throws std::invalid_argument on grid mismatch.
void require_same_grid(const ScalarField& a, const ScalarField& b);

/// Second-order centered derivative with periodic wrap-around.
ScalarField ddx_central(const ScalarField& f);

/// First-order upwind derivative selected by the local velocity sign;
/// ties at u == 0 fall back to the centered average.
ScalarField ddx_upwind(const ScalarField& f, const ScalarField& velocity);

/// Midpoint rule dx * sum(values); exact for cell-wise-constant fields.
double integrate(const ScalarField& f);

struct FieldNorms {
  double l2 = 0.0;
  double linf = 0.0;
  double h1_seminorm = 0.0;
};

FieldNorms norms(const ScalarField& f);

double min_value(const ScalarField& f);
double max_value(const ScalarField& f);
bool all_finite(const ScalarField& f);

}  // namespace mfns
