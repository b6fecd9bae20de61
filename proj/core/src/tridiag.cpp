#include "mfns/tridiag.hpp"

#include <cmath>
#include <stdexcept>

#include "mfns/errors.hpp"

namespace mfns {
namespace {

// Plain Thomas solve; diag is consumed as workspace.
void thomas(std::span<const double> sub, std::vector<double>& diag,
            std::span<const double> sup, std::vector<double>& x) {
  const size_t n = diag.size();
  for (size_t j = 1; j < n; ++j) {
    if (diag[j - 1] == 0.0 || !std::isfinite(diag[j - 1])) {
      throw SolverError("cyclic tridiagonal solve: degenerate pivot");
    }
    const double w = sub[j] / diag[j - 1];
    diag[j] -= w * sup[j - 1];
    x[j] -= w * x[j - 1];
  }
  if (diag[n - 1] == 0.0 || !std::isfinite(diag[n - 1])) {
    throw SolverError("cyclic tridiagonal solve: degenerate pivot");
  }
  x[n - 1] /= diag[n - 1];
  for (size_t j = n - 1; j-- > 0;) {
    x[j] = (x[j] - sup[j] * x[j + 1]) / diag[j];
  }
}

}  // namespace

std::vector<double> solve_cyclic_tridiagonal(std::span<const double> sub,
                                             std::span<const double> diag,
                                             std::span<const double> sup,
                                             std::span<const double> rhs) {
  const size_t n = diag.size();
  if (n < 3 || sub.size() != n || sup.size() != n || rhs.size() != n) {
    throw std::invalid_argument("solve_cyclic_tridiagonal: need matching arrays with N >= 3");
  }

  // B = A + u (x) v with u = (gamma, 0, .., 0, sup[n-1]), v = (1, 0, .., 0, sub[0]/gamma);
  // A is tridiagonal with the first/last diagonal entries adjusted accordingly.
  const double gamma = -diag[0];
  if (gamma == 0.0) {
    throw SolverError("cyclic tridiagonal solve: zero leading diagonal");
  }
  std::vector<double> d(diag.begin(), diag.end());
  d[0] -= gamma;
  d[n - 1] -= sup[n - 1] * sub[0] / gamma;

  std::vector<double> y(rhs.begin(), rhs.end());
  {
    std::vector<double> dwork = d;
    thomas(sub, dwork, sup, y);
  }
  std::vector<double> z(n, 0.0);
  z[0] = gamma;
  z[n - 1] = sup[n - 1];
  thomas(sub, d, sup, z);

  const double vy = y[0] + sub[0] / gamma * y[n - 1];
  const double vz = 1.0 + z[0] + sub[0] / gamma * z[n - 1];
  if (vz == 0.0 || !std::isfinite(vz)) {
    throw SolverError("cyclic tridiagonal solve: singular corner correction");
  }
  const double factor = vy / vz;
  std::vector<double> x(n);
  for (size_t j = 0; j < n; ++j) {
    x[j] = y[j] - factor * z[j];
  }
  return x;
}

}  // namespace mfns
