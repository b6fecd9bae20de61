#pragma once

#include <span>
#include <vector>

namespace mfns {

/// Solves the cyclic tridiagonal system
///   sub[j]*x[j-1] + diag[j]*x[j] + sup[j]*x[j+1] = rhs[j],  indices mod N,
/// by the Thomas algorithm with a Sherman-Morrison corner correction.
/// Requires N >= 3. Throws SolverError when a pivot degenerates.
std::vector<double> solve_cyclic_tridiagonal(std::span<const double> sub,
                                             std::span<const double> diag,
                                             std::span<const double> sup,
                                             std::span<const double> rhs);

}  // namespace mfns
