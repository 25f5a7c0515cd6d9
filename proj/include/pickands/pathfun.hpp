#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <cstdlib>

#include "pickands/errors.hpp"
#include "pickands/fgn.hpp"
#include "pickands/summation.hpp"

namespace pickands {

/// Z_t = sqrt(2) B_t - |t|^alpha sampled on the lattice of `grid`.
struct ZPath {
  GridSpec grid;
  Eigen::VectorXd z_values;

  std::size_t zero_index() const noexcept { return grid.zero_index(); }
};

/// Supremum- and sum-type functionals of one lattice path.
template <typename Scalar = double>
struct PathFunctionals {
  Scalar m_eta{};   ///< exp(max_k z_k)
  Scalar s_eta{};   ///< eta * sum_k exp(z_k)
  Scalar ratio{};   ///< m_eta / s_eta, in (0, 1/eta]
  Scalar log_m{};   ///< max_k z_k, kept because m_eta may overflow
  std::size_t argmax_index = 0;
  bool sup_at_zero = false;  ///< every z_k <= 0
};

/// |t_k|^alpha for every lattice point.
inline Eigen::VectorXd drift_vector(const GridSpec& grid) {
  Eigen::VectorXd drift(static_cast<Eigen::Index>(grid.points()));
  for (std::size_t k = 0; k < grid.points(); ++k) {
    drift[static_cast<Eigen::Index>(k)] = std::pow(std::abs(grid.time(k)), grid.alpha);
  }
  return drift;
}

inline ZPath z_from_fbm(const FbmPath& path) {
  ZPath z{path.grid, std::sqrt(2.0) * path.values - drift_vector(path.grid)};
  z.z_values[static_cast<Eigen::Index>(path.zero_index())] = 0.0;
  return z;
}

/// Evaluate the functionals of a lattice vector `z` with spacing `eta` whose
/// origin sits at `zero_index`. Works on any Eigen vector expression, e.g. a
/// strided Map for a coarser sub-lattice.
///
/// The sum is formed as exp(max) * sum_k exp(z_k - max) with compensated
/// accumulation in index order, so the ratio never overflows. Ties in the
/// argmax go to the smallest |k - zero_index|, then to the negative side.
template <typename Derived>
PathFunctionals<typename Derived::Scalar> functionals(const Eigen::MatrixBase<Derived>& z,
                                                      typename Derived::Scalar eta,
                                                      std::size_t zero_index) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index size = z.size();
  if (size == 0) throw ArgumentError("functionals of an empty path");
  if (static_cast<Eigen::Index>(zero_index) >= size) throw ArgumentError("zero index outside the path");

  const auto distance = [zero_index](Eigen::Index k) {
    return std::abs(static_cast<long long>(k) - static_cast<long long>(zero_index));
  };

  Eigen::Index best = 0;
  Scalar top = z.coeff(0);
  for (Eigen::Index k = 1; k < size; ++k) {
    const Scalar v = z.coeff(k);
    if (v > top) {
      top = v;
      best = k;
    } else if (v == top) {
      const auto dk = distance(k);
      const auto db = distance(best);
      // Lower indices are on the negative side, so on equal distance the
      // earlier index is already preferred.
      if (dk < db) best = k;
    }
  }

  CompensatedSum<Scalar> acc;
  for (Eigen::Index k = 0; k < size; ++k) acc.add(std::exp(z.coeff(k) - top));
  const Scalar shifted_sum = acc.value();

  PathFunctionals<Scalar> out;
  out.log_m = top;
  out.m_eta = std::exp(top);
  out.s_eta = eta * out.m_eta * shifted_sum;
  out.ratio = Scalar(1) / (eta * shifted_sum);
  out.argmax_index = static_cast<std::size_t>(best);
  out.sup_at_zero = top <= Scalar(0);
  return out;
}

inline PathFunctionals<double> functionals(const ZPath& z) {
  return functionals(z.z_values, z.grid.eta, z.zero_index());
}

}  // namespace pickands
