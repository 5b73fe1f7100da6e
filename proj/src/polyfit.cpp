#include "binx/polyfit.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "binx/indices.hpp"
#include "binx/mobius.hpp"

namespace binx {

double PolynomialFit::coefficient_for(Mask subset) const {
  for (std::size_t i = 0; i < monomials.size(); ++i) {
    if (monomials[i] == subset) return coefficients[i];
  }
  throw argument_error("subset is not a monomial of this fit");
}

PolynomialFit fit_polynomial(const TableGame& v, int degree, double offset, Exec exec) {
  const int n = v.feature_count();
  if (degree < 1 || degree > n) {
    throw argument_error("fit degree must be in 1..n");
  }
  if (n > kPolyFitMaxFeatures) {
    throw capacity_error("polynomial fit is limited to " +
                         std::to_string(kPolyFitMaxFeatures) + " features");
  }

  PolynomialFit fit;
  fit.n = n;
  fit.degree = degree;
  fit.monomials.push_back(0);
  for (Mask m : subsets_up_to_order(n, degree)) fit.monomials.push_back(m);

  const auto rows = static_cast<Eigen::Index>(std::size_t{1} << n);
  const auto cols = static_cast<Eigen::Index>(fit.monomials.size());
  Eigen::MatrixXd design(rows, cols);
  parallel_for(exec, rows, [&](std::int64_t r) {
    const Mask x = static_cast<Mask>(r);
    for (Eigen::Index c = 0; c < cols; ++c) {
      // The monomial prod_{i in m} x_i over 0/1 inputs is the subset test.
      design(r, c) = (fit.monomials[static_cast<std::size_t>(c)] & ~x) == 0 ? 1.0 : 0.0;
    }
  });

  Eigen::VectorXd target(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    target(r) = v.values()[static_cast<std::size_t>(r)] + offset;
  }

  const Eigen::VectorXd solution = design.householderQr().solve(target);
  fit.coefficients.assign(solution.data(), solution.data() + solution.size());
  fit.residual = (design * solution - target).squaredNorm();
  return fit;
}

TopDegreeCheck topdegree_vs_bii(const TableGame& v, const PolynomialFit& fit, Exec exec) {
  const auto coeffs = mobius_transform(v, exec);
  TopDegreeCheck check;
  for (std::size_t i = 0; i < fit.monomials.size(); ++i) {
    const Mask m = fit.monomials[i];
    if (std::popcount(m) != fit.degree) continue;
    const double bii = bii_via_mobius(coeffs, FeatureSet(m, fit.n));
    const double gap = std::abs(fit.coefficients[i] - bii);
    if (gap > check.max_discrepancy) {
      check.max_discrepancy = gap;
      check.worst_subset = m;
    }
  }
  return check;
}

}  // namespace binx
