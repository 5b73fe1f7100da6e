#pragma once

#include <vector>

#include "binx/game.hpp"
#include "binx/parallel.hpp"
#include "binx/subsets.hpp"

namespace binx {

// The unique least-squares degree-k multilinear approximation of a Boolean
// table over all 2^n points. Monomials are ordered by (degree, bitmask) with
// the intercept first, so serialized coefficient layouts are reproducible.
struct PolynomialFit {
  int n = 0;
  int degree = 0;
  std::vector<Mask> monomials;
  std::vector<double> coefficients;
  double residual = 0.0;  // sum of squared errors over all 2^n points

  double coefficient_for(Mask subset) const;
};

inline constexpr int kPolyFitMaxFeatures = 14;

// Fits f(x) = v(bitmask of x) + offset jointly over all coefficients with a
// dense orthogonal-factorization solve. The offset shifts only the intercept.
PolynomialFit fit_polynomial(const TableGame& v, int degree, double offset = 0.0,
                             Exec exec = Exec::parallel);

struct TopDegreeCheck {
  double max_discrepancy = 0.0;
  Mask worst_subset = 0;
};

// Largest |coefficient - Banzhaf interaction value| over the fit's top-degree
// monomials. The two coincide for the global unweighted fit; this check is
// the certification that they do.
TopDegreeCheck topdegree_vs_bii(const TableGame& v, const PolynomialFit& fit,
                                Exec exec = Exec::parallel);

}  // namespace binx
