#pragma once

#include <vector>

#include "binx/game.hpp"
#include "binx/parallel.hpp"
#include "binx/subsets.hpp"

namespace binx {

// Coefficients of the unique expansion of a game over the primitive-game
// basis: v(S) = sum over R subset of S of coeffs[R]. coeffs[R] equals the
// Harsanyi dividend of R.
struct MobiusCoefficients {
  int n = 0;
  std::vector<double> coeffs;
};

// In-place subset pass, O(n * 2^n). Dense, so subject to the exact cap.
MobiusCoefficients mobius_transform(const TableGame& v, Exec exec = Exec::parallel);

// Inverse transform (subset sums): rebuilds the 2^n game values.
TableGamePtr reconstruct_game(const MobiusCoefficients& coeffs, Exec exec = Exec::parallel);

}  // namespace binx
