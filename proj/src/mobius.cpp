#include "binx/mobius.hpp"

namespace binx {

namespace {

// One dimension of the subset zeta (add) or Moebius (subtract) pass. Entries
// with bit d set are updated from entries with bit d clear, so all updates
// within one dimension are independent and the result does not depend on the
// iteration order or thread count. The loop index enumerates exactly the
// masks with bit d set.
void subset_pass(std::vector<double>& f, int n, bool invert, Exec exec) {
  const std::int64_t half = static_cast<std::int64_t>(f.size() / 2);
  for (int d = 0; d < n; ++d) {
    const Mask bit = Mask{1} << d;
    const Mask low = bit - 1;
    parallel_for(exec, half, [&, bit, low](std::int64_t i) {
      const Mask u = static_cast<Mask>(i);
      const Mask mask = ((u & ~low) << 1) | bit | (u & low);
      if (invert) {
        f[mask] -= f[mask ^ bit];
      } else {
        f[mask] += f[mask ^ bit];
      }
    });
  }
}

}  // namespace

MobiusCoefficients mobius_transform(const TableGame& v, Exec exec) {
  const int n = v.feature_count();
  require_within_exact_cap(n, "mobius_transform");
  MobiusCoefficients out;
  out.n = n;
  out.coeffs = v.values();
  subset_pass(out.coeffs, n, /*invert=*/true, exec);
  return out;
}

TableGamePtr reconstruct_game(const MobiusCoefficients& coeffs, Exec exec) {
  std::vector<double> values = coeffs.coeffs;
  subset_pass(values, coeffs.n, /*invert=*/false, exec);
  return std::make_shared<TableGame>(coeffs.n, std::move(values));
}

}  // namespace binx
