// Times the OpenMP kernels against their serial drivers and checks that the
// two produce identical results. Run from anywhere; no arguments.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>

#include "binx/axioms.hpp"
#include "binx/game.hpp"
#include "binx/indices.hpp"
#include "binx/mobius.hpp"
#include "binx/models.hpp"
#include "binx/parallel.hpp"
#include "binx/sampling.hpp"

namespace {

using binx::Exec;

double seconds(std::function<void()> fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(stop - start).count();
}

void row(const char* name, double serial, double parallel, bool identical) {
  std::printf("%-28s %10.3fs %10.3fs %8.2fx   %s\n", name, serial, parallel,
              serial / parallel, identical ? "identical" : "MISMATCH");
}

}  // namespace

int main() {
  std::printf("%-28s %11s %11s %9s\n", "kernel", "serial", "openmp", "speedup");
  std::printf("workers: %d\n", binx::worker_count());

  {
    binx::SplitMix64 rng{42};
    const auto game = binx::random_table_game(22, rng);
    binx::MobiusCoefficients serial_out, parallel_out;
    const double ts = seconds([&] { serial_out = binx::mobius_transform(*game, Exec::serial); });
    const double tp = seconds([&] { parallel_out = binx::mobius_transform(*game, Exec::parallel); });
    row("mobius_transform n=22", ts, tp, serial_out.coeffs == parallel_out.coeffs);
  }

  {
    const auto game = binx::threshold_game(20, 10);
    binx::TableGamePtr serial_out, parallel_out;
    const double ts = seconds([&] { serial_out = binx::materialize_table(*game, Exec::serial); });
    const double tp = seconds([&] { parallel_out = binx::materialize_table(*game, Exec::parallel); });
    row("materialize_table n=20", ts, tp, serial_out->values() == parallel_out->values());
  }

  {
    binx::SplitMix64 rng{7};
    const binx::GamePtr game = binx::random_table_game(13, rng);
    binx::InteractionReport serial_out, parallel_out;
    const double ts = seconds(
        [&] { serial_out = binx::compute_report(game, binx::IndexKind::sii(), 2, Exec::serial); });
    const double tp = seconds(
        [&] { parallel_out = binx::compute_report(game, binx::IndexKind::sii(), 2, Exec::parallel); });
    bool same = serial_out.entries.size() == parallel_out.entries.size();
    for (std::size_t i = 0; same && i < serial_out.entries.size(); ++i) {
      same = serial_out.entries[i].value == parallel_out.entries[i].value;
    }
    row("sii report n=13 order=2", ts, tp, same);
  }

  {
    const auto game = binx::threshold_game(40, 20);
    binx::Estimate serial_out, parallel_out;
    const binx::FeatureSet pair = binx::FeatureSet::of({0, 1}, 40);
    const double ts = seconds(
        [&] { serial_out = binx::bii_sample(*game, pair, 400000, 99, Exec::serial); });
    const double tp = seconds(
        [&] { parallel_out = binx::bii_sample(*game, pair, 400000, 99, Exec::parallel); });
    row("bii_sample n=40 400k draws", ts, tp,
        serial_out.value == parallel_out.value &&
            serial_out.stderr_of_mean == parallel_out.stderr_of_mean);
  }

  return 0;
}
