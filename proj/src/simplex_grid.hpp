#pragma once

// Grid search over a product of probability simplices. Used by the
// brute-force exponent oracles; not part of the public interface.
//
// A point is a flat vector. Each block lists the flat coordinates that form
// one simplex (its "active" coordinates); coordinates outside every block
// keep the value they have in `base`.

#include <cstdint>
#include <functional>
#include <vector>

namespace wiretap::detail {

struct SimplexProduct {
  std::vector<double> base;
  std::vector<std::vector<std::size_t>> blocks;

  /// Number of free coordinates (block size minus one, summed).
  std::size_t free_dimension() const;
};

using PointVisitor = std::function<void(const std::vector<double>&)>;

/// Number of points of the coarse lattice with spacing 1/resolution.
std::uint64_t coarse_point_count(const SimplexProduct& space, int resolution);

/// Visits every lattice point with spacing 1/resolution. Throws
/// BudgetExceeded if there are more than `budget` of them.
void for_each_coarse_point(const SimplexProduct& space, int resolution, std::uint64_t budget,
                           const PointVisitor& visit);

/// Visits the points center + step * k, k in [-half_width, half_width]^free,
/// that stay inside every simplex. The last active coordinate of each block
/// absorbs the offsets.
void for_each_local_point(const SimplexProduct& space, const std::vector<double>& center,
                          double step, int half_width, const PointVisitor& visit);

struct GridSearchOptions {
  int resolution = 64;
  int rounds = 3;
  int shrink = 8;
  /// Local half-width in refined steps; 0 picks 2 * shrink.
  int half_width = 0;
  /// Local searches per round; a round ends early once one brings no gain.
  int max_moves = 64;
  std::uint64_t budget = 4'000'000;
};

struct GridSearchResult {
  std::vector<double> point;
  double value;
};

/// The refinement stage of grid_minimize on its own, starting from `start`
/// (typically the best point of a coarse pass the caller evaluated itself).
GridSearchResult grid_refine(const SimplexProduct& space,
                             const std::function<double(const std::vector<double>&)>& objective,
                             GridSearchResult start, const GridSearchOptions& options);

/// Coarse lattice plus seeds, then `rounds` local refinements around the
/// incumbent, each shrinking the step by `shrink` and re-centering until
/// the incumbent stops improving.
GridSearchResult grid_minimize(const SimplexProduct& space,
                               const std::function<double(const std::vector<double>&)>& objective,
                               const std::vector<std::vector<double>>& seeds,
                               const GridSearchOptions& options);

}  // namespace wiretap::detail
