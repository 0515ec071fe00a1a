#include "simplex_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "wiretap/errors.hpp"
#include "wiretap/ntype.hpp"

namespace wiretap::detail {
namespace {

// Odometer over the cartesian product of per-block candidate lists.
void for_each_combination(const SimplexProduct& space,
                          const std::vector<std::vector<std::vector<double>>>& per_block,
                          const PointVisitor& visit) {
  for (const auto& options : per_block) {
    if (options.empty()) return;
  }
  std::vector<double> point = space.base;
  std::vector<std::size_t> pick(per_block.size(), 0);
  auto write_block = [&](std::size_t b) {
    const auto& values = per_block[b][pick[b]];
    for (std::size_t j = 0; j < values.size(); ++j) point[space.blocks[b][j]] = values[j];
  };
  for (std::size_t b = 0; b < per_block.size(); ++b) write_block(b);
  while (true) {
    visit(point);
    std::size_t b = 0;
    for (; b < per_block.size(); ++b) {
      if (++pick[b] < per_block[b].size()) {
        write_block(b);
        break;
      }
      pick[b] = 0;
      write_block(b);
    }
    if (b == per_block.size()) return;
  }
}

}  // namespace

std::size_t SimplexProduct::free_dimension() const {
  std::size_t d = 0;
  for (const auto& b : blocks) d += b.empty() ? 0 : b.size() - 1;
  return d;
}

std::uint64_t coarse_point_count(const SimplexProduct& space, int resolution) {
  unsigned __int128 total = 1;
  for (const auto& b : space.blocks) {
    total *= count_ntypes(b.size(), resolution);
    if (total > UINT64_MAX) return UINT64_MAX;
  }
  return static_cast<std::uint64_t>(total);
}

void for_each_coarse_point(const SimplexProduct& space, int resolution, std::uint64_t budget,
                           const PointVisitor& visit) {
  if (resolution < 1) throw std::invalid_argument("grid resolution must be positive");
  const std::uint64_t count = coarse_point_count(space, resolution);
  if (count > budget) {
    throw BudgetExceeded("grid search: " + std::to_string(count) +
                         " coarse points exceed the budget of " + std::to_string(budget));
  }
  std::vector<std::vector<std::vector<double>>> per_block;
  for (const auto& b : space.blocks) {
    std::vector<std::vector<double>> options;
    NTypeEnumerator e(b.size(), resolution);
    while (e.next()) {
      std::vector<double> v(b.size());
      for (std::size_t j = 0; j < b.size(); ++j) {
        v[j] = static_cast<double>(e.counts()[j]) / resolution;
      }
      options.push_back(std::move(v));
    }
    per_block.push_back(std::move(options));
  }
  for_each_combination(space, per_block, visit);
}

void for_each_local_point(const SimplexProduct& space, const std::vector<double>& center,
                          double step, int half_width, const PointVisitor& visit) {
  constexpr double kSlack = 1e-14;
  std::vector<std::vector<std::vector<double>>> per_block;
  for (const auto& b : space.blocks) {
    const std::size_t free = b.size() - 1;
    double block_mass = 0.0;
    for (std::size_t idx : b) block_mass += center[idx];
    std::vector<std::vector<double>> options;
    std::vector<int> k(free, -half_width);
    while (true) {
      std::vector<double> v(b.size());
      double used = 0.0;
      bool ok = true;
      for (std::size_t j = 0; j < free && ok; ++j) {
        v[j] = center[b[j]] + step * k[j];
        if (v[j] < -kSlack || v[j] > block_mass + kSlack) ok = false;
        v[j] = std::max(0.0, v[j]);
        used += v[j];
      }
      if (ok) {
        v[free] = block_mass - used;
        if (v[free] >= -kSlack) {
          v[free] = std::max(0.0, v[free]);
          options.push_back(std::move(v));
        }
      }
      std::size_t j = 0;
      for (; j < free; ++j) {
        if (++k[j] <= half_width) break;
        k[j] = -half_width;
      }
      if (j == free) break;
    }
    per_block.push_back(std::move(options));
  }
  for_each_combination(space, per_block, visit);
}

GridSearchResult grid_refine(const SimplexProduct& space,
                             const std::function<double(const std::vector<double>&)>& objective,
                             GridSearchResult start, const GridSearchOptions& options) {
  GridSearchResult best = std::move(start);
  if (!std::isfinite(best.value)) return best;
  auto consider = [&](const std::vector<double>& p) {
    const double v = objective(p);
    if (v < best.value) best = {p, v};
  };
  const int half_width = options.half_width > 0 ? options.half_width : 2 * options.shrink;
  double step = 1.0 / options.resolution;
  for (int r = 0; r < options.rounds; ++r) {
    step /= options.shrink;
    // Walk at this scale until the incumbent settles: along a kink the best
    // nearby point can sit many boxes away from the first center.
    for (int move = 0; move < options.max_moves; ++move) {
      const double before = best.value;
      const std::vector<double> center = best.point;
      for_each_local_point(space, center, step, half_width, consider);
      if (!(best.value < before)) break;
    }
  }
  return best;
}

GridSearchResult grid_minimize(const SimplexProduct& space,
                               const std::function<double(const std::vector<double>&)>& objective,
                               const std::vector<std::vector<double>>& seeds,
                               const GridSearchOptions& options) {
  GridSearchResult best{space.base, std::numeric_limits<double>::infinity()};
  auto consider = [&](const std::vector<double>& p) {
    const double v = objective(p);
    if (v < best.value) best = {p, v};
  };
  for_each_coarse_point(space, options.resolution, options.budget, consider);
  for (const auto& s : seeds) consider(s);
  return grid_refine(space, objective, std::move(best), options);
}

}  // namespace wiretap::detail
