#pragma once

// The H_W gasket check: DFS circle images, restricted to a window, oriented,
// normalized and run through the Apollonian verdict.

#include <sstream>
#include <vector>

#include "kleinian/gasket.hpp"
#include "kleinian/groups.hpp"
#include "kleinian/limitset.hpp"

namespace kleinian {

/// a: z -> z + 1, b: z -> z / (2i z + 1).
inline MarkedGroup hw_marking() { return solve_parabolic_commutator().group; }

/// Unoriented circlines from a packing file.
inline std::vector<Circline> seeds_from_packing(const CirclePacking& p) {
  std::vector<Circline> out;
  for (const auto& c : p.circles) out.push_back(c.circline());
  return out;
}

/// Resolved DFS circles that meet the window. Circles cut off by max_depth
/// while still larger than epsilon are left out.
inline CirclePacking gasket_family(const DfsResult& r, const Window& window) {
  std::vector<Circline> keep;
  for (const auto& e : r.circles)
    if (e.resolved && window.meets(e.circle)) keep.push_back(e.circle);
  return packing_from_circlines(keep);
}

struct GasketCheck {
  CirclePacking family;
  MoebiusMap normalizer;
  CirclePacking normalized;
  GasketReport report;
};

inline GasketCheck check_gasket_family(CirclePacking family, double tol) {
  GasketCheck out;
  out.family = std::move(family);
  out.normalizer = normalize_to_standard_gasket(out.family, tol);
  out.normalized = transform(out.family, out.normalizer);
  out.report = is_apollonian_like(out.normalized, tol);
  return out;
}

}  // namespace kleinian
