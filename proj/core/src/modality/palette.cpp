#include "streetforge/modality/palette.hpp"

namespace streetforge {

Palette default_palette(int K) {
  require(K >= 1 && K <= 32, "default palette supports 1..32 classes");

  // Candidate set: the {0, .5, 1}^3 lattice plus the {.25, .75}^3 cell
  // centers (35 points, min separation 0.433). Farthest-point ordering from
  // black makes every prefix well separated too.
  std::vector<Eigen::Vector3d> candidates;
  for (double r : {0.0, 0.5, 1.0})
    for (double g : {0.0, 0.5, 1.0})
      for (double b : {0.0, 0.5, 1.0}) candidates.emplace_back(r, g, b);
  for (double r : {0.25, 0.75})
    for (double g : {0.25, 0.75})
      for (double b : {0.25, 0.75}) candidates.emplace_back(r, g, b);

  Palette palette;
  std::vector<bool> used(candidates.size(), false);
  palette.colors.push_back(candidates[0]);  // black
  used[0] = true;
  while (palette.K() < K) {
    int best = -1;
    double best_sep = -1.0;
    for (size_t i = 0; i < candidates.size(); ++i) {
      if (used[i]) continue;
      double sep = std::numeric_limits<double>::infinity();
      for (const auto& c : palette.colors)
        sep = std::min(sep, (candidates[i] - c).norm());
      if (sep > best_sep) {
        best_sep = sep;
        best = static_cast<int>(i);
      }
    }
    used[best] = true;
    palette.colors.push_back(candidates[best]);
  }
  return palette;
}

}  // namespace streetforge
