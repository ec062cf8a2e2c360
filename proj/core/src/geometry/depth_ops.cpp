#include "streetforge/geometry/depth_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "streetforge/parallel.hpp"

namespace streetforge {

namespace {

// Per-column 1D nearest-seed pass: for each row r of column x, the row of
// the nearest valid pixel in that column (ties toward the smaller row), or
// -1 for an empty column.
void column_nearest(const SparseMap& sparse, int x, std::vector<int>& seed_row) {
  const int h = sparse.height;
  seed_row.assign(h, -1);
  std::vector<int> seeds;
  for (int y = 0; y < h; ++y)
    if (sparse.valid_at(x, y)) seeds.push_back(y);
  if (seeds.empty()) return;
  size_t k = 0;
  for (int y = 0; y < h; ++y) {
    while (k + 1 < seeds.size() &&
           std::abs(seeds[k + 1] - y) < std::abs(seeds[k] - y))
      ++k;
    seed_row[y] = seeds[k];
  }
}

}  // namespace

std::vector<int32_t> nearest_valid_index_map(const SparseMap& sparse) {
  const int w = sparse.width, h = sparse.height;
  require(sparse.valid_count() >= 1, "empty depth");

  // Column pass first, then for each pixel scan columns left to right with a
  // strict-less comparison, which fixes the tie rule (smaller column, then
  // smaller row).
  std::vector<std::vector<int>> col_seed(w);
  for (int x = 0; x < w; ++x) column_nearest(sparse, x, col_seed[x]);

  std::vector<int32_t> nearest(static_cast<size_t>(w) * h, -1);
  parallel_chunks(static_cast<size_t>(h), [&](size_t y0, size_t y1) {
    for (size_t y = y0; y < y1; ++y) {
      for (int x = 0; x < w; ++x) {
        size_t p = y * w + x;
        if (sparse.valid_at(x, static_cast<int>(y))) {
          nearest[p] = static_cast<int32_t>(p);
          continue;
        }
        long best_d2 = std::numeric_limits<long>::max();
        int best_x = -1, best_y = -1;
        for (int sx = 0; sx < w; ++sx) {
          long dx = sx - x;
          if (dx * dx >= best_d2) continue;
          int sy = col_seed[sx][y];
          if (sy < 0) continue;
          long dy = sy - static_cast<long>(y);
          long d2 = dx * dx + dy * dy;
          if (d2 < best_d2) {
            best_d2 = d2;
            best_x = sx;
            best_y = sy;
          }
        }
        nearest[p] = static_cast<int32_t>(best_y * w + best_x);
      }
    }
  });
  return nearest;
}

DepthMap densify_depth(const SparseMap& sparse) {
  const int w = sparse.width, h = sparse.height;
  std::vector<int32_t> nearest = nearest_valid_index_map(sparse);

  DepthMap filled(w, h);
  for (size_t p = 0; p < filled.values.size(); ++p)
    filled.values[p] = sparse.depth[nearest[p]];

  // One 5x5 median pass over the pixels the fill invented; windows clip at
  // the borders, even counts take the lower median.
  DepthMap out = filled;
  parallel_chunks(static_cast<size_t>(h), [&](size_t y0, size_t y1) {
    std::vector<double> window;
    window.reserve(25);
    for (size_t y = y0; y < y1; ++y) {
      for (int x = 0; x < w; ++x) {
        if (sparse.valid_at(x, static_cast<int>(y))) continue;
        window.clear();
        for (int dy = -2; dy <= 2; ++dy) {
          int yy = static_cast<int>(y) + dy;
          if (yy < 0 || yy >= h) continue;
          for (int dx = -2; dx <= 2; ++dx) {
            int xx = x + dx;
            if (xx < 0 || xx >= w) continue;
            window.push_back(filled.at(xx, yy));
          }
        }
        size_t mid = (window.size() - 1) / 2;
        std::nth_element(window.begin(), window.begin() + mid, window.end());
        out.at(x, static_cast<int>(y)) = window[mid];
      }
    }
  });
  return out;
}

DepthAlignment align_depth_lsq(const DepthMap& dense, const SparseMap& sparse_lidar) {
  require(dense.width == sparse_lidar.width && dense.height == sparse_lidar.height,
          "raster size mismatch");

  // Normal equations for lidar ~ a*dense + b over valid lidar pixels.
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int y = 0; y < dense.height; ++y) {
    for (int x = 0; x < dense.width; ++x) {
      double lidar = sparse_lidar.depth_at(x, y);
      if (lidar <= 0.0) continue;
      double d = dense.at(x, y);
      n += 1;
      sx += d;
      sy += lidar;
      sxx += d * d;
      sxy += d * lidar;
    }
  }
  require(n >= 2, "degenerate alignment");
  double det = n * sxx - sx * sx;
  require(std::abs(det) > 1e-12 * std::max(1.0, n * sxx), "degenerate alignment");

  DepthAlignment result;
  result.a = (n * sxy - sx * sy) / det;
  result.b = (sxx * sy - sx * sxy) / det;
  result.aligned = DepthMap(dense.width, dense.height);
  for (size_t i = 0; i < dense.values.size(); ++i)
    result.aligned.values[i] = std::max(0.0, result.a * dense.values[i] + result.b);
  return result;
}

}  // namespace streetforge
