#include "streetforge/io/pfm.hpp"

#include <fstream>
#include <sstream>

namespace streetforge {

void write_pfm(const DepthMap& depth, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot open for write: " + path);
  out << "Pf\n" << depth.width << " " << depth.height << "\n-1.0\n";
  std::vector<float> row(depth.width);
  for (int y = depth.height - 1; y >= 0; --y) {
    for (int x = 0; x < depth.width; ++x)
      row[x] = static_cast<float>(depth.at(x, y));
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
  require(out.good(), "write failed: " + path);
}

DepthMap read_pfm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot open: " + path);
  std::string magic;
  int w = 0, h = 0;
  double scale = 0.0;
  in >> magic >> w >> h >> scale;
  require(magic == "Pf", "not a grayscale PFM: " + path);
  require(w > 0 && h > 0, "bad PFM dims: " + path);
  require(scale < 0.0, "big-endian PFM not supported: " + path);
  in.get();  // single whitespace after the header

  DepthMap depth(w, h);
  std::vector<float> row(w);
  for (int y = h - 1; y >= 0; --y) {
    in.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(row.size() * sizeof(float)));
    require(in.good(), "truncated PFM: " + path);
    for (int x = 0; x < w; ++x) depth.at(x, y) = row[x];
  }
  return depth;
}

}  // namespace streetforge
