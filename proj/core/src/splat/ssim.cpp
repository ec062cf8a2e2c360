#include "streetforge/splat/ssim.hpp"

#include <array>
#include <cmath>

namespace streetforge {

namespace {

constexpr int kWin = 11;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

const std::array<double, kWin>& gaussian_kernel() {
  static const std::array<double, kWin> kernel = [] {
    std::array<double, kWin> k{};
    double sum = 0.0;
    for (int i = 0; i < kWin; ++i) {
      double d = i - (kWin - 1) / 2.0;
      k[i] = std::exp(-d * d / (2.0 * 1.5 * 1.5));
      sum += k[i];
    }
    for (double& v : k) v /= sum;
    return k;
  }();
  return kernel;
}

// Valid-mode separable correlation of a planar image with the window kernel.
std::vector<double> conv_valid(const std::vector<double>& img, int w, int h) {
  const auto& k = gaussian_kernel();
  const int ow = w - kWin + 1, oh = h - kWin + 1;
  std::vector<double> tmp(static_cast<size_t>(ow) * h, 0.0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int i = 0; i < kWin; ++i) acc += k[i] * img[static_cast<size_t>(y) * w + x + i];
      tmp[static_cast<size_t>(y) * ow + x] = acc;
    }
  std::vector<double> out(static_cast<size_t>(ow) * oh, 0.0);
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int i = 0; i < kWin; ++i) acc += k[i] * tmp[static_cast<size_t>(y + i) * ow + x];
      out[static_cast<size_t>(y) * ow + x] = acc;
    }
  return out;
}

// Adjoint of conv_valid: scatters window-grid values back onto the image grid.
std::vector<double> conv_valid_adjoint(const std::vector<double>& win, int w, int h) {
  const auto& k = gaussian_kernel();
  const int ow = w - kWin + 1, oh = h - kWin + 1;
  std::vector<double> tmp(static_cast<size_t>(ow) * h, 0.0);
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x) {
      double v = win[static_cast<size_t>(y) * ow + x];
      for (int i = 0; i < kWin; ++i) tmp[static_cast<size_t>(y + i) * ow + x] += k[i] * v;
    }
  std::vector<double> out(static_cast<size_t>(w) * h, 0.0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < ow; ++x) {
      double v = tmp[static_cast<size_t>(y) * ow + x];
      for (int i = 0; i < kWin; ++i) out[static_cast<size_t>(y) * w + x + i] += k[i] * v;
    }
  return out;
}

std::vector<double> extract_channel(const std::vector<double>& img, int channels,
                                    int c) {
  std::vector<double> out(img.size() / channels);
  for (size_t i = 0; i < out.size(); ++i) out[i] = img[i * channels + c];
  return out;
}

// Per-channel SSIM; fills grad (planar) when requested.
double ssim_channel(const std::vector<double>& a, const std::vector<double>& b,
                    int w, int h, std::vector<double>* grad) {
  std::vector<double> aa(a.size()), bb(a.size()), ab(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    aa[i] = a[i] * a[i];
    bb[i] = b[i] * b[i];
    ab[i] = a[i] * b[i];
  }
  std::vector<double> mu_a = conv_valid(a, w, h);
  std::vector<double> mu_b = conv_valid(b, w, h);
  std::vector<double> m_aa = conv_valid(aa, w, h);
  std::vector<double> m_bb = conv_valid(bb, w, h);
  std::vector<double> m_ab = conv_valid(ab, w, h);

  const size_t npos = mu_a.size();
  double total = 0.0;
  std::vector<double> d_mu_a, d_m_aa, d_m_ab;
  if (grad) {
    d_mu_a.assign(npos, 0.0);
    d_m_aa.assign(npos, 0.0);
    d_m_ab.assign(npos, 0.0);
  }

  for (size_t i = 0; i < npos; ++i) {
    double va = m_aa[i] - mu_a[i] * mu_a[i];
    double vb = m_bb[i] - mu_b[i] * mu_b[i];
    double cov = m_ab[i] - mu_a[i] * mu_b[i];
    double a1 = 2.0 * mu_a[i] * mu_b[i] + kC1;
    double a2 = 2.0 * cov + kC2;
    double b1 = mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + kC1;
    double b2 = va + vb + kC2;
    double s = (a1 * a2) / (b1 * b2);
    total += s;

    if (grad) {
      double ds_dvar = -s / b2;
      double ds_dcov = 2.0 * a1 / (b1 * b2);
      double ds_dmu_direct = 2.0 * mu_b[i] * a2 / (b1 * b2) - 2.0 * mu_a[i] * s / b1;
      d_mu_a[i] = ds_dmu_direct + ds_dvar * (-2.0 * mu_a[i]) + ds_dcov * (-mu_b[i]);
      d_m_aa[i] = ds_dvar;
      d_m_ab[i] = ds_dcov;
    }
  }

  if (grad) {
    std::vector<double> g1 = conv_valid_adjoint(d_mu_a, w, h);
    std::vector<double> g2 = conv_valid_adjoint(d_m_aa, w, h);
    std::vector<double> g3 = conv_valid_adjoint(d_m_ab, w, h);
    grad->assign(a.size(), 0.0);
    for (size_t i = 0; i < a.size(); ++i)
      (*grad)[i] = (g1[i] + 2.0 * a[i] * g2[i] + b[i] * g3[i]) / npos;
  }
  return total / npos;
}

std::vector<double> downsample2(const std::vector<double>& img, int w, int h,
                                int channels, int& ow, int& oh) {
  ow = w / 2;
  oh = h / 2;
  std::vector<double> out(static_cast<size_t>(ow) * oh * channels, 0.0);
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x)
      for (int c = 0; c < channels; ++c) {
        double acc = 0.0;
        for (int dy = 0; dy < 2; ++dy)
          for (int dx = 0; dx < 2; ++dx)
            acc += img[(static_cast<size_t>(2 * y + dy) * w + 2 * x + dx) * channels + c];
        out[(static_cast<size_t>(y) * ow + x) * channels + c] = acc / 4.0;
      }
  return out;
}

// Adjoint of 2x2 average pooling.
void upsample2_add(const std::vector<double>& grad_small, int ow, int oh,
                   int channels, std::vector<double>& grad, int w, int h,
                   double scale) {
  (void)h;
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x)
      for (int c = 0; c < channels; ++c) {
        double v = grad_small[(static_cast<size_t>(y) * ow + x) * channels + c] *
                   scale / 4.0;
        for (int dy = 0; dy < 2; ++dy)
          for (int dx = 0; dx < 2; ++dx)
            grad[(static_cast<size_t>(2 * y + dy) * w + 2 * x + dx) * channels + c] += v;
      }
}

void check_args(const std::vector<double>& a, const std::vector<double>& b,
                int width, int height, int channels) {
  require(width >= kWin && height >= kWin, "image smaller than the SSIM window");
  require(a.size() == b.size() &&
              a.size() == static_cast<size_t>(width) * height * channels,
          "ssim input shape mismatch");
}

}  // namespace

double ssim(const std::vector<double>& a, const std::vector<double>& b, int width,
            int height, int channels) {
  check_args(a, b, width, height, channels);
  double total = 0.0;
  for (int c = 0; c < channels; ++c)
    total += ssim_channel(extract_channel(a, channels, c),
                          extract_channel(b, channels, c), width, height, nullptr);
  return total / channels;
}

double ssim_with_grad(const std::vector<double>& a, const std::vector<double>& b,
                      int width, int height, int channels,
                      std::vector<double>& grad_a) {
  check_args(a, b, width, height, channels);
  grad_a.assign(a.size(), 0.0);
  double total = 0.0;
  std::vector<double> chan_grad;
  for (int c = 0; c < channels; ++c) {
    total += ssim_channel(extract_channel(a, channels, c),
                          extract_channel(b, channels, c), width, height,
                          &chan_grad);
    for (size_t i = 0; i < chan_grad.size(); ++i)
      grad_a[i * channels + c] = chan_grad[i] / channels;
  }
  return total / channels;
}

double multiscale_ssim(const std::vector<double>& a, const std::vector<double>& b,
                       int width, int height, int channels, int scales) {
  std::vector<double> ca = a, cb = b;
  int w = width, h = height, used = 0;
  double total = 0.0;
  for (int s = 0; s < scales && w >= kWin && h >= kWin; ++s) {
    total += ssim(ca, cb, w, h, channels);
    ++used;
    if (s + 1 < scales) {
      int ow, oh;
      ca = downsample2(ca, w, h, channels, ow, oh);
      cb = downsample2(cb, w, h, channels, ow, oh);
      w = ow;
      h = oh;
    }
  }
  require(used > 0, "image smaller than the SSIM window");
  return total / used;
}

double multiscale_ssim_with_grad(const std::vector<double>& a,
                                 const std::vector<double>& b, int width,
                                 int height, int channels,
                                 std::vector<double>& grad_a, int scales) {
  // Collect the image pyramid first, then walk gradients back up.
  std::vector<std::vector<double>> pa{a}, pb{b};
  std::vector<int> ws{width}, hs{height};
  for (int s = 1; s < scales; ++s) {
    int w = ws.back(), h = hs.back();
    if (w / 2 < kWin || h / 2 < kWin) break;
    int ow, oh;
    pa.push_back(downsample2(pa.back(), w, h, channels, ow, oh));
    pb.push_back(downsample2(pb.back(), w, h, channels, ow, oh));
    ws.push_back(ow);
    hs.push_back(oh);
  }
  const int used = static_cast<int>(pa.size());
  require(width >= kWin && height >= kWin, "image smaller than the SSIM window");

  double total = 0.0;
  std::vector<std::vector<double>> level_grads(used);
  for (int s = 0; s < used; ++s)
    total += ssim_with_grad(pa[s], pb[s], ws[s], hs[s], channels, level_grads[s]);

  // Propagate each level's gradient up through the pooling chain.
  grad_a.assign(a.size(), 0.0);
  for (int s = used - 1; s >= 0; --s) {
    std::vector<double> g = level_grads[s];
    for (int up = s; up > 0; --up) {
      std::vector<double> bigger(static_cast<size_t>(ws[up - 1]) * hs[up - 1] * channels, 0.0);
      upsample2_add(g, ws[up], hs[up], channels, bigger, ws[up - 1], hs[up - 1], 1.0);
      g = std::move(bigger);
    }
    for (size_t i = 0; i < grad_a.size(); ++i) grad_a[i] += g[i] / used;
  }
  return total / used;
}

}  // namespace streetforge
