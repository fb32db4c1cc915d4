#include "palim/keypoints.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "float_image.hpp"
#include "palim/error.hpp"

namespace palim {

namespace detail {

FloatImage to_float(const GrayImage& g) {
  FloatImage out(g.width(), g.height());
  std::transform(g.pixels().begin(), g.pixels().end(), out.px.begin(),
                 [](std::uint8_t v) { return static_cast<float>(v) * (1.0f / 255.0f); });
  return out;
}

FloatImage gaussian_blur(const FloatImage& img, double sigma) {
  if (sigma <= 0.0) return img;
  const int radius = std::max(1, static_cast<int>(std::ceil(4.0 * sigma)));
  std::vector<float> kernel(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-0.5 * i * i / (sigma * sigma));
    kernel[static_cast<std::size_t>(i + radius)] = static_cast<float>(v);
    sum += v;
  }
  for (auto& k : kernel) k = static_cast<float>(k / sum);

  const int w = img.width;
  const int h = img.height;
  FloatImage tmp(w, h);
  std::vector<float> line(static_cast<std::size_t>(std::max(w, h) + 2 * radius));
  for (int y = 0; y < h; ++y) {
    for (int i = -radius; i < w + radius; ++i) line[static_cast<std::size_t>(i + radius)] = img.clamped(i, y);
    for (int x = 0; x < w; ++x) {
      float acc = 0.0f;
      const float* src = line.data() + x;
      for (std::size_t k = 0; k < kernel.size(); ++k) acc += kernel[k] * src[k];
      tmp.at(x, y) = acc;
    }
  }
  FloatImage out(w, h);
  for (int x = 0; x < w; ++x) {
    for (int i = -radius; i < h + radius; ++i) line[static_cast<std::size_t>(i + radius)] = tmp.clamped(x, i);
    for (int y = 0; y < h; ++y) {
      float acc = 0.0f;
      const float* src = line.data() + y;
      for (std::size_t k = 0; k < kernel.size(); ++k) acc += kernel[k] * src[k];
      out.at(x, y) = acc;
    }
  }
  return out;
}

FloatImage downsample(const FloatImage& img) {
  FloatImage out(std::max(1, img.width / 2), std::max(1, img.height / 2));
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) out.at(x, y) = img.at(2 * x, 2 * y);
  }
  return out;
}

FloatImage upsample_bilinear(const FloatImage& img) {
  FloatImage out(img.width * 2, img.height * 2);
  for (int y = 0; y < out.height; ++y) {
    const double sy = std::clamp((y + 0.5) / 2.0 - 0.5, 0.0, static_cast<double>(img.height - 1));
    const int y0 = static_cast<int>(sy);
    const int y1 = std::min(y0 + 1, img.height - 1);
    const auto fy = static_cast<float>(sy - y0);
    for (int x = 0; x < out.width; ++x) {
      const double sx = std::clamp((x + 0.5) / 2.0 - 0.5, 0.0, static_cast<double>(img.width - 1));
      const int x0 = static_cast<int>(sx);
      const int x1 = std::min(x0 + 1, img.width - 1);
      const auto fx = static_cast<float>(sx - x0);
      const float top = img.at(x0, y0) * (1 - fx) + img.at(x1, y0) * fx;
      const float bot = img.at(x0, y1) * (1 - fx) + img.at(x1, y1) * fx;
      out.at(x, y) = top * (1 - fy) + bot * fy;
    }
  }
  return out;
}

FloatImage crop(const FloatImage& img, int x, int y, int w, int h) {
  FloatImage out(w, h);
  for (int yy = 0; yy < h; ++yy) {
    for (int xx = 0; xx < w; ++xx) out.at(xx, yy) = img.at(x + xx, y + yy);
  }
  return out;
}

void describe_on_level(const FloatImage& level, double x, double y, double sigma, double angle, float* out) {
  constexpr int d = 4;
  constexpr int n = 8;
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double hist_width = 3.0 * sigma;
  const double max_radius = std::hypot(level.width, level.height);
  const int radius = static_cast<int>(std::min(std::round(hist_width * std::numbers::sqrt2 * (d + 1) * 0.5), max_radius));
  const double cos_t = std::cos(angle) / hist_width;
  const double sin_t = std::sin(angle) / hist_width;
  const double bins_per_rad = n / two_pi;
  const double exp_scale = -1.0 / (d * d * 0.5);

  // (d + 2) x (d + 2) x (n + 2) with a one-cell margin for trilinear spill.
  std::array<double, (d + 2) * (d + 2) * (n + 2)> hist{};
  const int cx = static_cast<int>(std::lround(x));
  const int cy = static_cast<int>(std::lround(y));
  for (int i = -radius; i <= radius; ++i) {
    for (int j = -radius; j <= radius; ++j) {
      const int px = cx + j;
      const int py = cy + i;
      const double ox = px - x;
      const double oy = py - y;
      const double c_rot = ox * cos_t + oy * sin_t;
      const double r_rot = -ox * sin_t + oy * cos_t;
      const double rbin = r_rot + d / 2.0 - 0.5;
      const double cbin = c_rot + d / 2.0 - 0.5;
      if (rbin <= -1 || rbin >= d || cbin <= -1 || cbin >= d) continue;

      const double gx = level.clamped(px + 1, py) - level.clamped(px - 1, py);
      const double gy = level.clamped(px, py + 1) - level.clamped(px, py - 1);
      const double mag = std::hypot(gx, gy);
      if (mag == 0.0) continue;
      double rel = std::atan2(gy, gx) - angle;
      rel = std::fmod(rel, two_pi);
      if (rel < 0) rel += two_pi;
      const double obin = rel * bins_per_rad;
      const double weight = std::exp((c_rot * c_rot + r_rot * r_rot) * exp_scale);
      const double v = mag * weight;

      const int r0 = static_cast<int>(std::floor(rbin));
      const int c0 = static_cast<int>(std::floor(cbin));
      int o0 = static_cast<int>(std::floor(obin));
      const double fr = rbin - r0;
      const double fc = cbin - c0;
      const double fo = obin - o0;
      o0 = ((o0 % n) + n) % n;
      for (int dr = 0; dr <= 1; ++dr) {
        const double wr = dr ? fr : 1 - fr;
        for (int dc = 0; dc <= 1; ++dc) {
          const double wc = dc ? fc : 1 - fc;
          for (int dob = 0; dob <= 1; ++dob) {
            const double wo = dob ? fo : 1 - fo;
            const int idx = ((r0 + 1 + dr) * (d + 2) + (c0 + 1 + dc)) * (n + 2) + (o0 + dob);
            hist[static_cast<std::size_t>(idx)] += v * wr * wc * wo;
          }
        }
      }
    }
  }

  std::array<double, kDescriptorSize> desc{};
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) {
      const int base = ((r + 1) * (d + 2) + (c + 1)) * (n + 2);
      // Orientation bin n wraps to 0.
      for (int o = 0; o < n; ++o) {
        double v = hist[static_cast<std::size_t>(base + o)];
        if (o == 0) v += hist[static_cast<std::size_t>(base + n)];
        desc[static_cast<std::size_t>((r * d + c) * n + o)] = v;
      }
    }
  }

  double norm = 0.0;
  for (double v : desc) norm += v * v;
  norm = std::sqrt(norm);
  if (norm == 0.0) {
    std::fill(out, out + kDescriptorSize, static_cast<float>(1.0 / std::sqrt(static_cast<double>(kDescriptorSize))));
    return;
  }
  const double clip = 0.2 * norm;
  double norm2 = 0.0;
  for (double& v : desc) {
    v = std::min(v, clip);
    norm2 += v * v;
  }
  norm2 = std::sqrt(norm2);
  for (std::size_t i = 0; i < kDescriptorSize; ++i) out[i] = static_cast<float>(desc[i] / norm2);
}

}  // namespace detail

std::string_view to_string(Detector d) { return d == Detector::sift ? "sift" : "harris"; }

std::optional<Detector> parse_detector(std::string_view name) {
  if (name == "sift") return Detector::sift;
  if (name == "harris") return Detector::harris;
  return std::nullopt;
}

std::vector<float> harris_response(const GrayImage& g, const HarrisParams& params) {
  const int window = 2 * static_cast<int>(std::ceil(3.0 * params.sigma)) + 1;
  if (g.width() < window || g.height() < window) {
    throw_error(ErrorCode::invalid_argument, "degenerate image: smaller than the Harris window");
  }
  const auto img = detail::to_float(g);
  const int w = img.width;
  const int h = img.height;
  detail::FloatImage ixx(w, h), iyy(w, h), ixy(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const float gx = 0.5f * (img.clamped(x + 1, y) - img.clamped(x - 1, y));
      const float gy = 0.5f * (img.clamped(x, y + 1) - img.clamped(x, y - 1));
      ixx.at(x, y) = gx * gx;
      iyy.at(x, y) = gy * gy;
      ixy.at(x, y) = gx * gy;
    }
  }
  ixx = detail::gaussian_blur(ixx, params.sigma);
  iyy = detail::gaussian_blur(iyy, params.sigma);
  ixy = detail::gaussian_blur(ixy, params.sigma);
  std::vector<float> r(ixx.px.size());
  const auto k = static_cast<float>(params.k);
  for (std::size_t i = 0; i < r.size(); ++i) {
    const float a = ixx.px[i];
    const float b = iyy.px[i];
    const float c = ixy.px[i];
    r[i] = a * b - c * c - k * (a + b) * (a + b);
  }
  return r;
}

std::vector<KeyPoint> harris(const GrayImage& g, const HarrisParams& params) {
  const auto r = harris_response(g, params);
  const int w = g.width();
  const int h = g.height();
  const float peak = *std::max_element(r.begin(), r.end());
  if (!(peak > 0.0f)) return {};
  const auto thr = static_cast<float>(params.threshold * peak);
  auto at = [&](int x, int y) { return r[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)]; };

  std::vector<KeyPoint> out;
  const int rad = std::max(1, params.nms_radius);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const float v = at(x, y);
      if (!(v > 0.0f) || v < thr) continue;
      bool keep = true;
      for (int dy = -rad; dy <= rad && keep; ++dy) {
        const int ny = y + dy;
        if (ny < 0 || ny >= h) continue;
        for (int dx = -rad; dx <= rad; ++dx) {
          const int nx = x + dx;
          if (nx < 0 || nx >= w || (dx == 0 && dy == 0)) continue;
          const float u = at(nx, ny);
          // Plateaus keep their first pixel in raster order.
          const bool earlier = dy < 0 || (dy == 0 && dx < 0);
          if (u > v || (earlier && u == v)) {
            keep = false;
            break;
          }
        }
      }
      if (!keep) continue;
      auto offset = [](float m, float c, float p) {
        const float den = m - 2 * c + p;
        if (den >= 0.0f) return 0.0f;
        return std::clamp(0.5f * (m - p) / den, -0.5f, 0.5f);
      };
      const float ox = (x > 0 && x < w - 1) ? offset(at(x - 1, y), v, at(x + 1, y)) : 0.0f;
      const float oy = (y > 0 && y < h - 1) ? offset(at(x, y - 1), v, at(x, y + 1)) : 0.0f;
      out.push_back({static_cast<float>(x) + ox, static_cast<float>(y) + oy, 1.0f, 0.0f, v});
    }
  }
  return out;
}

Descriptor sift_describe(const GrayImage& g, const KeyPoint& kp) {
  if (!(kp.scale > 0.0f)) throw_error(ErrorCode::invalid_argument, "keypoint scale must be positive");
  // Blur only the support region; the margin keeps the crop border out of the samples.
  const double blur = std::sqrt(std::max(static_cast<double>(kp.scale) * kp.scale - 0.25, 0.01));
  const int support = static_cast<int>(std::ceil(3.0 * kp.scale * std::numbers::sqrt2 * 2.5)) + 2;
  const int margin = support + static_cast<int>(std::ceil(4.0 * blur)) + 1;
  const int cx = static_cast<int>(std::lround(kp.x));
  const int cy = static_cast<int>(std::lround(kp.y));
  const int x0 = std::clamp(cx - margin, 0, g.width() - 1);
  const int y0 = std::clamp(cy - margin, 0, g.height() - 1);
  const int x1 = std::clamp(cx + margin + 1, x0 + 1, g.width());
  const int y1 = std::clamp(cy + margin + 1, y0 + 1, g.height());
  const auto full = detail::to_float(crop(g, Box{x0, y0, x1 - x0, y1 - y0}));
  const auto level = detail::gaussian_blur(full, blur);
  Descriptor out{};
  detail::describe_on_level(level, kp.x - x0, kp.y - y0, kp.scale, kp.orientation, out.data());
  return out;
}

}  // namespace palim
