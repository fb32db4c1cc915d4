#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>

#include "float_image.hpp"
#include "palim/error.hpp"
#include "palim/keypoints.hpp"

namespace palim::detail {

namespace {

constexpr int kBorder = 5;
constexpr int kMaxRefineSteps = 5;
constexpr int kOrientationBins = 36;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Pyramid {
  std::vector<std::vector<FloatImage>> gauss;  // [octave][s + 3]
  std::vector<std::vector<FloatImage>> dog;    // [octave][s + 2]
};

int octave_count(int w, int h, const SiftParams& p) {
  if (p.octaves > 0) return p.octaves;
  const int side = std::min(w, h);
  return std::max(1, static_cast<int>(std::floor(std::log2(static_cast<double>(side)))) - 3);
}

Pyramid build_pyramid(const FloatImage& base_in, const SiftParams& p, double input_sigma) {
  const int s = p.scales_per_octave;
  Pyramid pyr;
  const int octaves = octave_count(base_in.width, base_in.height, p);
  const double k = std::pow(2.0, 1.0 / s);
  std::vector<double> inc(static_cast<std::size_t>(s + 3));
  for (int i = 1; i < s + 3; ++i) {
    const double prev = p.sigma0 * std::pow(k, i - 1);
    inc[static_cast<std::size_t>(i)] = std::sqrt(prev * k * prev * k - prev * prev);
  }
  FloatImage base = gaussian_blur(base_in, std::sqrt(std::max(p.sigma0 * p.sigma0 - input_sigma * input_sigma, 0.01)));
  pyr.gauss.resize(static_cast<std::size_t>(octaves));
  pyr.dog.resize(static_cast<std::size_t>(octaves));
  for (int o = 0; o < octaves; ++o) {
    auto& g = pyr.gauss[static_cast<std::size_t>(o)];
    g.reserve(static_cast<std::size_t>(s + 3));
    g.push_back(o == 0 ? std::move(base) : downsample(pyr.gauss[static_cast<std::size_t>(o - 1)][static_cast<std::size_t>(s)]));
    for (int i = 1; i < s + 3; ++i) g.push_back(gaussian_blur(g.back(), inc[static_cast<std::size_t>(i)]));
    auto& d = pyr.dog[static_cast<std::size_t>(o)];
    for (int i = 0; i + 1 < s + 3; ++i) {
      FloatImage diff(g[static_cast<std::size_t>(i)].width, g[static_cast<std::size_t>(i)].height);
      for (std::size_t j = 0; j < diff.px.size(); ++j) {
        diff.px[j] = g[static_cast<std::size_t>(i + 1)].px[j] - g[static_cast<std::size_t>(i)].px[j];
      }
      d.push_back(std::move(diff));
    }
  }
  return pyr;
}

bool is_extremum(const std::vector<FloatImage>& dog, int layer, int x, int y, float v) {
  const bool is_max = v > 0;
  for (int dl = -1; dl <= 1; ++dl) {
    const auto& img = dog[static_cast<std::size_t>(layer + dl)];
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dl == 0 && dx == 0 && dy == 0) continue;
        const float u = img.at(x + dx, y + dy);
        if (is_max ? u >= v : u <= v) return false;
      }
    }
  }
  return true;
}

struct Refined {
  int x, y, layer;
  double ox, oy, ol;
  double contrast;
};

std::optional<Refined> refine(const std::vector<FloatImage>& dog, int layer, int x, int y, const SiftParams& p) {
  const int s = p.scales_per_octave;
  const int w = dog[0].width;
  const int h = dog[0].height;
  double ox = 0, oy = 0, ol = 0;
  int step = 0;
  for (; step < kMaxRefineSteps; ++step) {
    const auto& c = dog[static_cast<std::size_t>(layer)];
    const auto& prev = dog[static_cast<std::size_t>(layer - 1)];
    const auto& next = dog[static_cast<std::size_t>(layer + 1)];
    const double v = c.at(x, y);
    const double dx = 0.5 * (c.at(x + 1, y) - c.at(x - 1, y));
    const double dy = 0.5 * (c.at(x, y + 1) - c.at(x, y - 1));
    const double ds = 0.5 * (next.at(x, y) - prev.at(x, y));
    const double dxx = c.at(x + 1, y) + c.at(x - 1, y) - 2 * v;
    const double dyy = c.at(x, y + 1) + c.at(x, y - 1) - 2 * v;
    const double dss = next.at(x, y) + prev.at(x, y) - 2 * v;
    const double dxy = 0.25 * (c.at(x + 1, y + 1) - c.at(x - 1, y + 1) - c.at(x + 1, y - 1) + c.at(x - 1, y - 1));
    const double dxs = 0.25 * (next.at(x + 1, y) - next.at(x - 1, y) - prev.at(x + 1, y) + prev.at(x - 1, y));
    const double dys = 0.25 * (next.at(x, y + 1) - next.at(x, y - 1) - prev.at(x, y + 1) + prev.at(x, y - 1));
    // Solve H * off = -grad by Cramer's rule.
    const double a = dxx, b = dxy, cc = dxs, d = dyy, e = dys, f = dss;
    const double det = a * (d * f - e * e) - b * (b * f - e * cc) + cc * (b * e - d * cc);
    if (std::abs(det) < 1e-12) return std::nullopt;
    const double gx = -dx, gy = -dy, gs = -ds;
    ox = (gx * (d * f - e * e) - b * (gy * f - e * gs) + cc * (gy * e - d * gs)) / det;
    oy = (a * (gy * f - e * gs) - gx * (b * f - e * cc) + cc * (b * gs - gy * cc)) / det;
    ol = (a * (d * gs - gy * e) - b * (b * gs - gy * cc) + gx * (b * e - d * cc)) / det;
    if (std::abs(ox) < 0.5 && std::abs(oy) < 0.5 && std::abs(ol) < 0.5) break;
    if (std::abs(ox) > 1e6 || std::abs(oy) > 1e6 || std::abs(ol) > 1e6) return std::nullopt;
    x += static_cast<int>(std::lround(ox));
    y += static_cast<int>(std::lround(oy));
    layer += static_cast<int>(std::lround(ol));
    if (layer < 1 || layer > s || x < kBorder || x >= w - kBorder || y < kBorder || y >= h - kBorder) {
      return std::nullopt;
    }
  }
  if (step == kMaxRefineSteps) return std::nullopt;

  const auto& c = dog[static_cast<std::size_t>(layer)];
  const auto& prev = dog[static_cast<std::size_t>(layer - 1)];
  const auto& next = dog[static_cast<std::size_t>(layer + 1)];
  const double dx = 0.5 * (c.at(x + 1, y) - c.at(x - 1, y));
  const double dy = 0.5 * (c.at(x, y + 1) - c.at(x, y - 1));
  const double ds = 0.5 * (next.at(x, y) - prev.at(x, y));
  const double contrast = c.at(x, y) + 0.5 * (dx * ox + dy * oy + ds * ol);
  if (std::abs(contrast) < p.contrast_threshold) return std::nullopt;

  const double v = c.at(x, y);
  const double dxx = c.at(x + 1, y) + c.at(x - 1, y) - 2 * v;
  const double dyy = c.at(x, y + 1) + c.at(x, y - 1) - 2 * v;
  const double dxy = 0.25 * (c.at(x + 1, y + 1) - c.at(x - 1, y + 1) - c.at(x + 1, y - 1) + c.at(x - 1, y - 1));
  const double tr = dxx + dyy;
  const double det = dxx * dyy - dxy * dxy;
  const double r = p.edge_threshold;
  if (det <= 0 || tr * tr * r >= (r + 1) * (r + 1) * det) return std::nullopt;
  return Refined{x, y, layer, ox, oy, ol, contrast};
}

std::vector<double> orientations(const FloatImage& g, int x, int y, double sigma_oct) {
  const double sigma_w = 1.5 * sigma_oct;
  const int radius = static_cast<int>(std::lround(3.0 * sigma_w));
  std::array<double, kOrientationBins> hist{};
  const double denom = -1.0 / (2.0 * sigma_w * sigma_w);
  for (int i = -radius; i <= radius; ++i) {
    const int py = y + i;
    if (py <= 0 || py >= g.height - 1) continue;
    for (int j = -radius; j <= radius; ++j) {
      const int px = x + j;
      if (px <= 0 || px >= g.width - 1) continue;
      const double gx = g.at(px + 1, py) - g.at(px - 1, py);
      const double gy = g.at(px, py + 1) - g.at(px, py - 1);
      const double mag = std::hypot(gx, gy);
      if (mag == 0.0) continue;
      double ang = std::atan2(gy, gx);
      if (ang < 0) ang += kTwoPi;
      int bin = static_cast<int>(std::lround(ang * kOrientationBins / kTwoPi));
      bin %= kOrientationBins;
      hist[static_cast<std::size_t>(bin)] += mag * std::exp((i * i + j * j) * denom);
    }
  }
  std::array<double, kOrientationBins> sm{};
  for (int b = 0; b < kOrientationBins; ++b) {
    auto h = [&](int k) { return hist[static_cast<std::size_t>((b + k + kOrientationBins) % kOrientationBins)]; };
    sm[static_cast<std::size_t>(b)] = (h(-2) + h(2)) * (1.0 / 16) + (h(-1) + h(1)) * (4.0 / 16) + h(0) * (6.0 / 16);
  }
  const double peak = *std::max_element(sm.begin(), sm.end());
  std::vector<double> out;
  if (!(peak > 0)) return out;
  for (int b = 0; b < kOrientationBins; ++b) {
    const double l = sm[static_cast<std::size_t>((b + kOrientationBins - 1) % kOrientationBins)];
    const double r = sm[static_cast<std::size_t>((b + 1) % kOrientationBins)];
    const double c = sm[static_cast<std::size_t>(b)];
    if (c > l && c > r && c >= 0.8 * peak) {
      double bin = b + 0.5 * (l - r) / (l - 2 * c + r);
      bin = std::fmod(bin + kOrientationBins, static_cast<double>(kOrientationBins));
      double ang = bin * kTwoPi / kOrientationBins;
      if (ang >= kTwoPi) ang -= kTwoPi;
      out.push_back(ang);
    }
  }
  return out;
}

}  // namespace

Features sift_features(const GrayImage& g, const SiftParams& p, std::size_t max_keypoints, bool describe) {
  if (p.scales_per_octave < 1 || !(p.sigma0 > 0)) throw_error(ErrorCode::invalid_argument, "invalid SIFT parameters");
  if (g.width() < 2 * kBorder + 3 || g.height() < 2 * kBorder + 3) {
    throw_error(ErrorCode::invalid_argument, "degenerate image: too small for SIFT");
  }
  FloatImage base = to_float(g);
  double input_sigma = 0.5;
  double base_scale = 1.0;
  if (p.upsample) {
    base = upsample_bilinear(base);
    input_sigma = 1.0;
    base_scale = 0.5;
  }
  const Pyramid pyr = build_pyramid(base, p, input_sigma);
  const int s = p.scales_per_octave;
  const auto prelim = static_cast<float>(0.5 * p.contrast_threshold);

  struct Candidate {
    KeyPoint kp;
    int octave;
    int layer;
    double ox, oy, sigma_oct;
  };
  std::vector<Candidate> cands;
  for (int o = 0; o < static_cast<int>(pyr.dog.size()); ++o) {
    const auto& dog = pyr.dog[static_cast<std::size_t>(o)];
    const int w = dog[0].width;
    const int h = dog[0].height;
    const double octave_scale = base_scale * std::ldexp(1.0, o);
    for (int layer = 1; layer <= s; ++layer) {
      const auto& img = dog[static_cast<std::size_t>(layer)];
      for (int y = kBorder; y < h - kBorder; ++y) {
        for (int x = kBorder; x < w - kBorder; ++x) {
          const float v = img.at(x, y);
          if (std::abs(v) <= prelim || !is_extremum(dog, layer, x, y, v)) continue;
          const auto r = refine(dog, layer, x, y, p);
          if (!r) continue;
          const double sigma_oct = p.sigma0 * std::pow(2.0, (r->layer + r->ol) / s);
          const auto& gl = pyr.gauss[static_cast<std::size_t>(o)][static_cast<std::size_t>(r->layer)];
          for (double ang : orientations(gl, r->x, r->y, sigma_oct)) {
            Candidate c;
            c.kp.x = static_cast<float>((r->x + r->ox) * octave_scale);
            c.kp.y = static_cast<float>((r->y + r->oy) * octave_scale);
            c.kp.scale = static_cast<float>(sigma_oct * octave_scale);
            c.kp.orientation = static_cast<float>(ang);
            c.kp.response = static_cast<float>(std::abs(r->contrast));
            c.octave = o;
            c.layer = r->layer;
            c.ox = r->x + r->ox;
            c.oy = r->y + r->oy;
            c.sigma_oct = sigma_oct;
            cands.push_back(c);
          }
        }
      }
    }
  }

  std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    if (a.kp.response != b.kp.response) return a.kp.response > b.kp.response;
    if (a.kp.y != b.kp.y) return a.kp.y < b.kp.y;
    if (a.kp.x != b.kp.x) return a.kp.x < b.kp.x;
    return a.kp.orientation < b.kp.orientation;
  });
  if (max_keypoints > 0 && cands.size() > max_keypoints) cands.resize(max_keypoints);

  Features out;
  out.keypoints.reserve(cands.size());
  for (const auto& c : cands) out.keypoints.push_back(c.kp);
  if (describe) {
    out.descriptors.resize(cands.size());
    for (std::size_t i = 0; i < cands.size(); ++i) {
      const auto& c = cands[i];
      const auto& gl = pyr.gauss[static_cast<std::size_t>(c.octave)][static_cast<std::size_t>(c.layer)];
      describe_on_level(gl, c.ox, c.oy, c.sigma_oct, c.kp.orientation, out.descriptors[i].data());
    }
  }
  return out;
}

}  // namespace palim::detail

namespace palim {

std::vector<KeyPoint> sift_detect(const GrayImage& g, const SiftParams& params) {
  return detail::sift_features(g, params, 0, false).keypoints;
}

}  // namespace palim
