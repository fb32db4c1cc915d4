#include "palim/image.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "palim/error.hpp"

namespace palim {

namespace {

void check_dims(int width, int height) {
  if (width < 1 || height < 1) {
    throw_error(ErrorCode::invalid_argument,
                "image dimensions must be positive, got " + std::to_string(width) + "x" + std::to_string(height));
  }
}

std::size_t pixel_count(int width, int height) {
  return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
}

}  // namespace

Box unite(const Box& a, const Box& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  const int x0 = std::min(a.x, b.x);
  const int y0 = std::min(a.y, b.y);
  const int x1 = std::max(a.right(), b.right());
  const int y1 = std::max(a.bottom(), b.bottom());
  return {x0, y0, x1 - x0, y1 - y0};
}

bool intersects(const Box& a, const Box& b) {
  return !a.empty() && !b.empty() && a.x < b.right() && b.x < a.right() && a.y < b.bottom() && b.y < a.bottom();
}

double iou(const Box& a, const Box& b) {
  if (!intersects(a, b)) return 0.0;
  const long long ix = std::min(a.right(), b.right()) - std::max(a.x, b.x);
  const long long iy = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
  const double inter = static_cast<double>(ix * iy);
  return inter / (static_cast<double>(a.area() + b.area()) - inter);
}

GrayImage::GrayImage(int width, int height, std::uint8_t fill) : width_(width), height_(height) {
  check_dims(width, height);
  pixels_.assign(pixel_count(width, height), fill);
}

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  check_dims(width, height);
  if (pixels_.size() != pixel_count(width, height)) {
    throw_error(ErrorCode::invalid_argument, "pixel buffer size does not match dimensions");
  }
}

BinaryImage::BinaryImage(int width, int height, bool fill) : width_(width), height_(height) {
  check_dims(width, height);
  bits_.assign(pixel_count(width, height), fill ? 1 : 0);
  count_ = fill ? bits_.size() : 0;
}

BinaryImage::BinaryImage(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
  check_dims(width, height);
  if (bits_.size() != pixel_count(width, height)) {
    throw_error(ErrorCode::invalid_argument, "bit buffer size does not match dimensions");
  }
  count_ = 0;
  for (auto& b : bits_) {
    b = b ? 1 : 0;
    count_ += b;
  }
}

void BinaryImage::set(int x, int y, bool v) {
  auto& cell = bits_[index(x, y)];
  const std::uint8_t nv = v ? 1 : 0;
  if (cell != nv) {
    count_ = nv ? count_ + 1 : count_ - 1;
    cell = nv;
  }
}

int otsu_threshold(const GrayImage& img) {
  std::array<double, 256> hist{};
  for (auto v : img.pixels()) hist[v] += 1.0;
  const double total = static_cast<double>(img.pixels().size());

  double sum_all = 0.0;
  for (int i = 0; i < 256; ++i) sum_all += i * hist[i];

  // Threshold t splits into [0, t) and [t, 255]; ink is the lower class.
  double best = 0.0;
  int best_t = 0;
  double w0 = 0.0;
  double sum0 = 0.0;
  for (int t = 1; t < 256; ++t) {
    w0 += hist[t - 1];
    sum0 += (t - 1) * hist[t - 1];
    const double w1 = total - w0;
    if (w0 == 0.0 || w1 == 0.0) continue;
    const double mu0 = sum0 / w0;
    const double mu1 = (sum_all - sum0) / w1;
    const double between = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
    if (between > best) {
      best = between;
      best_t = t;
    }
  }
  return best_t;
}

BinaryImage binarize(const GrayImage& img, const ThresholdMethod& method) {
  const int t = std::visit(
      [&](const auto& m) -> int {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, FixedThreshold>) {
          return m.value;
        } else {
          return otsu_threshold(img);
        }
      },
      method);
  std::vector<std::uint8_t> bits(img.pixels().size());
  std::transform(img.pixels().begin(), img.pixels().end(), bits.begin(),
                 [t](std::uint8_t v) -> std::uint8_t { return v < t ? 1 : 0; });
  return BinaryImage(img.width(), img.height(), std::move(bits));
}

GrayImage resize_bilinear(const GrayImage& img, int width, int height) {
  check_dims(width, height);
  if (width == img.width() && height == img.height()) return img;

  const double sx = static_cast<double>(img.width()) / width;
  const double sy = static_cast<double>(img.height()) / height;

  struct Tap {
    int i0;
    int i1;
    double f;
  };
  auto taps = [](int dst, double scale, int src_size) {
    std::vector<Tap> out(static_cast<std::size_t>(dst));
    for (int d = 0; d < dst; ++d) {
      double s = (d + 0.5) * scale - 0.5;
      s = std::clamp(s, 0.0, static_cast<double>(src_size - 1));
      const int i0 = static_cast<int>(std::floor(s));
      const int i1 = std::min(i0 + 1, src_size - 1);
      out[static_cast<std::size_t>(d)] = {i0, i1, s - i0};
    }
    return out;
  };
  const auto xt = taps(width, sx, img.width());
  const auto yt = taps(height, sy, img.height());

  GrayImage out(width, height);
  for (int y = 0; y < height; ++y) {
    const auto& ty = yt[static_cast<std::size_t>(y)];
    for (int x = 0; x < width; ++x) {
      const auto& tx = xt[static_cast<std::size_t>(x)];
      const double top = img.at(tx.i0, ty.i0) * (1.0 - tx.f) + img.at(tx.i1, ty.i0) * tx.f;
      const double bot = img.at(tx.i0, ty.i1) * (1.0 - tx.f) + img.at(tx.i1, ty.i1) * tx.f;
      const double v = top * (1.0 - ty.f) + bot * ty.f;
      out.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
    }
  }
  return out;
}

GrayImage normalize(const GrayImage& img, const NormalizationParams& params) {
  if (params.target_width < 8 || params.target_height < 8) {
    throw_error(ErrorCode::invalid_argument, "normalization target dimensions must be >= 8");
  }
  if (img.width() == params.target_width && img.height() == params.target_height) return img;

  // Pad with paper to the target aspect ratio, split evenly (extra pixel right/bottom).
  const long long tw = params.target_width;
  const long long th = params.target_height;
  long long pw = img.width();
  long long ph = img.height();
  if (pw * th > ph * tw) {
    ph = (pw * th + tw / 2) / tw;
  } else if (pw * th < ph * tw) {
    pw = (ph * tw + th / 2) / th;
  }
  GrayImage padded(static_cast<int>(pw), static_cast<int>(ph), 255);
  const int ox = static_cast<int>((pw - img.width()) / 2);
  const int oy = static_cast<int>((ph - img.height()) / 2);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) padded.at(x + ox, y + oy) = img.at(x, y);
  }
  return resize_bilinear(padded, params.target_width, params.target_height);
}

BinaryImage invert(const BinaryImage& b) {
  std::vector<std::uint8_t> bits(b.bits().size());
  std::transform(b.bits().begin(), b.bits().end(), bits.begin(),
                 [](std::uint8_t v) -> std::uint8_t { return v ? 0 : 1; });
  return BinaryImage(b.width(), b.height(), std::move(bits));
}

GrayImage rotate90(const GrayImage& img) {
  GrayImage out(img.height(), img.width());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) out.at(img.height() - 1 - y, x) = img.at(x, y);
  }
  return out;
}

namespace {

void check_crop(const Box& box, int width, int height) {
  if (box.empty() || box.x < 0 || box.y < 0 || box.right() > width || box.bottom() > height) {
    throw_error(ErrorCode::invalid_argument, "crop box outside image bounds");
  }
}

}  // namespace

GrayImage crop(const GrayImage& img, const Box& box) {
  check_crop(box, img.width(), img.height());
  GrayImage out(box.w, box.h);
  for (int y = 0; y < box.h; ++y) {
    for (int x = 0; x < box.w; ++x) out.at(x, y) = img.at(box.x + x, box.y + y);
  }
  return out;
}

BinaryImage crop(const BinaryImage& img, const Box& box) {
  check_crop(box, img.width(), img.height());
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(box.area()));
  auto src = img.bits();
  for (int y = 0; y < box.h; ++y) {
    const auto row = static_cast<std::size_t>(box.y + y) * static_cast<std::size_t>(img.width());
    std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(row + static_cast<std::size_t>(box.x)), box.w,
                bits.begin() + static_cast<std::ptrdiff_t>(y) * box.w);
  }
  return BinaryImage(box.w, box.h, std::move(bits));
}

BinaryImage place(const BinaryImage& img, int width, int height, int x, int y) {
  BinaryImage out(width, height);
  for (int sy = 0; sy < img.height(); ++sy) {
    const int dy = sy + y;
    if (dy < 0 || dy >= height) continue;
    for (int sx = 0; sx < img.width(); ++sx) {
      const int dx = sx + x;
      if (dx < 0 || dx >= width) continue;
      if (img.get(sx, sy)) out.set(dx, dy, true);
    }
  }
  return out;
}

Box tight_box(const BinaryImage& b) {
  if (b.count() == 0) return {};
  int x0 = b.width();
  int y0 = b.height();
  int x1 = -1;
  int y1 = -1;
  for (int y = 0; y < b.height(); ++y) {
    for (int x = 0; x < b.width(); ++x) {
      if (!b.get(x, y)) continue;
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  return {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

GrayImage render(const BinaryImage& b, bool ink_white) {
  const std::uint8_t ink = ink_white ? 255 : 0;
  const std::uint8_t paper = ink_white ? 0 : 255;
  std::vector<std::uint8_t> px(b.bits().size());
  std::transform(b.bits().begin(), b.bits().end(), px.begin(),
                 [&](std::uint8_t v) { return v ? ink : paper; });
  return GrayImage(b.width(), b.height(), std::move(px));
}

}  // namespace palim
