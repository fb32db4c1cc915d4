#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace palim {

/// Axis-aligned pixel rectangle; `x`,`y` is the top-left corner.
struct Box {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  int right() const { return x + w; }
  int bottom() const { return y + h; }
  bool empty() const { return w <= 0 || h <= 0; }
  bool contains(int px, int py) const { return px >= x && px < right() && py >= y && py < bottom(); }
  long long area() const { return static_cast<long long>(w) * h; }

  friend bool operator==(const Box&, const Box&) = default;
};

Box unite(const Box& a, const Box& b);
bool intersects(const Box& a, const Box& b);
double iou(const Box& a, const Box& b);

/// 8-bit grayscale raster, row-major. 0 is black ink, 255 is white paper.
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int width, int height, std::uint8_t fill = 255);
  GrayImage(int width, int height, std::vector<std::uint8_t> pixels);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return pixels_.empty(); }

  std::uint8_t at(int x, int y) const { return pixels_[index(x, y)]; }
  std::uint8_t& at(int x, int y) { return pixels_[index(x, y)]; }

  std::span<const std::uint8_t> pixels() const { return pixels_; }
  std::span<std::uint8_t> pixels() { return pixels_; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

/// Bilevel raster, row-major; 1 = ink (foreground), 0 = paper.
///
/// The foreground count is maintained on every write so `count()` is O(1).
class BinaryImage {
 public:
  BinaryImage() = default;
  BinaryImage(int width, int height, bool fill = false);
  BinaryImage(int width, int height, std::vector<std::uint8_t> bits);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return bits_.empty(); }

  bool get(int x, int y) const { return bits_[index(x, y)] != 0; }
  void set(int x, int y, bool v);

  std::size_t count() const { return count_; }
  std::span<const std::uint8_t> bits() const { return bits_; }

  friend bool operator==(const BinaryImage& a, const BinaryImage& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ && a.bits_ == b.bits_;
  }

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
  std::size_t count_ = 0;
};

struct NormalizationParams {
  int target_width = 512;
  int target_height = 512;
  int target_dpi = 300;  // recorded in the index, never used for resampling
};

struct FixedThreshold {
  int value = 128;
};
struct OtsuThreshold {};

/// Binarization rule: ink wherever intensity < threshold.
using ThresholdMethod = std::variant<FixedThreshold, OtsuThreshold>;

/// Otsu threshold over the 256-bin histogram. Constant images return 0.
int otsu_threshold(const GrayImage& img);

BinaryImage binarize(const GrayImage& img, const ThresholdMethod& method = OtsuThreshold{});

/// Pads to the target aspect ratio with white, then bilinear-scales to the
/// target size. Already-normalized images are returned unchanged.
GrayImage normalize(const GrayImage& img, const NormalizationParams& params = {});

BinaryImage invert(const BinaryImage& b);

/// Bilinear resampling with pixel-center alignment.
GrayImage resize_bilinear(const GrayImage& img, int width, int height);

/// Rotates clockwise by 90 degrees: (x, y) -> (H - 1 - y, x).
GrayImage rotate90(const GrayImage& img);

GrayImage crop(const GrayImage& img, const Box& box);
BinaryImage crop(const BinaryImage& img, const Box& box);

/// Places `img` on a `width` x `height` canvas at (`x`, `y`); uncovered pixels are background.
BinaryImage place(const BinaryImage& img, int width, int height, int x, int y);

/// Bounding box of the foreground; empty box when there is none.
Box tight_box(const BinaryImage& b);

/// Renders bits to gray. By default ink is black on white paper; `ink_white`
/// inverts that for displaying difference images.
GrayImage render(const BinaryImage& b, bool ink_white = false);

}  // namespace palim
