#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "palim/image.hpp"

namespace palim {

enum class FdMethod { box = 0, dbc = 1, cdb = 2, dilation = 3 };

inline constexpr std::array<FdMethod, 4> kAllFdMethods = {FdMethod::box, FdMethod::dbc, FdMethod::cdb,
                                                          FdMethod::dilation};

std::string_view to_string(FdMethod m);
std::optional<FdMethod> parse_fd_method(std::string_view name);

/// One point of a scaling law: box side (or dilation radius) and the measured
/// count/area at that scale.
struct ScaleSample {
  int size = 0;
  double measure = 0.0;
};

struct FdEstimate {
  double dimension = 0.0;
  double fit_r2 = 0.0;  // coefficient of determination of the log-log fit
  std::vector<ScaleSample> samples;
  FdMethod method = FdMethod::box;
};

/// Per-method dimensions of one page, indexed by FdMethod.
struct FdSignature {
  std::array<double, 4> dimension{};
  std::array<double, 4> fit_r2{};

  double operator[](FdMethod m) const { return dimension[static_cast<std::size_t>(m)]; }
  double& operator[](FdMethod m) { return dimension[static_cast<std::size_t>(m)]; }

  friend bool operator==(const FdSignature&, const FdSignature&) = default;
};

struct FdConfig {
  ThresholdMethod binarization = OtsuThreshold{};
  std::vector<int> box_sizes;        // empty: default_box_sizes
  std::vector<int> dbc_sizes;        // empty: default_dbc_sizes
  std::vector<int> dilation_radii;   // empty: default_dilation_radii
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 1.0;
};

/// Ordinary least squares y = slope * x + intercept. Needs >= 2 points with
/// distinct x. r2 is 1 when y has no variance.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Powers of 3 up to side/3 when min(w, h) is a power of 3, else powers of 2 up to side/4.
std::vector<int> default_box_sizes(int width, int height);
/// The box sizes without the unit scale, where every DBC column is a single pixel.
std::vector<int> default_dbc_sizes(int width, int height);
/// Powers of 2 from 1 while <= min(w, h) / 4, at most 16.
std::vector<int> default_dilation_radii(int width, int height);

/// Occupied r x r cells of a grid anchored at the origin; partial edge cells count.
std::vector<ScaleSample> box_count(const BinaryImage& b, std::span<const int> sizes);

/// Slope of log N(r) against log(1/r).
FdEstimate fd_box_counting(const BinaryImage& b, std::span<const int> sizes);

/// Differential box counting on the intensity surface: per s x s column with
/// box height h = s * 256 / min(W, H), n = ceil(max/h) - ceil(min/h) + 1.
FdEstimate fd_differential_box_counting(const GrayImage& g, std::span<const int> sizes);

/// Counting density per box: each occupied cell holding n pixels weighs ceil(n / r).
FdEstimate fd_cdb(const BinaryImage& b, std::span<const int> sizes);

/// Minkowski-Bouligand estimate: D = 2 - d log A(eps) / d log eps, where A is
/// the area within Euclidean distance eps of the foreground.
FdEstimate fd_dilation(const BinaryImage& b, std::span<const int> radii);

/// Binarizes per `config` and runs all four estimators.
FdSignature fd_signature(const GrayImage& g, const FdConfig& config = {});

/// Same, with the binary page supplied by the caller (DBC still uses `g`).
FdSignature fd_signature(const GrayImage& g, const BinaryImage& b, const FdConfig& config = {});

}  // namespace palim
