#include "palim/fractal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "palim/distance.hpp"
#include "palim/error.hpp"

namespace palim {

std::string_view to_string(FdMethod m) {
  switch (m) {
    case FdMethod::box:
      return "box";
    case FdMethod::dbc:
      return "dbc";
    case FdMethod::cdb:
      return "cdb";
    case FdMethod::dilation:
      return "dilation";
  }
  return "?";
}

std::optional<FdMethod> parse_fd_method(std::string_view name) {
  for (auto m : kAllFdMethods) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw_error(ErrorCode::invalid_argument, "fewer than 2 scales");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw_error(ErrorCode::invalid_argument, "scales must be distinct");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (syy > 0.0) {
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - (fit.slope * x[i] + fit.intercept);
      ss_res += r * r;
    }
    fit.r2 = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  }
  return fit;
}

namespace {

bool is_power_of(int v, int base) {
  if (v < 1) return false;
  while (v % base == 0) v /= base;
  return v == 1;
}

void check_sizes(std::span<const int> sizes, int limit, const char* what) {
  if (sizes.size() < 2) throw_error(ErrorCode::invalid_argument, "fewer than 2 scales");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 1 || sizes[i] > limit) {
      throw_error(ErrorCode::invalid_argument,
                  std::string("invalid ") + what + " " + std::to_string(sizes[i]) + " (limit " +
                      std::to_string(limit) + ")");
    }
    if (i > 0 && sizes[i] <= sizes[i - 1]) {
      throw_error(ErrorCode::invalid_argument, std::string(what) + "s must be strictly increasing");
    }
  }
}

void check_nonempty(const BinaryImage& b) {
  if (b.empty() || b.count() == 0) throw_error(ErrorCode::domain, "no foreground");
}

// Foreground pixels per r x r cell, row-major over ceil(W/r) x ceil(H/r) cells.
std::vector<std::uint32_t> cell_counts(const BinaryImage& b, int r) {
  const int nx = (b.width() + r - 1) / r;
  const int ny = (b.height() + r - 1) / r;
  std::vector<std::uint32_t> counts(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny), 0);
  std::vector<int> cx(static_cast<std::size_t>(b.width()));
  for (int x = 0; x < b.width(); ++x) cx[static_cast<std::size_t>(x)] = x / r;
  auto bits = b.bits();
  for (int y = 0; y < b.height(); ++y) {
    auto* row_counts = counts.data() + static_cast<std::size_t>(y / r) * static_cast<std::size_t>(nx);
    const auto* row = bits.data() + static_cast<std::size_t>(y) * static_cast<std::size_t>(b.width());
    for (int x = 0; x < b.width(); ++x) {
      if (row[x]) ++row_counts[cx[static_cast<std::size_t>(x)]];
    }
  }
  return counts;
}

// Slope of log(measure) against log(1/size).
FdEstimate estimate_from_samples(std::vector<ScaleSample> samples, FdMethod method) {
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& s : samples) {
    x.push_back(-std::log(static_cast<double>(s.size)));
    y.push_back(std::log(s.measure));
  }
  const auto fit = fit_line(x, y);
  return {fit.slope, fit.r2, std::move(samples), method};
}

}  // namespace

std::vector<int> default_box_sizes(int width, int height) {
  const int side = std::min(width, height);
  std::vector<int> sizes;
  if (side >= 9 && is_power_of(side, 3)) {
    for (int r = 1; r <= side / 3; r *= 3) sizes.push_back(r);
  } else {
    for (int r = 1; r <= side / 4; r *= 2) sizes.push_back(r);
  }
  return sizes;
}

std::vector<int> default_dbc_sizes(int width, int height) {
  auto sizes = default_box_sizes(width, height);
  if (!sizes.empty() && sizes.front() == 1) sizes.erase(sizes.begin());
  return sizes;
}

std::vector<int> default_dilation_radii(int width, int height) {
  const int side = std::min(width, height);
  std::vector<int> radii;
  for (int r = 1; r <= side / 4 && r <= 16; r *= 2) radii.push_back(r);
  return radii;
}

std::vector<ScaleSample> box_count(const BinaryImage& b, std::span<const int> sizes) {
  check_nonempty(b);
  if (sizes.empty()) throw_error(ErrorCode::invalid_argument, "no box sizes given");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 1 || sizes[i] > std::min(b.width(), b.height())) {
      throw_error(ErrorCode::invalid_argument, "invalid box size " + std::to_string(sizes[i]));
    }
    if (i > 0 && sizes[i] <= sizes[i - 1]) {
      throw_error(ErrorCode::invalid_argument, "box sizes must be strictly increasing");
    }
  }
  std::vector<ScaleSample> out;
  for (int r : sizes) {
    const auto counts = cell_counts(b, r);
    const auto occupied = std::count_if(counts.begin(), counts.end(), [](std::uint32_t c) { return c > 0; });
    out.push_back({r, static_cast<double>(occupied)});
  }
  return out;
}

FdEstimate fd_box_counting(const BinaryImage& b, std::span<const int> sizes) {
  check_nonempty(b);
  check_sizes(sizes, std::min(b.width(), b.height()), "box size");
  return estimate_from_samples(box_count(b, sizes), FdMethod::box);
}

FdEstimate fd_cdb(const BinaryImage& b, std::span<const int> sizes) {
  check_nonempty(b);
  check_sizes(sizes, std::min(b.width(), b.height()), "box size");
  std::vector<ScaleSample> samples;
  for (int r : sizes) {
    const auto counts = cell_counts(b, r);
    double total = 0.0;
    for (auto n : counts) {
      if (n > 0) total += static_cast<double>((n + static_cast<std::uint32_t>(r) - 1) / static_cast<std::uint32_t>(r));
    }
    samples.push_back({r, total});
  }
  return estimate_from_samples(std::move(samples), FdMethod::cdb);
}

FdEstimate fd_differential_box_counting(const GrayImage& g, std::span<const int> sizes) {
  if (g.empty()) throw_error(ErrorCode::invalid_argument, "empty image");
  const int side = std::min(g.width(), g.height());
  check_sizes(sizes, side, "box size");
  std::vector<ScaleSample> samples;
  for (int s : sizes) {
    const int nx = (g.width() + s - 1) / s;
    const int ny = (g.height() + s - 1) / s;
    std::vector<std::uint8_t> lo(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny), 255);
    std::vector<std::uint8_t> hi(lo.size(), 0);
    for (int y = 0; y < g.height(); ++y) {
      const auto base = static_cast<std::size_t>(y / s) * static_cast<std::size_t>(nx);
      for (int x = 0; x < g.width(); ++x) {
        const auto c = base + static_cast<std::size_t>(x / s);
        const auto v = g.at(x, y);
        lo[c] = std::min(lo[c], v);
        hi[c] = std::max(hi[c], v);
      }
    }
    const double h = static_cast<double>(s) * 256.0 / side;
    double total = 0.0;
    for (std::size_t c = 0; c < lo.size(); ++c) {
      total += std::ceil(hi[c] / h) - std::ceil(lo[c] / h) + 1.0;
    }
    samples.push_back({s, total});
  }
  return estimate_from_samples(std::move(samples), FdMethod::dbc);
}

FdEstimate fd_dilation(const BinaryImage& b, std::span<const int> radii) {
  check_nonempty(b);
  if (radii.size() < 2) throw_error(ErrorCode::invalid_argument, "fewer than 2 scales");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (radii[i] < 1) throw_error(ErrorCode::invalid_argument, "dilation radii must be >= 1");
    if (i > 0 && radii[i] <= radii[i - 1]) {
      throw_error(ErrorCode::invalid_argument, "dilation radii must be strictly increasing");
    }
  }
  const auto dist = edm(b);
  // Area histogram by squared distance, then cumulative counts per radius.
  std::vector<ScaleSample> samples;
  std::vector<double> x;
  std::vector<double> y;
  for (int r : radii) {
    const auto r2 = static_cast<std::uint32_t>(r) * static_cast<std::uint32_t>(r);
    const auto area = std::count_if(dist.sqdist.begin(), dist.sqdist.end(), [r2](std::uint32_t d) { return d <= r2; });
    samples.push_back({r, static_cast<double>(area)});
    x.push_back(std::log(static_cast<double>(r)));
    y.push_back(std::log(static_cast<double>(area)));
  }
  const auto fit = fit_line(x, y);
  return {2.0 - fit.slope, fit.r2, std::move(samples), FdMethod::dilation};
}

FdSignature fd_signature(const GrayImage& g, const FdConfig& config) {
  return fd_signature(g, binarize(g, config.binarization), config);
}

FdSignature fd_signature(const GrayImage& g, const BinaryImage& b, const FdConfig& config) {
  check_nonempty(b);
  const auto box_sizes = config.box_sizes.empty() ? default_box_sizes(b.width(), b.height()) : config.box_sizes;
  const auto dbc_sizes = config.dbc_sizes.empty() ? default_dbc_sizes(g.width(), g.height()) : config.dbc_sizes;
  const auto radii =
      config.dilation_radii.empty() ? default_dilation_radii(b.width(), b.height()) : config.dilation_radii;

  FdSignature sig;
  auto put = [&sig](const FdEstimate& e) {
    sig.dimension[static_cast<std::size_t>(e.method)] = e.dimension;
    sig.fit_r2[static_cast<std::size_t>(e.method)] = e.fit_r2;
  };
  put(fd_box_counting(b, box_sizes));
  put(fd_differential_box_counting(g, dbc_sizes));
  put(fd_cdb(b, box_sizes));
  put(fd_dilation(b, radii));
  return sig;
}

}  // namespace palim
