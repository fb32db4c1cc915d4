#include "palim/pixelmatch.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "palim/error.hpp"

namespace palim {

namespace {

void check_same_dims(const BinaryImage& a, const BinaryImage& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw_error(ErrorCode::invalid_argument, "dimension mismatch: " + std::to_string(a.width()) + "x" +
                                                 std::to_string(a.height()) + " vs " + std::to_string(b.width()) +
                                                 "x" + std::to_string(b.height()));
  }
}

}  // namespace

BinaryImage xor_diff(const BinaryImage& a, const BinaryImage& b) {
  check_same_dims(a, b);
  std::vector<std::uint8_t> bits(a.bits().size());
  auto pa = a.bits();
  auto pb = b.bits();
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = pa[i] ^ pb[i];
  return BinaryImage(a.width(), a.height(), std::move(bits));
}

ErrorReport edm_error(const BinaryImage& query, const BinaryImage& reference) {
  check_same_dims(query, reference);
  ErrorReport report;
  const double diagonal = std::hypot(static_cast<double>(query.width()), static_cast<double>(query.height()));

  const auto to_reference = edm(reference);
  const auto to_query = edm(query);
  auto q = query.bits();
  auto r = reference.bits();
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] == r[i]) continue;
    // Spurious ink is measured against the reference, missing ink against the query.
    const auto& map = q[i] ? to_reference : to_query;
    const auto sq = map.sqdist[i];
    const double d = sq == DistanceMap::kInfinite ? diagonal : std::sqrt(static_cast<double>(sq));
    ++report.error_pixel_count;
    report.sum_distance += d;
    report.max_distance = std::max(report.max_distance, d);
    const auto bucket = std::min(static_cast<std::size_t>(d), ErrorReport::kHistogramBuckets - 1);
    ++report.histogram[bucket];
    report.pixel_distances.push_back(static_cast<float>(d));
  }
  if (report.error_pixel_count > 0) {
    report.mean_distance = report.sum_distance / static_cast<double>(report.error_pixel_count);
  }
  report.scalar = report.sum_distance / static_cast<double>(std::max<std::size_t>(1, reference.count()));
  return report;
}

std::string to_key_values(const ErrorReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << "error_pixel_count=" << report.error_pixel_count << '\n';
  out << "sum_distance=" << report.sum_distance << '\n';
  out << "mean_distance=" << report.mean_distance << '\n';
  out << "max_distance=" << report.max_distance << '\n';
  out << "scalar=" << report.scalar << '\n';
  out << "histogram=";
  for (std::size_t i = 0; i < report.histogram.size(); ++i) {
    if (i) out << ',';
    out << report.histogram[i];
  }
  out << '\n';
  return out.str();
}

Profile vertical_profile(const BinaryImage& b) {
  Profile p;
  p.height = b.height();
  p.columns.assign(static_cast<std::size_t>(b.width()), 0);
  for (int y = 0; y < b.height(); ++y) {
    for (int x = 0; x < b.width(); ++x) p.columns[static_cast<std::size_t>(x)] += b.get(x, y) ? 1 : 0;
  }
  return p;
}

std::vector<double> resample_profile(const std::vector<double>& values, std::size_t length) {
  if (values.empty() || length == 0) throw_error(ErrorCode::invalid_argument, "zero-length profile");
  if (values.size() == length) return values;
  const double n = static_cast<double>(values.size());
  const double step = n / static_cast<double>(length);
  std::vector<double> out(length, 0.0);
  for (std::size_t i = 0; i < length; ++i) {
    const double a = static_cast<double>(i) * step;
    const double b = a + step;
    double acc = 0.0;
    auto j = static_cast<std::size_t>(a);
    for (; j < values.size() && static_cast<double>(j) < b; ++j) {
      const double lo = std::max(a, static_cast<double>(j));
      const double hi = std::min(b, static_cast<double>(j + 1));
      if (hi > lo) acc += values[j] * (hi - lo);
    }
    out[i] = acc / step;
  }
  return out;
}

double profile_distance(const Profile& p, const Profile& q) {
  if (p.columns.empty() || q.columns.empty() || p.height < 1 || q.height < 1) {
    throw_error(ErrorCode::invalid_argument, "zero-length profile");
  }
  auto normalized = [](const Profile& pr) {
    std::vector<double> v(pr.columns.size());
    std::transform(pr.columns.begin(), pr.columns.end(), v.begin(),
                   [&](int c) { return static_cast<double>(c) / pr.height; });
    return v;
  };
  const auto length = std::max(p.columns.size(), q.columns.size());
  const auto a = resample_profile(normalized(p), length);
  const auto b = resample_profile(normalized(q), length);
  double sum = 0.0;
  for (std::size_t i = 0; i < length; ++i) sum += std::abs(a[i] - b[i]);
  return sum / static_cast<double>(length);
}

std::pair<BinaryImage, BinaryImage> align_pair(const BinaryImage& a, const BinaryImage& b) {
  auto tight = [](const BinaryImage& img) {
    const auto box = tight_box(img);
    return box.empty() ? BinaryImage(1, 1) : crop(img, box);
  };
  const auto ta = tight(a);
  const auto tb = tight(b);
  const int w = std::max(ta.width(), tb.width());
  const int h = std::max(ta.height(), tb.height());
  return {place(ta, w, h, (w - ta.width()) / 2, (h - ta.height()) / 2),
          place(tb, w, h, (w - tb.width()) / 2, (h - tb.height()) / 2)};
}

}  // namespace palim
