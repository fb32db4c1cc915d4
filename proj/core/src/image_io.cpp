#include "palim/image_io.hpp"

#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "palim/error.hpp"

#ifdef PALIM_HAVE_PNG
#include <png.h>
#endif

namespace palim {

namespace {

class NetpbmReader {
 public:
  explicit NetpbmReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  // Reads an unsigned decimal header token, skipping whitespace and comments.
  long long token() {
    skip_space();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
      throw_error(ErrorCode::format, "malformed netpbm header");
    }
    long long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_] - '0');
      if (v > (1LL << 31)) throw_error(ErrorCode::format, "netpbm header value too large");
      ++pos_;
    }
    return v;
  }

  // Exactly one whitespace byte separates the header from raster data.
  void raster_separator() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw_error(ErrorCode::format, "malformed netpbm header");
    }
    ++pos_;
  }

  std::span<const std::uint8_t> take(std::size_t n) {
    if (bytes_.size() - pos_ < n) throw_error(ErrorCode::format, "truncated netpbm raster");
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  void seek(std::size_t pos) { pos_ = pos; }

 private:
  void skip_space() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::uint8_t rescale(long long v, long long maxval) {
  if (v > maxval) throw_error(ErrorCode::format, "netpbm sample exceeds maxval");
  if (maxval == 255) return static_cast<std::uint8_t>(v);
  return static_cast<std::uint8_t>((v * 255 + maxval / 2) / maxval);
}

GrayImage decode_netpbm(std::span<const std::uint8_t> bytes) {
  const char kind = static_cast<char>(bytes[1]);
  NetpbmReader in(bytes);
  in.seek(2);
  const long long w = in.token();
  const long long h = in.token();
  const long long maxval = in.token();
  if (w < 1 || h < 1) throw_error(ErrorCode::format, "zero-dimension image");
  if (maxval < 1 || maxval > 255) throw_error(ErrorCode::format, "unsupported format: only 8-bit netpbm is supported");
  const auto n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  std::vector<std::uint8_t> px(n);
  if (kind == '5') {
    in.raster_separator();
    auto raster = in.take(n);
    for (std::size_t i = 0; i < n; ++i) px[i] = rescale(raster[i], maxval);
  } else if (kind == '6') {
    in.raster_separator();
    auto raster = in.take(3 * n);
    for (std::size_t i = 0; i < n; ++i) {
      px[i] = luminance(rescale(raster[3 * i], maxval), rescale(raster[3 * i + 1], maxval),
                        rescale(raster[3 * i + 2], maxval));
    }
  } else {  // P2
    for (std::size_t i = 0; i < n; ++i) px[i] = rescale(in.token(), maxval);
  }
  return GrayImage(static_cast<int>(w), static_cast<int>(h), std::move(px));
}

#ifdef PALIM_HAVE_PNG
GrayImage decode_png(std::span<const std::uint8_t> bytes) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw_error(ErrorCode::format, std::string("unsupported format: ") + image.message);
  }
  if (image.width == 0 || image.height == 0) {
    png_image_free(&image);
    throw_error(ErrorCode::format, "zero-dimension image");
  }
  // Color input is reduced to luminance by libpng; keep our own BT.601 path
  // by asking for RGB when the source has color.
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const std::size_t channels = color ? 3 : 1;
  std::vector<std::uint8_t> raw(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, raw.data(), 0, nullptr)) {
    png_image_free(&image);
    throw_error(ErrorCode::format, std::string("corrupt png: ") + image.message);
  }
  const auto n = static_cast<std::size_t>(image.width) * image.height;
  std::vector<std::uint8_t> px(n);
  for (std::size_t i = 0; i < n; ++i) {
    px[i] = color ? luminance(raw[3 * i], raw[3 * i + 1], raw[3 * i + 2]) : raw[i * channels];
  }
  return GrayImage(static_cast<int>(image.width), static_cast<int>(image.height), std::move(px));
}
#endif

}  // namespace

std::uint8_t luminance(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  // Integer form of 0.299 R + 0.587 G + 0.114 B.
  return static_cast<std::uint8_t>((299 * r + 587 * g + 114 * b + 500) / 1000);
}

bool png_supported() {
#ifdef PALIM_HAVE_PNG
  return true;
#else
  return false;
#endif
}

GrayImage decode_image(std::span<const std::uint8_t> bytes) {
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '6' || bytes[1] == '2')) {
    return decode_netpbm(bytes);
  }
  static constexpr std::uint8_t kPngMagic[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (bytes.size() >= 8 && std::memcmp(bytes.data(), kPngMagic, 8) == 0) {
#ifdef PALIM_HAVE_PNG
    return decode_png(bytes);
#else
    throw_error(ErrorCode::format, "unsupported format: built without PNG support");
#endif
  }
  throw_error(ErrorCode::format, "unsupported format");
}

GrayImage load_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_error(ErrorCode::io, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw_error(ErrorCode::io, "cannot read " + path.string());
  return decode_image(bytes);
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& img) {
  const std::string header = "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.pixels().begin(), img.pixels().end());
  return out;
}

void save_pgm(const std::filesystem::path& path, const GrayImage& img) {
  const auto bytes = encode_pgm(img);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw_error(ErrorCode::io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw_error(ErrorCode::io, "cannot write " + path.string());
}

}  // namespace palim
