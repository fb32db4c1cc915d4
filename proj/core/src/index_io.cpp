#include <bit>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>

#include "palim/error.hpp"
#include "palim/retrieval.hpp"

namespace palim {

namespace {

class Writer {
 public:
  Writer& text(std::string_view s) {
    out_.insert(out_.end(), s.begin(), s.end());
    return *this;
  }
  Writer& num(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return text(std::string_view(buf, static_cast<std::size_t>(r.ptr - buf)));
  }
  Writer& num(long long v) { return text(std::to_string(v)); }
  Writer& num(int v) { return num(static_cast<long long>(v)); }
  Writer& num(std::size_t v) { return text(std::to_string(v)); }
  Writer& sp() { return text(" "); }
  Writer& nl() { return text("\n"); }
  void f32(float v) {
    std::uint32_t bits = std::bit_cast<std::uint32_t>(v);
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

void write_sizes(Writer& w, std::string_view key, const std::vector<int>& sizes) {
  w.text(key);
  if (sizes.empty()) w.text(" default");
  for (int s : sizes) w.sp().num(s);
  w.nl();
}

[[noreturn]] void bad(const std::string& what) { throw_error(ErrorCode::format, "bad index: " + what); }

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::string_view line() {
    if (pos_ >= bytes_.size()) bad("unexpected end of file");
    const auto* begin = reinterpret_cast<const char*>(bytes_.data()) + pos_;
    const auto* nl = static_cast<const char*>(std::memchr(begin, '\n', bytes_.size() - pos_));
    if (!nl) bad("unterminated line");
    const std::string_view out(begin, static_cast<std::size_t>(nl - begin));
    pos_ += out.size() + 1;
    return out;
  }

  std::span<const std::uint8_t> raw(std::size_t n) {
    if (bytes_.size() - pos_ < n + 1) bad("truncated block");
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    if (bytes_[pos_] != '\n') bad("block not newline-terminated");
    ++pos_;
    return out;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::vector<std::string_view> words(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    const auto sp = line.find(' ', i);
    out.push_back(line.substr(i, sp == std::string_view::npos ? std::string_view::npos : sp - i));
    if (sp == std::string_view::npos) break;
    i = sp + 1;
  }
  return out;
}

template <typename T>
T parse_num(std::string_view s) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) bad("malformed number '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> expect(Reader& r, std::string_view key, std::size_t n_values) {
  auto w = words(r.line());
  if (w.empty() || w[0] != key) bad("expected '" + std::string(key) + "'");
  if (n_values != static_cast<std::size_t>(-1) && w.size() != n_values + 1) bad("wrong field count for '" + std::string(key) + "'");
  return w;
}

std::vector<int> read_sizes(Reader& r, std::string_view key) {
  const auto w = expect(r, key, static_cast<std::size_t>(-1));
  std::vector<int> out;
  if (w.size() == 2 && w[1] == "default") return out;
  for (std::size_t i = 1; i < w.size(); ++i) out.push_back(parse_num<int>(w[i]));
  return out;
}

std::string read_string(Reader& r, std::string_view key) {
  const auto w = expect(r, key, 1);
  const auto n = parse_num<std::size_t>(w[1]);
  const auto raw = r.raw(n);
  return std::string(reinterpret_cast<const char*>(raw.data()), raw.size());
}

float read_f32(const std::uint8_t* p) {
  std::uint32_t bits = 0;
  for (int i = 0; i < 4; ++i) bits |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return std::bit_cast<float>(bits);
}

}  // namespace

std::vector<std::uint8_t> serialize_index(const Index& index) {
  const auto& c = index.config;
  Writer w;
  w.text("PALIMIDX ").num(Index::kVersion).nl();
  w.text("norm ").num(c.normalization.target_width).sp().num(c.normalization.target_height).sp()
      .num(c.normalization.target_dpi).nl();
  if (const auto* f = std::get_if<FixedThreshold>(&c.fd.binarization)) {
    w.text("binarize fixed ").num(f->value).nl();
  } else {
    w.text("binarize otsu").nl();
  }
  write_sizes(w, "box_sizes", c.fd.box_sizes);
  write_sizes(w, "dbc_sizes", c.fd.dbc_sizes);
  write_sizes(w, "dilation_radii", c.fd.dilation_radii);
  w.text("fd_enabled");
  for (bool e : c.fd_enabled) w.text(e ? " 1" : " 0");
  w.nl();
  const auto& fp = c.features;
  w.text("detector ").text(to_string(fp.detector)).sp().num(fp.max_keypoints).nl();
  w.text("sift ").num(fp.sift.octaves).sp().num(fp.sift.scales_per_octave).sp().num(fp.sift.sigma0).sp()
      .num(fp.sift.contrast_threshold).sp().num(fp.sift.edge_threshold).sp().num(fp.sift.upsample ? 1 : 0).nl();
  w.text("harris ").num(fp.harris.k).sp().num(fp.harris.sigma).sp().num(fp.harris.threshold).sp()
      .num(fp.harris.nms_radius).nl();
  if (c.pseudowords) {
    const auto& p = *c.pseudowords;
    w.text("pseudoword_params ").num(p.smear.horizontal_gap).sp().num(p.smear.vertical_gap).sp()
        .num(p.smear.min_component_area).sp().num(p.line_gap).sp().num(p.word_gap).nl();
  } else {
    w.text("pseudoword_params none").nl();
  }
  w.text("records ").num(index.records.size()).nl();
  for (const auto& r : index.records) {
    w.text("record ").num(r.id.size()).nl().text(r.id).nl();
    w.text("label ").num(r.label.size()).nl().text(r.label).nl();
    w.text("dims ").num(r.width).sp().num(r.height).nl();
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(r.digest));
    w.text("digest ").text(hex).nl();
    w.text("fd");
    for (double d : r.signature.dimension) w.sp().num(d);
    w.nl().text("fit");
    for (double d : r.signature.fit_r2) w.sp().num(d);
    w.nl();
    w.text("pseudowords ").num(r.pseudowords.size()).nl();
    for (const auto& b : r.pseudowords) w.num(b.x).sp().num(b.y).sp().num(b.w).sp().num(b.h).nl();
    const auto& kps = r.features.keypoints;
    w.text("keypoints ").num(kps.size()).sp().num(kps.size() * 20).nl();
    for (const auto& k : kps) {
      for (float v : {k.x, k.y, k.scale, k.orientation, k.response}) w.f32(v);
    }
    w.nl();
    const auto& ds = r.features.descriptors;
    w.text("descriptors ").num(ds.size()).sp().num(ds.size() * kDescriptorSize * 4).nl();
    for (const auto& d : ds) {
      for (float v : d) w.f32(v);
    }
    w.nl().text("end").nl();
  }
  return w.take();
}

Index parse_index(std::span<const std::uint8_t> bytes) {
  Reader rd(bytes);
  Index index;
  {
    const auto w = words(rd.line());
    if (w.size() != 2 || w[0] != "PALIMIDX") bad("missing PALIMIDX header");
    if (parse_num<int>(w[1]) != Index::kVersion) {
      throw_error(ErrorCode::format, "unsupported index version " + std::string(w[1]));
    }
  }
  auto& c = index.config;
  {
    const auto w = expect(rd, "norm", 3);
    c.normalization = {parse_num<int>(w[1]), parse_num<int>(w[2]), parse_num<int>(w[3])};
  }
  {
    const auto w = expect(rd, "binarize", static_cast<std::size_t>(-1));
    if (w.size() == 2 && w[1] == "otsu") {
      c.fd.binarization = OtsuThreshold{};
    } else if (w.size() == 3 && w[1] == "fixed") {
      c.fd.binarization = FixedThreshold{parse_num<int>(w[2])};
    } else {
      bad("unknown binarization");
    }
  }
  c.fd.box_sizes = read_sizes(rd, "box_sizes");
  c.fd.dbc_sizes = read_sizes(rd, "dbc_sizes");
  c.fd.dilation_radii = read_sizes(rd, "dilation_radii");
  {
    const auto w = expect(rd, "fd_enabled", 4);
    for (std::size_t m = 0; m < 4; ++m) c.fd_enabled[m] = parse_num<int>(w[m + 1]) != 0;
  }
  {
    const auto w = expect(rd, "detector", 2);
    const auto d = parse_detector(w[1]);
    if (!d) bad("unknown detector");
    c.features.detector = *d;
    c.features.max_keypoints = parse_num<std::size_t>(w[2]);
  }
  {
    const auto w = expect(rd, "sift", 6);
    auto& s = c.features.sift;
    s.octaves = parse_num<int>(w[1]);
    s.scales_per_octave = parse_num<int>(w[2]);
    s.sigma0 = parse_num<double>(w[3]);
    s.contrast_threshold = parse_num<double>(w[4]);
    s.edge_threshold = parse_num<double>(w[5]);
    s.upsample = parse_num<int>(w[6]) != 0;
  }
  {
    const auto w = expect(rd, "harris", 4);
    auto& h = c.features.harris;
    h.k = parse_num<double>(w[1]);
    h.sigma = parse_num<double>(w[2]);
    h.threshold = parse_num<double>(w[3]);
    h.nms_radius = parse_num<int>(w[4]);
  }
  {
    const auto w = expect(rd, "pseudoword_params", static_cast<std::size_t>(-1));
    if (w.size() == 6) {
      PageSegmentParams p;
      p.smear.horizontal_gap = parse_num<int>(w[1]);
      p.smear.vertical_gap = parse_num<int>(w[2]);
      p.smear.min_component_area = parse_num<std::size_t>(w[3]);
      p.line_gap = parse_num<int>(w[4]);
      p.word_gap = parse_num<int>(w[5]);
      c.pseudowords = p;
    } else if (!(w.size() == 2 && w[1] == "none")) {
      bad("malformed pseudoword_params");
    }
  }
  const auto n = parse_num<std::size_t>(expect(rd, "records", 1)[1]);
  std::set<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) {
    IndexRecord r;
    r.id = read_string(rd, "record");
    if (!ids.insert(r.id).second) bad("duplicate record id '" + r.id + "'");
    r.label = read_string(rd, "label");
    {
      const auto w = expect(rd, "dims", 2);
      r.width = parse_num<int>(w[1]);
      r.height = parse_num<int>(w[2]);
    }
    {
      const auto w = expect(rd, "digest", 1);
      std::uint64_t v = 0;
      const auto [ptr, ec] = std::from_chars(w[1].data(), w[1].data() + w[1].size(), v, 16);
      if (ec != std::errc{} || ptr != w[1].data() + w[1].size() || w[1].size() != 16) bad("malformed digest");
      r.digest = v;
    }
    {
      const auto w = expect(rd, "fd", 4);
      for (std::size_t m = 0; m < 4; ++m) r.signature.dimension[m] = parse_num<double>(w[m + 1]);
    }
    {
      const auto w = expect(rd, "fit", 4);
      for (std::size_t m = 0; m < 4; ++m) r.signature.fit_r2[m] = parse_num<double>(w[m + 1]);
    }
    const auto npw = parse_num<std::size_t>(expect(rd, "pseudowords", 1)[1]);
    for (std::size_t k = 0; k < npw; ++k) {
      const auto w = words(rd.line());
      if (w.size() != 4) bad("malformed pseudoword box");
      r.pseudowords.push_back({parse_num<int>(w[0]), parse_num<int>(w[1]), parse_num<int>(w[2]), parse_num<int>(w[3])});
    }
    {
      const auto w = expect(rd, "keypoints", 2);
      const auto count = parse_num<std::size_t>(w[1]);
      if (parse_num<std::size_t>(w[2]) != count * 20) bad("keypoint block size mismatch");
      const auto raw = rd.raw(count * 20);
      r.features.keypoints.resize(count);
      for (std::size_t k = 0; k < count; ++k) {
        const std::uint8_t* p = raw.data() + k * 20;
        r.features.keypoints[k] = {read_f32(p), read_f32(p + 4), read_f32(p + 8), read_f32(p + 12), read_f32(p + 16)};
      }
    }
    {
      const auto w = expect(rd, "descriptors", 2);
      const auto count = parse_num<std::size_t>(w[1]);
      if (count != r.features.keypoints.size()) bad("descriptor count differs from keypoint count");
      if (parse_num<std::size_t>(w[2]) != count * kDescriptorSize * 4) bad("descriptor block size mismatch");
      const auto raw = rd.raw(count * kDescriptorSize * 4);
      r.features.descriptors.resize(count);
      for (std::size_t k = 0; k < count; ++k) {
        for (std::size_t j = 0; j < kDescriptorSize; ++j) {
          r.features.descriptors[k][j] = read_f32(raw.data() + (k * kDescriptorSize + j) * 4);
        }
      }
    }
    if (rd.line() != "end") bad("record '" + r.id + "' not terminated");
    index.records.push_back(std::move(r));
  }
  if (!rd.done()) bad("trailing data");
  return index;
}

void save_index(const std::filesystem::path& path, const Index& index) {
  const auto bytes = serialize_index(index);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw_error(ErrorCode::io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw_error(ErrorCode::io, "write failed: " + path.string());
}

Index load_index(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_error(ErrorCode::io, "cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_index(bytes);
}

}  // namespace palim
