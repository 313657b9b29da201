#include "tagsight/corpus.hpp"
#include "tagsight/error.hpp"

#include "binary_io.hpp"

#include <array>
#include <bit>
#include <limits>

namespace tagsight {
namespace {

constexpr std::array<char, 8> kMagic = {'T', 'S', 'G', 'M', '0', '0', '0', '1'};

using Reader = detail::BinaryReader;
using Writer = detail::BinaryWriter;

FeatureMatrix read_body(Reader& in) {
  std::array<char, 8> magic{};
  in.bytes(magic.data(), magic.size());
  if (magic != kMagic) throw DataError("bad magic in matrix file " + in.path().string());
  const std::uint32_t n = in.u32();
  const std::uint32_t d = in.u32();
  FeatureMatrix m(n, d);
  const std::size_t count = std::size_t{n} * d;
  std::vector<unsigned char> raw(count * 4);
  in.bytes(reinterpret_cast<char*>(raw.data()), raw.size());
  float* out = m.data();
  for (std::size_t i = 0; i < count; ++i) {
    const unsigned char* b = raw.data() + 4 * i;
    const std::uint32_t bits = std::uint32_t{b[0]} | std::uint32_t{b[1]} << 8 |
                               std::uint32_t{b[2]} << 16 | std::uint32_t{b[3]} << 24;
    out[i] = std::bit_cast<float>(bits);
  }
  return m;
}

void write_body(Writer& out, const FeatureMatrix& m) {
  if (m.rows() > std::numeric_limits<std::uint32_t>::max() ||
      m.cols() > std::numeric_limits<std::uint32_t>::max()) {
    throw ValidationError("matrix too large for the TSGM format");
  }
  out.bytes(kMagic.data(), kMagic.size());
  out.u32(static_cast<std::uint32_t>(m.rows()));
  out.u32(static_cast<std::uint32_t>(m.cols()));
  const std::size_t count = static_cast<std::size_t>(m.size());
  std::vector<char> raw(count * 4);
  const float* src = m.data();
  for (std::size_t i = 0; i < count; ++i) {
    const auto bits = std::bit_cast<std::uint32_t>(src[i]);
    raw[4 * i] = static_cast<char>(bits & 0xff);
    raw[4 * i + 1] = static_cast<char>(bits >> 8 & 0xff);
    raw[4 * i + 2] = static_cast<char>(bits >> 16 & 0xff);
    raw[4 * i + 3] = static_cast<char>(bits >> 24 & 0xff);
  }
  out.bytes(raw.data(), raw.size());
}

}  // namespace

FeatureMatrix read_matrix(const std::filesystem::path& path) {
  Reader in(path);
  FeatureMatrix m = read_body(in);
  if (!in.at_end()) throw DataError("trailing bytes in " + path.string());
  return m;
}

PosteriorMatrix read_posteriors(const std::filesystem::path& path) {
  Reader in(path);
  PosteriorMatrix p;
  p.probs = read_body(in);
  const std::uint32_t count = in.u32();
  if (count != p.probs.cols()) {
    throw DataError("class table in " + path.string() + " has " + std::to_string(count) +
                    " entries for " + std::to_string(p.probs.cols()) + " columns");
  }
  p.class_names.reserve(count);
  p.class_roles.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint32_t len = in.u32();
    std::string name(len, '\0');
    in.bytes(name.data(), len);
    const std::uint8_t role = in.u8();
    if (role > static_cast<std::uint8_t>(ClassRole::container)) {
      throw DataError("unknown class role byte " + std::to_string(role) + " in " + path.string());
    }
    p.class_names.push_back(std::move(name));
    p.class_roles.push_back(static_cast<ClassRole>(role));
  }
  if (!in.at_end()) throw DataError("trailing bytes in " + path.string());
  return p;
}

void write_matrix(const std::filesystem::path& path, const FeatureMatrix& m) {
  Writer out(path);
  write_body(out, m);
  out.finish();
}

void write_posteriors(const std::filesystem::path& path, const PosteriorMatrix& p) {
  if (p.class_names.size() != static_cast<std::size_t>(p.probs.cols()) ||
      p.class_roles.size() != p.class_names.size()) {
    throw ValidationError("posterior class table does not match the matrix width");
  }
  Writer out(path);
  write_body(out, p.probs);
  out.u32(static_cast<std::uint32_t>(p.class_names.size()));
  for (std::size_t i = 0; i < p.class_names.size(); ++i) {
    out.u32(static_cast<std::uint32_t>(p.class_names[i].size()));
    out.bytes(p.class_names[i].data(), p.class_names[i].size());
    out.u8(static_cast<std::uint8_t>(p.class_roles[i]));
  }
  out.finish();
}

}  // namespace tagsight
