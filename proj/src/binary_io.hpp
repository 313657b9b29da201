#pragma once

// Little-endian primitives shared by the matrix and model file formats.

#include "tagsight/error.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>

namespace tagsight::detail {

class BinaryReader {
 public:
  explicit BinaryReader(const std::filesystem::path& path)
      : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw DataError("cannot open " + path.string());
  }

  void bytes(char* dst, std::size_t n) {
    in_.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) {
      throw DataError("truncated file " + path_.string());
    }
  }

  template <std::size_t N>
  std::uint64_t little_endian() {
    std::array<unsigned char, N> b{};
    bytes(reinterpret_cast<char*>(b.data()), N);
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < N; ++i) v |= std::uint64_t{b[i]} << (8 * i);
    return v;
  }

  std::uint8_t u8() { return static_cast<std::uint8_t>(little_endian<1>()); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(little_endian<4>()); }
  std::uint64_t u64() { return little_endian<8>(); }
  double f64() { return std::bit_cast<double>(u64()); }

  bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
};

class BinaryWriter {
 public:
  explicit BinaryWriter(const std::filesystem::path& path)
      : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw DataError("cannot write " + path.string());
  }

  void bytes(const char* src, std::size_t n) { out_.write(src, static_cast<std::streamsize>(n)); }

  template <std::size_t N>
  void little_endian(std::uint64_t v) {
    std::array<char, N> b{};
    for (std::size_t i = 0; i < N; ++i) b[i] = static_cast<char>(v >> (8 * i) & 0xff);
    bytes(b.data(), N);
  }

  void u8(std::uint8_t v) { little_endian<1>(v); }
  void u32(std::uint32_t v) { little_endian<4>(v); }
  void u64(std::uint64_t v) { little_endian<8>(v); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

  void finish() {
    out_.flush();
    if (!out_) throw DataError("failed writing " + path_.string());
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

}  // namespace tagsight::detail
