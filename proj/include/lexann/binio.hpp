#pragma once

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <streambuf>
#include <string>

#include "lexann/errors.hpp"

// Little-endian binary stream helpers shared by the index, projection-model
// and container file formats.

namespace lexann::binio {

class Writer {
public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void bytes(const void* data, std::size_t n) {
    out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
    offset_ += n;
  }

  void u32(std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    bytes(b, 4);
  }

  void u64(std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    bytes(b, 8);
  }

  void f32(float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    u32(bits);
  }

  void f64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    u64(bits);
  }

  /// u32 length prefix followed by the raw bytes.
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }

  std::size_t offset() const noexcept { return offset_; }

private:
  std::ostream& out_;
  std::size_t offset_ = 0;
};

class Reader {
public:
  explicit Reader(std::istream& in, std::size_t base_offset = 0)
      : in_(in), offset_(base_offset) {}

  void bytes(void* data, std::size_t n, const char* what) {
    in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) {
      throw ParseError(std::string("truncated input: expected ") + what +
                           " at byte offset " + std::to_string(offset_),
                       offset_);
    }
    offset_ += n;
  }

  std::uint32_t u32(const char* what) {
    unsigned char b[4];
    bytes(b, 4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
  }

  std::uint64_t u64(const char* what) {
    unsigned char b[8];
    bytes(b, 8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
  }

  float f32(const char* what) {
    std::uint32_t bits = u32(what);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  }

  double f64(const char* what) {
    std::uint64_t bits = u64(what);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }

  std::string str(const char* what) {
    std::uint32_t n = u32(what);
    std::string s(n, '\0');
    if (n > 0) bytes(s.data(), n, what);
    return s;
  }

  std::size_t offset() const noexcept { return offset_; }

private:
  std::istream& in_;
  std::size_t offset_;
};

/// Discards everything written to it but keeps the byte count. Used to
/// compute serialized footprints without touching the filesystem.
class CountingBuf : public std::streambuf {
public:
  std::uint64_t count() const noexcept { return count_; }

protected:
  int_type overflow(int_type ch) override {
    if (ch != traits_type::eof()) ++count_;
    return ch;
  }
  std::streamsize xsputn(const char*, std::streamsize n) override {
    count_ += static_cast<std::uint64_t>(n);
    return n;
  }

private:
  std::uint64_t count_ = 0;
};

}  // namespace lexann::binio
