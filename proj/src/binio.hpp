#pragma once

// Little-endian binary readers/writers shared by the FBNK/LBLS/BMDL formats.
// Readers track the byte offset so truncation errors can name it.

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "evsel/types.hpp"

namespace evsel::binio {

class Writer {
 public:
  explicit Writer(const std::string& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) raise(ErrorCode::io, "cannot open '" + path + "' for writing");
  }

  void magic(const char (&tag)[5]) { bytes(tag, 4); }
  void u32(std::uint32_t v) { put_le(v); }
  void u64(std::uint64_t v) { put_le(v); }
  void f64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_le(bits);
  }
  void byte(std::uint8_t v) { bytes(reinterpret_cast<const char*>(&v), 1); }
  void bytes(const char* p, std::size_t n) {
    out_.write(p, static_cast<std::streamsize>(n));
    if (!out_) raise(ErrorCode::io, "write failed on '" + path_ + "'");
  }
  void str(const std::string& s) {
    u64(s.size());
    bytes(s.data(), s.size());
  }

  void close() {
    out_.close();
    if (!out_) raise(ErrorCode::io, "flush failed on '" + path_ + "'");
  }

 private:
  template <typename T>
  void put_le(T v) {
    char buf[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    bytes(buf, sizeof(T));
  }

  std::string path_;
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::string& path) : path_(path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) raise(ErrorCode::io, "cannot open '" + path + "' for reading");
    const auto size = in.tellg();
    in.seekg(0);
    buf_.resize(static_cast<std::size_t>(size));
    if (size > 0) in.read(buf_.data(), size);
    if (!in) raise(ErrorCode::io, "read failed on '" + path + "'");
  }

  void magic(const char (&tag)[5]) {
    need(4, "magic");
    if (std::memcmp(buf_.data() + pos_, tag, 4) != 0)
      raise(ErrorCode::format, "'" + path_ + "': bad magic, expected \"" + tag + "\"");
    pos_ += 4;
  }
  std::uint32_t u32() { return get_le<std::uint32_t>("u32"); }
  std::uint64_t u64() { return get_le<std::uint64_t>("u64"); }
  double f64() {
    const std::uint64_t bits = get_le<std::uint64_t>("f64");
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }
  std::uint8_t byte() {
    need(1, "byte");
    return static_cast<std::uint8_t>(buf_[pos_++]);
  }
  std::string str() {
    const std::uint64_t len = u64();
    need(len, "string");
    std::string s(buf_.data() + pos_, len);
    pos_ += len;
    return s;
  }

  std::size_t offset() const { return pos_; }

  void expect_end() {
    if (pos_ != buf_.size())
      raise(ErrorCode::format, "'" + path_ + "': " + std::to_string(buf_.size() - pos_) +
                                   " trailing bytes at offset " + std::to_string(pos_));
  }

 private:
  void need(std::size_t n, const char* what) {
    if (pos_ + n > buf_.size())
      raise(ErrorCode::format, "'" + path_ + "': truncated " + what + " at offset " +
                                   std::to_string(pos_) + " (file size " +
                                   std::to_string(buf_.size()) + ")");
  }

  template <typename T>
  T get_le(const char* what) {
    need(sizeof(T), what);
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
      v |= static_cast<T>(static_cast<std::uint8_t>(buf_[pos_ + i])) << (8 * i);
    pos_ += sizeof(T);
    return v;
  }

  std::string path_;
  std::vector<char> buf_;
  std::size_t pos_ = 0;
};

}  // namespace evsel::binio
