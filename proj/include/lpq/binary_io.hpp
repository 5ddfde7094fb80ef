#pragma once

// Little-endian binary encoding helpers shared by the file formats.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lpq::bin {

class Writer {
 public:
  void magic(std::string_view m) { bytes_.insert(bytes_.end(), m.begin(), m.end()); }
  void u32(std::uint32_t v) {
    for (int k = 0; k < 4; ++k) bytes_.push_back(static_cast<char>((v >> (8 * k)) & 0xffu));
  }
  void u64(std::uint64_t v) {
    for (int k = 0; k < 8; ++k) bytes_.push_back(static_cast<char>((v >> (8 * k)) & 0xffu));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void f64s(std::span<const double> v) {
    for (double x : v) f64(x);
  }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes_.insert(bytes_.end(), s.begin(), s.end());
  }
  const std::vector<char>& bytes() const { return bytes_; }

 private:
  std::vector<char> bytes_;
};

class Reader {
 public:
  Reader(std::vector<char> bytes, std::string what) : bytes_(std::move(bytes)), what_(std::move(what)) {}

  void expect_magic(std::string_view m);
  std::uint32_t u32();
  std::uint64_t u64();
  double f64() { return std::bit_cast<double>(u64()); }
  std::vector<double> f64s(std::size_t n);
  std::string str();
  bool at_end() const { return pos_ == bytes_.size(); }
  void expect_end();
  [[noreturn]] void fail(const std::string& msg) const;

 private:
  void need(std::size_t n);
  std::vector<char> bytes_;
  std::size_t pos_ = 0;
  std::string what_;
};

void write_file(const std::filesystem::path& path, const std::vector<char>& bytes);
void write_text(const std::filesystem::path& path, std::string_view text);
std::vector<char> read_file(const std::filesystem::path& path);
std::string read_text(const std::filesystem::path& path);

}  // namespace lpq::bin
