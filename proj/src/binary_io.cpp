#include "lpq/binary_io.hpp"

#include <fstream>
#include <iterator>

#include "lpq/error.hpp"

namespace lpq::bin {

void Reader::need(std::size_t n) {
  if (bytes_.size() - pos_ < n) fail("truncated");
}

void Reader::fail(const std::string& msg) const { throw FormatError(what_ + ": " + msg); }

void Reader::expect_magic(std::string_view m) {
  need(m.size());
  if (std::string_view(bytes_.data() + pos_, m.size()) != m) fail("bad magic, expected " + std::string(m));
  pos_ += m.size();
}

std::uint32_t Reader::u32() {
  need(4);
  std::uint32_t v = 0;
  for (int k = 0; k < 4; ++k)
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + k])) << (8 * k);
  pos_ += 4;
  return v;
}

std::uint64_t Reader::u64() {
  need(8);
  std::uint64_t v = 0;
  for (int k = 0; k < 8; ++k)
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + k])) << (8 * k);
  pos_ += 8;
  return v;
}

std::vector<double> Reader::f64s(std::size_t n) {
  if (n > (bytes_.size() - pos_) / 8) fail("truncated");
  std::vector<double> v(n);
  for (auto& x : v) x = f64();
  return v;
}

std::string Reader::str() {
  const std::uint32_t n = u32();
  need(n);
  std::string s(bytes_.data() + pos_, n);
  pos_ += n;
  return s;
}

void Reader::expect_end() {
  if (!at_end()) fail("trailing bytes");
}

void write_file(const std::filesystem::path& path, const std::vector<char>& bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing " + path.string());
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  write_file(path, std::vector<char>(text.begin(), text.end()));
}

std::vector<char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingArtifact("missing file: " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string read_text(const std::filesystem::path& path) {
  const auto b = read_file(path);
  return {b.begin(), b.end()};
}

}  // namespace lpq::bin
