#ifndef RELIEF_IO_HPP
#define RELIEF_IO_HPP

// Little-endian binary readers/writers shared by the .hfld, .epis and
// checkpoint formats. Serialization is byte-for-byte deterministic, which the
// reproducibility checks rely on (outputs are compared by file hash).

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace relief {

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {
inline bool host_is_little_endian() {
  const std::uint16_t probe = 1;
  unsigned char b;
  std::memcpy(&b, &probe, 1);
  return b == 1;
}
}  // namespace detail

class BinaryWriter {
 public:
  explicit BinaryWriter(const std::string& path)
      : out_(path, std::ios::binary), path_(path) {
    if (!out_) throw DataError("cannot open for writing: " + path);
  }

  void bytes(const void* p, std::size_t n) {
    out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
  }

  void magic(const char tag[4]) { bytes(tag, 4); }

  template <typename T>
  void scalar(T v) {
    static_assert(std::is_arithmetic_v<T>);
    if (!detail::host_is_little_endian()) {
      unsigned char buf[sizeof(T)];
      std::memcpy(buf, &v, sizeof(T));
      for (std::size_t i = 0; i < sizeof(T) / 2; ++i)
        std::swap(buf[i], buf[sizeof(T) - 1 - i]);
      bytes(buf, sizeof(T));
      return;
    }
    bytes(&v, sizeof(T));
  }

  void u32(std::uint32_t v) { scalar(v); }
  void u64(std::uint64_t v) { scalar(v); }
  void f32(float v) { scalar(v); }
  void f64(double v) { scalar(v); }

  void f32_array(const std::vector<float>& v) {
    for (float x : v) f32(x);
  }

  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }

  void close() {
    out_.close();
    if (!out_) throw DataError("write failed: " + path_);
  }

 private:
  std::ofstream out_;
  std::string path_;
};

class BinaryReader {
 public:
  explicit BinaryReader(const std::string& path)
      : in_(path, std::ios::binary), path_(path) {
    if (!in_) throw DataError("cannot open for reading: " + path);
  }

  void bytes(void* p, std::size_t n) {
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (!in_) throw DataError("truncated file: " + path_);
  }

  void expect_magic(const char tag[4]) {
    char got[4];
    bytes(got, 4);
    if (std::memcmp(got, tag, 4) != 0)
      throw DataError("bad magic in " + path_ + " (expected " +
                      std::string(tag, 4) + ")");
  }

  template <typename T>
  T scalar() {
    static_assert(std::is_arithmetic_v<T>);
    unsigned char buf[sizeof(T)];
    bytes(buf, sizeof(T));
    if (!detail::host_is_little_endian())
      for (std::size_t i = 0; i < sizeof(T) / 2; ++i)
        std::swap(buf[i], buf[sizeof(T) - 1 - i]);
    T v;
    std::memcpy(&v, buf, sizeof(T));
    return v;
  }

  std::uint32_t u32() { return scalar<std::uint32_t>(); }
  std::uint64_t u64() { return scalar<std::uint64_t>(); }
  float f32() { return scalar<float>(); }
  double f64() { return scalar<double>(); }

  std::vector<float> f32_array(std::size_t n) {
    std::vector<float> v(n);
    for (auto& x : v) x = f32();
    return v;
  }

  std::string str() {
    const std::uint32_t n = u32();
    std::string s(n, '\0');
    if (n) bytes(s.data(), n);
    return s;
  }

  bool at_eof() {
    return in_.peek() == std::char_traits<char>::eof();
  }

  const std::string& path() const { return path_; }

 private:
  std::ifstream in_;
  std::string path_;
};

inline std::vector<unsigned char> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw DataError("cannot open: " + path);
  const auto size = in.tellg();
  in.seekg(0);
  std::vector<unsigned char> buf(static_cast<std::size_t>(size));
  in.read(reinterpret_cast<char*>(buf.data()), size);
  return buf;
}

// FNV-1a, used for the "same inputs give hash-identical outputs" checks.
inline std::uint64_t fnv1a_hash(const std::vector<unsigned char>& data) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char b : data) {
    h ^= b;
    h *= 0x100000001B3ULL;
  }
  return h;
}

inline std::uint64_t hash_file(const std::string& path) {
  return fnv1a_hash(read_file_bytes(path));
}

}  // namespace relief

#endif  // RELIEF_IO_HPP
