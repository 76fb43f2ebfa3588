#ifndef RELIEF_PGM_HPP
#define RELIEF_PGM_HPP

// 16-bit binary PGM (P5, maxval 65535, big-endian samples per the netpbm
// spec). Used for terrain previews and range/depth image inspection.

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace relief {

inline void write_pgm16(const std::string& path, int width, int height,
                        const std::vector<std::uint16_t>& pixels) {
  if (static_cast<std::size_t>(width) * height != pixels.size())
    throw std::invalid_argument("write_pgm16: size mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "P5\n" << width << " " << height << "\n65535\n";
  for (std::uint16_t v : pixels) {
    const unsigned char hi = static_cast<unsigned char>(v >> 8);
    const unsigned char lo = static_cast<unsigned char>(v & 0xFF);
    out.put(static_cast<char>(hi));
    out.put(static_cast<char>(lo));
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

// Maps values linearly from [lo, hi] to [min_code, 65535]; NaN-free input
// assumed. min_code > 0 leaves 0 available as an "invalid" code.
inline std::vector<std::uint16_t> quantize16(const std::vector<float>& values,
                                             float lo, float hi,
                                             std::uint16_t min_code = 0) {
  std::vector<std::uint16_t> out(values.size(), 0);
  const float span = hi > lo ? hi - lo : 1.0f;
  for (std::size_t i = 0; i < values.size(); ++i) {
    float t = (values[i] - lo) / span;
    t = t < 0.0f ? 0.0f : (t > 1.0f ? 1.0f : t);
    out[i] = static_cast<std::uint16_t>(min_code +
                                        t * float(65535 - min_code) + 0.5f);
  }
  return out;
}

}  // namespace relief

#endif  // RELIEF_PGM_HPP
