#ifndef HERDGIBBS_PGM_IMAGE_HPP
#define HERDGIBBS_PGM_IMAGE_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace herdgibbs {

struct GrayImage {
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::uint16_t maxval = 255;
  std::vector<std::uint16_t> pixels;  // row-major

  std::uint16_t at(std::uint32_t r, std::uint32_t c) const {
    return pixels[static_cast<std::size_t>(r) * width + c];
  }
};

// Reads P2 (ASCII) or P5 (binary) PGM with maxval <= 65535. '#' comments are
// allowed between header tokens and between P2 values. Throws
// std::runtime_error on malformed headers or truncated payloads.
GrayImage read_pgm(const std::string& path);
GrayImage read_pgm(std::istream& in);

// Writes binary 8-bit P5. Pixels are scaled down when maxval > 255.
void write_pgm(const GrayImage& image, const std::string& path);
void write_pgm(const GrayImage& image, std::ostream& out);

// Threshold to spins: pixel >= threshold maps to +1, below to -1.
std::vector<std::int8_t> binarize(const GrayImage& image,
                                  std::uint16_t threshold = 128);

// Spins back to an 8-bit image: -1 -> 0, +1 -> 255.
GrayImage spins_to_image(const std::vector<std::int8_t>& spins,
                         std::uint32_t height, std::uint32_t width);

}  // namespace herdgibbs

#endif  // HERDGIBBS_PGM_IMAGE_HPP
