#include "herdgibbs/pgm_image.hpp"

#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace herdgibbs {

namespace {

// Header tokens separated by whitespace; '#' comments run to end of line.
// The terminating whitespace stays in the stream so the binary-payload
// separator byte can be consumed explicitly.
std::string next_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.peek()) != EOF) {
    if (c == '#') {
      if (!tok.empty()) return tok;
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) return tok;
      in.get();
      continue;
    }
    tok.push_back(static_cast<char>(in.get()));
  }
  if (tok.empty()) throw std::runtime_error("pgm: truncated header");
  return tok;
}

std::uint64_t parse_header_uint(std::istream& in, const char* what) {
  const std::string tok = next_token(in);
  for (char ch : tok) {
    if (ch < '0' || ch > '9')
      throw std::runtime_error(std::string("pgm: bad ") + what + " '" + tok + "'");
  }
  return std::stoull(tok);
}

}  // namespace

GrayImage read_pgm(std::istream& in) {
  char m0 = 0, m1 = 0;
  in.get(m0);
  in.get(m1);
  if (!in || m0 != 'P' || (m1 != '2' && m1 != '5'))
    throw std::runtime_error("pgm: bad magic (want P2 or P5)");
  const bool binary = m1 == '5';

  GrayImage img;
  img.width = static_cast<std::uint32_t>(parse_header_uint(in, "width"));
  img.height = static_cast<std::uint32_t>(parse_header_uint(in, "height"));
  const std::uint64_t maxval = parse_header_uint(in, "maxval");
  if (img.width == 0 || img.height == 0)
    throw std::runtime_error("pgm: zero dimension");
  if (maxval == 0 || maxval > 65535)
    throw std::runtime_error("pgm: maxval must lie in [1, 65535]");
  img.maxval = static_cast<std::uint16_t>(maxval);

  const std::size_t count = static_cast<std::size_t>(img.width) * img.height;
  img.pixels.resize(count);

  if (binary) {
    // exactly one whitespace byte separates the header from the payload
    const int sep = in.get();
    if (sep == EOF || !std::isspace(sep))
      throw std::runtime_error("pgm: missing header terminator");
    const bool wide = maxval > 255;
    for (std::size_t k = 0; k < count; ++k) {
      if (wide) {
        const int hi = in.get(), lo = in.get();
        if (hi == EOF || lo == EOF) throw std::runtime_error("pgm: truncated payload");
        img.pixels[k] = static_cast<std::uint16_t>((hi << 8) | lo);  // big-endian
      } else {
        const int v = in.get();
        if (v == EOF) throw std::runtime_error("pgm: truncated payload");
        img.pixels[k] = static_cast<std::uint16_t>(v);
      }
      if (img.pixels[k] > maxval)
        throw std::runtime_error("pgm: pixel value exceeds maxval");
    }
  } else {
    for (std::size_t k = 0; k < count; ++k) {
      std::uint64_t v;
      try {
        v = parse_header_uint(in, "pixel");
      } catch (const std::runtime_error&) {
        throw std::runtime_error("pgm: truncated payload");
      }
      if (v > maxval) throw std::runtime_error("pgm: pixel value exceeds maxval");
      img.pixels[k] = static_cast<std::uint16_t>(v);
    }
  }
  return img;
}

GrayImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("pgm: cannot open '" + path + "'");
  return read_pgm(in);
}

void write_pgm(const GrayImage& image, std::ostream& out) {
  if (image.pixels.size() !=
      static_cast<std::size_t>(image.width) * image.height)
    throw std::runtime_error("pgm: pixel buffer does not match dimensions");
  out << "P5\n" << image.width << " " << image.height << "\n255\n";
  for (std::uint16_t p : image.pixels) {
    std::uint32_t v = p;
    if (image.maxval > 255) v = (v * 255u + image.maxval / 2) / image.maxval;
    out.put(static_cast<char>(v > 255 ? 255 : v));
  }
  if (!out) throw std::runtime_error("pgm: write failed");
}

void write_pgm(const GrayImage& image, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("pgm: cannot open '" + path + "' for writing");
  write_pgm(image, out);
}

std::vector<std::int8_t> binarize(const GrayImage& image, std::uint16_t threshold) {
  std::vector<std::int8_t> spins(image.pixels.size());
  for (std::size_t k = 0; k < image.pixels.size(); ++k)
    spins[k] = image.pixels[k] >= threshold ? 1 : -1;
  return spins;
}

GrayImage spins_to_image(const std::vector<std::int8_t>& spins,
                         std::uint32_t height, std::uint32_t width) {
  if (spins.size() != static_cast<std::size_t>(height) * width)
    throw std::runtime_error("spins_to_image: size mismatch");
  GrayImage img;
  img.height = height;
  img.width = width;
  img.maxval = 255;
  img.pixels.resize(spins.size());
  for (std::size_t k = 0; k < spins.size(); ++k)
    img.pixels[k] = spins[k] > 0 ? 255 : 0;
  return img;
}

}  // namespace herdgibbs
