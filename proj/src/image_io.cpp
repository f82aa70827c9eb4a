#include "uwdiff/image_io.hpp"

#include <zlib.h>

#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace uwdiff {

namespace {

constexpr std::array<unsigned char, 8> kPngSignature = {0x89, 'P', 'N', 'G',
                                                        '\r', '\n', 0x1a, '\n'};

std::vector<unsigned char> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open file: " + path);
  }
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  return bytes;
}

void write_file(const std::string& path, const std::vector<unsigned char>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open file for writing: " + path);
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw std::runtime_error("short write: " + path);
  }
}

std::uint32_t read_be32(const unsigned char* p) {
  return (static_cast<std::uint32_t>(p[0]) << 24) |
         (static_cast<std::uint32_t>(p[1]) << 16) |
         (static_cast<std::uint32_t>(p[2]) << 8) |
         static_cast<std::uint32_t>(p[3]);
}

void push_be32(std::vector<unsigned char>& out, std::uint32_t v) {
  out.push_back(static_cast<unsigned char>((v >> 24) & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 16) & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
  out.push_back(static_cast<unsigned char>(v & 0xff));
}

int paeth(int a, int b, int c) {
  const int p = a + b - c;
  const int pa = std::abs(p - a);
  const int pb = std::abs(p - b);
  const int pc = std::abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  if (pb <= pc) return b;
  return c;
}

std::vector<unsigned char> zlib_inflate(const unsigned char* data,
                                        std::size_t length,
                                        std::size_t expected,
                                        const std::string& path) {
  std::vector<unsigned char> out(expected);
  uLongf out_len = static_cast<uLongf>(expected);
  const int rc = uncompress(out.data(), &out_len, data,
                            static_cast<uLong>(length));
  if (rc != Z_OK || out_len != expected) {
    throw std::runtime_error("truncated or corrupt PNG pixel data: " + path);
  }
  return out;
}

std::vector<unsigned char> zlib_deflate(const std::vector<unsigned char>& in) {
  uLongf bound = compressBound(static_cast<uLong>(in.size()));
  std::vector<unsigned char> out(bound);
  const int rc = compress2(out.data(), &bound, in.data(),
                           static_cast<uLong>(in.size()), Z_DEFAULT_COMPRESSION);
  if (rc != Z_OK) {
    throw std::runtime_error("deflate failed");
  }
  out.resize(bound);
  return out;
}

Image decode_png(const std::vector<unsigned char>& bytes,
                 const std::string& path) {
  std::size_t pos = kPngSignature.size();
  bool saw_ihdr = false;
  std::uint32_t width = 0, height = 0;
  int channels = 0;
  std::vector<unsigned char> idat;

  while (pos + 8 <= bytes.size()) {
    const std::uint32_t len = read_be32(&bytes[pos]);
    if (pos + 12 + len > bytes.size()) {
      throw std::runtime_error("truncated PNG chunk: " + path);
    }
    const char* type = reinterpret_cast<const char*>(&bytes[pos + 4]);
    const unsigned char* payload = &bytes[pos + 8];
    const std::uint32_t stored_crc = read_be32(&bytes[pos + 8 + len]);
    const std::uint32_t crc = static_cast<std::uint32_t>(
        crc32(crc32(0L, Z_NULL, 0), &bytes[pos + 4], len + 4));
    if (crc != stored_crc) {
      throw std::runtime_error("PNG chunk CRC mismatch: " + path);
    }

    if (std::memcmp(type, "IHDR", 4) == 0) {
      if (len != 13) throw std::runtime_error("bad IHDR length: " + path);
      width = read_be32(payload);
      height = read_be32(payload + 4);
      const int bit_depth = payload[8];
      const int color_type = payload[9];
      const int interlace = payload[12];
      if (bit_depth != 8) {
        throw std::runtime_error("unsupported PNG bit depth (want 8): " + path);
      }
      if (color_type == 0) {
        channels = 1;
      } else if (color_type == 2) {
        channels = 3;
      } else {
        throw std::runtime_error(
            "unsupported PNG color type (want gray or RGB): " + path);
      }
      if (interlace != 0) {
        throw std::runtime_error("unsupported interlaced PNG: " + path);
      }
      saw_ihdr = true;
    } else if (std::memcmp(type, "IDAT", 4) == 0) {
      idat.insert(idat.end(), payload, payload + len);
    } else if (std::memcmp(type, "IEND", 4) == 0) {
      break;
    }
    pos += 12 + len;
  }

  if (!saw_ihdr || width == 0 || height == 0) {
    throw std::runtime_error("PNG missing image header: " + path);
  }
  if (idat.empty()) {
    throw std::runtime_error("PNG missing pixel data: " + path);
  }

  const std::size_t row_bytes = static_cast<std::size_t>(width) * channels;
  const std::size_t raw_size = (row_bytes + 1) * height;
  std::vector<unsigned char> raw =
      zlib_inflate(idat.data(), idat.size(), raw_size, path);

  // Undo per-scanline filters (None/Sub/Up/Average/Paeth).
  const int bpp = channels;
  std::vector<unsigned char> prev(row_bytes, 0);
  Image img(static_cast<int>(height), static_cast<int>(width), channels,
            Domain::Display01);
  std::vector<unsigned char> cur(row_bytes);
  for (std::uint32_t y = 0; y < height; ++y) {
    const unsigned char* src = &raw[(row_bytes + 1) * y];
    const int filter = src[0];
    const unsigned char* s = src + 1;
    for (std::size_t i = 0; i < row_bytes; ++i) {
      const int left = i >= static_cast<std::size_t>(bpp) ? cur[i - bpp] : 0;
      const int up = prev[i];
      const int ul = i >= static_cast<std::size_t>(bpp) ? prev[i - bpp] : 0;
      int v = s[i];
      switch (filter) {
        case 0: break;
        case 1: v += left; break;
        case 2: v += up; break;
        case 3: v += (left + up) / 2; break;
        case 4: v += paeth(left, up, ul); break;
        default:
          throw std::runtime_error("unsupported PNG scanline filter: " + path);
      }
      cur[i] = static_cast<unsigned char>(v & 0xff);
    }
    for (std::size_t i = 0; i < row_bytes; ++i) {
      img[static_cast<std::size_t>(y) * row_bytes + i] = cur[i] / 255.0;
    }
    prev = cur;
  }
  return img;
}

void push_chunk(std::vector<unsigned char>& out, const char* type,
                const std::vector<unsigned char>& payload) {
  push_be32(out, static_cast<std::uint32_t>(payload.size()));
  const std::size_t type_pos = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), payload.begin(), payload.end());
  const std::uint32_t crc = static_cast<std::uint32_t>(
      crc32(crc32(0L, Z_NULL, 0), &out[type_pos],
            static_cast<uInt>(4 + payload.size())));
  push_be32(out, crc);
}

std::vector<unsigned char> quantize(const Image& img, const char* what) {
  std::vector<unsigned char> bytes(img.size());
  for (std::size_t i = 0; i < img.size(); ++i) {
    const double v = img[i];
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument(std::string(what) +
                                  ": sample outside [0, 1] at index " +
                                  std::to_string(i));
    }
    bytes[i] = static_cast<unsigned char>(std::lround(v * 255.0));
  }
  return bytes;
}

void save_png(const Image& img, const std::string& path) {
  const std::vector<unsigned char> pixels = quantize(img, "save_image");
  const std::size_t row_bytes =
      static_cast<std::size_t>(img.width()) * img.channels();
  std::vector<unsigned char> raw;
  raw.reserve((row_bytes + 1) * img.height());
  for (int y = 0; y < img.height(); ++y) {
    raw.push_back(0);  // filter: None
    const unsigned char* row = &pixels[static_cast<std::size_t>(y) * row_bytes];
    raw.insert(raw.end(), row, row + row_bytes);
  }

  std::vector<unsigned char> out(kPngSignature.begin(), kPngSignature.end());
  std::vector<unsigned char> ihdr;
  push_be32(ihdr, static_cast<std::uint32_t>(img.width()));
  push_be32(ihdr, static_cast<std::uint32_t>(img.height()));
  ihdr.push_back(8);                                    // bit depth
  ihdr.push_back(img.channels() == 3 ? 2 : 0);          // color type
  ihdr.push_back(0);                                    // compression
  ihdr.push_back(0);                                    // filter method
  ihdr.push_back(0);                                    // no interlace
  push_chunk(out, "IHDR", ihdr);
  push_chunk(out, "IDAT", zlib_deflate(raw));
  push_chunk(out, "IEND", {});
  write_file(path, out);
}

Image decode_ppm(const std::vector<unsigned char>& bytes,
                 const std::string& path) {
  // Header: "P6" <ws> width <ws> height <ws> maxval <single ws>, with
  // '#' comments allowed anywhere in the whitespace.
  std::size_t pos = 2;
  auto next_token = [&]() -> std::string {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
    std::string tok;
    while (pos < bytes.size() && !std::isspace(bytes[pos])) {
      tok.push_back(static_cast<char>(bytes[pos++]));
    }
    if (tok.empty()) {
      throw std::runtime_error("truncated PPM header: " + path);
    }
    return tok;
  };

  const long width = std::stol(next_token());
  const long height = std::stol(next_token());
  const long maxval = std::stol(next_token());
  if (width <= 0 || height <= 0) {
    throw std::runtime_error("bad PPM dimensions: " + path);
  }
  if (maxval != 255) {
    throw std::runtime_error("unsupported PPM maxval (want 255): " + path);
  }
  ++pos;  // single whitespace byte after maxval

  const std::size_t need = static_cast<std::size_t>(width) * height * 3;
  if (bytes.size() < pos + need) {
    throw std::runtime_error("truncated PPM pixel data: " + path);
  }
  Image img(static_cast<int>(height), static_cast<int>(width), 3,
            Domain::Display01);
  for (std::size_t i = 0; i < need; ++i) {
    img[i] = bytes[pos + i] / 255.0;
  }
  return img;
}

void save_ppm(const Image& img, const std::string& path) {
  require_channels(img, 3, "save_image (PPM)");
  const std::vector<unsigned char> pixels = quantize(img, "save_image");
  std::string header = "P6\n" + std::to_string(img.width()) + " " +
                       std::to_string(img.height()) + "\n255\n";
  std::vector<unsigned char> out(header.begin(), header.end());
  out.insert(out.end(), pixels.begin(), pixels.end());
  write_file(path, out);
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

Image load_image(const std::string& path) {
  const std::vector<unsigned char> bytes = read_file(path);
  if (bytes.size() >= kPngSignature.size() &&
      std::memcmp(bytes.data(), kPngSignature.data(), kPngSignature.size()) ==
          0) {
    return decode_png(bytes, path);
  }
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '6') {
    return decode_ppm(bytes, path);
  }
  throw std::runtime_error("unsupported image format: " + path);
}

void save_image(const Image& img, const std::string& path) {
  if (img.domain() != Domain::Display01) {
    throw std::invalid_argument("save_image: image must be Display01");
  }
  if (img.empty()) {
    throw std::invalid_argument("save_image: empty image");
  }
  if (ends_with(path, ".png")) {
    save_png(img, path);
  } else if (ends_with(path, ".ppm")) {
    save_ppm(img, path);
  } else {
    throw std::invalid_argument("save_image: unsupported extension: " + path);
  }
}

}  // namespace uwdiff
