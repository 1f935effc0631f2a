#include "weakpair/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "weakpair/error.hpp"

namespace weakpair {

namespace {

// Next whitespace-delimited header token, skipping '#' comments.
std::string header_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  return tok;
}

int parse_positive(const std::string& tok, const std::filesystem::path& path) {
  try {
    const int v = std::stoi(tok);
    if (v > 0) return v;
  } catch (const std::exception&) {
  }
  throw IoError("malformed PGM header in " + path.string());
}

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

}  // namespace

Image read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string magic = header_token(in);
  if (magic != "P5" && magic != "P2") throw IoError("not a PGM file: " + path.string());
  const int w = parse_positive(header_token(in), path);
  const int h = parse_positive(header_token(in), path);
  const int maxval = parse_positive(header_token(in), path);
  if (maxval > 65535) throw IoError("unsupported PGM maxval in " + path.string());

  Image img(w, h);
  const double scale = maxval;
  if (magic == "P2") {
    for (double& v : img.pixels()) {
      const std::string tok = header_token(in);
      if (tok.empty()) throw IoError("truncated PGM " + path.string());
      v = std::stoi(tok) / scale;
    }
    return img;
  }
  const std::size_t bytes_per = maxval < 256 ? 1 : 2;
  std::vector<unsigned char> raw(img.size() * bytes_per);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size())) throw IoError("truncated PGM " + path.string());
  for (std::size_t i = 0; i < img.size(); ++i) {
    const int v = bytes_per == 1 ? raw[i] : (raw[2 * i] << 8) | raw[2 * i + 1];
    img.pixels()[i] = v / scale;
  }
  return img;
}

void write_pgm(const std::filesystem::path& path, const Image& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
  std::vector<std::uint8_t> raw(img.size());
  std::transform(img.pixels().begin(), img.pixels().end(), raw.begin(), to_byte);
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

Image read_png(const std::filesystem::path& path) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.c_str()))
    throw IoError("cannot read PNG " + path.string() + ": " + png.message);
  png.format = PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> raw(PNG_IMAGE_SIZE(png));
  if (!png_image_finish_read(&png, nullptr, raw.data(), 0, nullptr)) {
    png_image_free(&png);
    throw IoError("cannot decode PNG " + path.string() + ": " + png.message);
  }
  Image img(static_cast<int>(png.width), static_cast<int>(png.height));
  for (std::size_t i = 0; i < img.size(); ++i) img.pixels()[i] = raw[i] / 255.0;
  return img;
}

Image read_image(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".png") return read_png(path);
  return read_pgm(path);
}

Image quantize8(const Image& img) {
  Image out(img.width(), img.height());
  for (std::size_t i = 0; i < img.size(); ++i) out.pixels()[i] = to_byte(img.pixels()[i]) / 255.0;
  return out;
}

}  // namespace weakpair
