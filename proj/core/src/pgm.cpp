#include "patchprior/pgm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "patchprior/errors.hpp"
#include "atomic_write.hpp"

namespace patchprior {

namespace {

// Skips whitespace and '#' comments between header tokens.
void skip_separators(std::istream& in) {
  for (;;) {
    int c = in.peek();
    if (c == '#') {
      std::string discard;
      std::getline(in, discard);
    } else if (c != EOF && std::isspace(c)) {
      in.get();
    } else {
      return;
    }
  }
}

std::size_t read_header_int(std::istream& in, const char* what) {
  skip_separators(in);
  long long v = -1;
  if (!(in >> v) || v <= 0) throw IoError(std::string("PGM: bad ") + what);
  return static_cast<std::size_t>(v);
}

}  // namespace

ImageBuffer read_pgm(std::istream& in) {
  char magic[2] = {0, 0};
  if (!in.read(magic, 2) || magic[0] != 'P' || (magic[1] != '5' && magic[1] != '2')) {
    throw IoError("PGM: expected P5 or P2 magic");
  }
  const bool binary = magic[1] == '5';
  const std::size_t width = read_header_int(in, "width");
  const std::size_t height = read_header_int(in, "height");
  const std::size_t maxval = read_header_int(in, "maximum gray value");
  if (maxval != 255) throw IoError("PGM: only maximum gray value 255 is supported");

  std::vector<double> pixels(width * height);
  if (binary) {
    in.get();  // single whitespace after maxval
    std::string raw(pixels.size(), '\0');
    if (!in.read(raw.data(), static_cast<std::streamsize>(raw.size()))) {
      throw IoError("PGM: truncated pixel data");
    }
    std::transform(raw.begin(), raw.end(), pixels.begin(),
                   [](char c) { return static_cast<double>(static_cast<unsigned char>(c)); });
  } else {
    for (auto& p : pixels) {
      skip_separators(in);
      long v = -1;
      if (!(in >> v) || v < 0 || v > 255) throw IoError("PGM: bad ASCII pixel value");
      p = static_cast<double>(v);
    }
  }
  return ImageBuffer(width, height, std::move(pixels));
}

ImageBuffer read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_pgm(in);
}

ImageBuffer quantize(const ImageBuffer& img) {
  ImageBuffer out = img;
  for (auto& v : out.pixels()) v = std::round(std::clamp(v, 0.0, 255.0));
  return out;
}

void write_pgm(const ImageBuffer& img, std::ostream& out) {
  out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
  std::string raw(img.size(), '\0');
  for (std::size_t i = 0; i < img.size(); ++i) {
    raw[i] = static_cast<char>(
        static_cast<unsigned char>(std::lround(std::clamp(img[i], 0.0, 255.0))));
  }
  out.write(raw.data(), static_cast<std::streamsize>(raw.size()));
}

void write_pgm(const ImageBuffer& img, const std::filesystem::path& path) {
  std::ostringstream buffer;
  write_pgm(img, buffer);
  detail::write_file_atomically(path, buffer.str());
}

}  // namespace patchprior
