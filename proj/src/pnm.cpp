#include "papertab/pnm.hpp"

#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

namespace papertab::pnm {

namespace {

// Skips whitespace and '#' comments between header tokens.
void skip_separators(std::istream& in) {
  for (;;) {
    const int c = in.peek();
    if (c == '#') {
      std::string ignored;
      std::getline(in, ignored);
    } else if (c != EOF && std::isspace(c)) {
      in.get();
    } else {
      return;
    }
  }
}

int read_header_int(std::istream& in) {
  skip_separators(in);
  int value = 0;
  if (!(in >> value) || value < 1) {
    throw Error(ErrorCode::IoError, "malformed PNM header");
  }
  return value;
}

template <int Channels>
Image<std::uint8_t, Channels> read_body(std::istream& in, int width,
                                        int height) {
  Image<std::uint8_t, Channels> frame(width, height);
  auto& data = frame.data();
  in.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(data.size()));
  if (in.gcount() != static_cast<std::streamsize>(data.size())) {
    throw Error(ErrorCode::IoError, "truncated PNM pixel data");
  }
  return frame;
}

template <int Channels>
void write_impl(std::ostream& out, const Image<std::uint8_t, Channels>& f) {
  out << (Channels == 1 ? "P5" : "P6") << '\n'
      << f.width() << ' ' << f.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(f.data().data()),
            static_cast<std::streamsize>(f.data().size()));
  if (!out) throw Error(ErrorCode::IoError, "failed writing PNM frame");
}

}  // namespace

std::optional<AnyFrame> read_frame(std::istream& in) {
  skip_separators(in);
  if (in.peek() == EOF) return std::nullopt;
  char magic[2] = {};
  in.read(magic, 2);
  if (in.gcount() != 2 || magic[0] != 'P' ||
      (magic[1] != '5' && magic[1] != '6')) {
    throw Error(ErrorCode::IoError, "expected a binary P5 or P6 frame");
  }
  const int width = read_header_int(in);
  const int height = read_header_int(in);
  const int maxval = read_header_int(in);
  if (maxval != 255) {
    throw Error(ErrorCode::IoError, "only maxval 255 is supported");
  }
  // Exactly one whitespace byte separates the header from the raster.
  if (!std::isspace(in.get())) {
    throw Error(ErrorCode::IoError, "malformed PNM header terminator");
  }
  if (magic[1] == '5') return read_body<1>(in, width, height);
  return read_body<3>(in, width, height);
}

void write(std::ostream& out, const GrayFrame& frame) { write_impl(out, frame); }
void write(std::ostream& out, const ColorFrame& frame) {
  write_impl(out, frame);
}

AnyFrame read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  auto frame = read_frame(in);
  if (!frame) throw Error(ErrorCode::IoError, "empty file " + path.string());
  return *std::move(frame);
}

void write_file(const std::filesystem::path& path, const GrayFrame& frame) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot create " + path.string());
  write(out, frame);
}

void write_file(const std::filesystem::path& path, const ColorFrame& frame) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot create " + path.string());
  write(out, frame);
}

ColorFrame as_color(AnyFrame frame) {
  if (auto* color = std::get_if<ColorFrame>(&frame)) return std::move(*color);
  const auto& gray = std::get<GrayFrame>(frame);
  ColorFrame out(gray.width(), gray.height());
  for (std::size_t i = 0; i < gray.data().size(); ++i) {
    out.data()[3 * i] = out.data()[3 * i + 1] = out.data()[3 * i + 2] =
        gray.data()[i];
  }
  return out;
}

GrayFrame as_gray(AnyFrame frame) {
  if (auto* gray = std::get_if<GrayFrame>(&frame)) return std::move(*gray);
  return to_luma(std::get<ColorFrame>(frame));
}

}  // namespace papertab::pnm
