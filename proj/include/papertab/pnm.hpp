#pragma once

// Binary PNM (P5 grayscale, P6 RGB, maxval 255) streams and files. This is
// the wire format for frames, external masks and outputs.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <variant>

#include "papertab/raster.hpp"

namespace papertab::pnm {

using AnyFrame = std::variant<GrayFrame, ColorFrame>;

/// Reads the next frame from a concatenated stream. Returns nullopt on a
/// clean end of stream; throws IoError on malformed or truncated input.
std::optional<AnyFrame> read_frame(std::istream& in);

void write(std::ostream& out, const GrayFrame& frame);
void write(std::ostream& out, const ColorFrame& frame);

AnyFrame read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const GrayFrame& frame);
void write_file(const std::filesystem::path& path, const ColorFrame& frame);

/// Converts whatever was read into RGB (gray replicated to three channels).
ColorFrame as_color(AnyFrame frame);
/// Converts whatever was read into luma.
GrayFrame as_gray(AnyFrame frame);

}  // namespace papertab::pnm
