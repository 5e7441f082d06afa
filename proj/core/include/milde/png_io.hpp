#pragma once

#include <filesystem>
#include <string>

#include "milde/doc_model.hpp"
#include "milde/raster.hpp"

namespace milde {

/// Reads any PNG as 8-bit RGBA (libpng performs the format conversion).
Raster read_png_rgba(const std::filesystem::path& path);

void write_png_rgba(const std::filesystem::path& path, const Raster& raster);

/// In-memory variants, used for base64 image parts on the wire.
Raster decode_png_rgba(const std::string& bytes);
std::string encode_png_rgba(const Raster& raster);

/// Binary masks round-trip as grayscale PNG: a pixel is set when its first
/// channel is >= 128. Written as 0/255.
Mask read_mask_png(const std::filesystem::path& path);
void write_mask_png(const std::filesystem::path& path, const Mask& mask);

} // namespace milde
