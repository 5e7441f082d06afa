#include "milde/png_io.hpp"

#include <cstring>
#include <vector>

#include <png.h>

#include "milde/errors.hpp"

namespace milde {

namespace {

[[noreturn]] void fail(const char* op, const std::string& detail) {
    throw StructuralError(std::string("png ") + op + " failed: " + detail);
}

} // namespace

Raster read_png_rgba(const std::filesystem::path& path) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;

    if (!png_image_begin_read_from_file(&image, path.string().c_str()))
        fail("read", path.string() + ": " + image.message);
    image.format = PNG_FORMAT_RGBA;

    Raster raster(static_cast<int>(image.width), static_cast<int>(image.height));
    if (!png_image_finish_read(&image, nullptr, raster.pixels().data(), 0, nullptr)) {
        png_image_free(&image);
        fail("read", path.string() + ": " + image.message);
    }
    return raster;
}

void write_png_rgba(const std::filesystem::path& path, const Raster& raster) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(raster.width());
    image.height = static_cast<png_uint_32>(raster.height());
    image.format = PNG_FORMAT_RGBA;

    if (!png_image_write_to_file(&image, path.string().c_str(), 0, raster.pixels().data(), 0,
                                 nullptr))
        fail("write", path.string() + ": " + image.message);
}

Raster decode_png_rgba(const std::string& bytes) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;

    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()))
        fail("decode", image.message);
    image.format = PNG_FORMAT_RGBA;

    Raster raster(static_cast<int>(image.width), static_cast<int>(image.height));
    if (!png_image_finish_read(&image, nullptr, raster.pixels().data(), 0, nullptr)) {
        png_image_free(&image);
        fail("decode", image.message);
    }
    return raster;
}

std::string encode_png_rgba(const Raster& raster) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(raster.width());
    image.height = static_cast<png_uint_32>(raster.height());
    image.format = PNG_FORMAT_RGBA;

    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&image, nullptr, &size, 0, raster.pixels().data(), 0, nullptr))
        fail("encode", image.message);

    std::string out(size, '\0');
    if (!png_image_write_to_memory(&image, out.data(), &size, 0, raster.pixels().data(), 0,
                                   nullptr))
        fail("encode", image.message);
    out.resize(size);
    return out;
}

Mask read_mask_png(const std::filesystem::path& path) {
    const Raster raster = read_png_rgba(path);
    Mask mask(raster.width(), raster.height());
    const std::span<const Rgba> px = raster.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) mask.bits[i] = px[i].r >= 128 ? 1 : 0;
    return mask;
}

void write_mask_png(const std::filesystem::path& path, const Mask& mask) {
    Raster raster(mask.width, mask.height);
    const std::span<Rgba> px = raster.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) {
        const std::uint8_t v = mask.bits[i] ? 255 : 0;
        px[i] = Rgba{v, v, v, 255};
    }
    write_png_rgba(path, raster);
}

} // namespace milde
