#pragma once

#include <cassert>
#include <cstdint>
#include <span>
#include <vector>

#include "milde/errors.hpp"

namespace milde {

/// One straight-alpha pixel, 8 bits per channel.
struct Rgba {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;
    std::uint8_t a = 0;

    bool operator==(const Rgba&) const = default;
};

/// Dense row-major RGBA raster. Value type; copies are deep.
class Raster {
public:
    Raster() = default;

    Raster(int width, int height, Rgba fill = Rgba{})
        : width_(width), height_(height),
          pixels_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {
        if (width <= 0 || height <= 0)
            throw StructuralError("raster dimensions must be positive");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t pixel_count() const { return pixels_.size(); }

    const Rgba& at(int x, int y) const {
        assert(x >= 0 && x < width_ && y >= 0 && y < height_);
        return pixels_[static_cast<std::size_t>(y) * width_ + x];
    }
    Rgba& at(int x, int y) {
        assert(x >= 0 && x < width_ && y >= 0 && y < height_);
        return pixels_[static_cast<std::size_t>(y) * width_ + x];
    }

    std::span<const Rgba> pixels() const { return pixels_; }
    std::span<Rgba> pixels() { return pixels_; }

    bool same_size(const Raster& o) const { return width_ == o.width_ && height_ == o.height_; }

    bool operator==(const Raster&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<Rgba> pixels_;
};

} // namespace milde
