#pragma once

#include <algorithm>

namespace milde {

/// Integer rectangle in pixel coordinates (x,y = top-left corner).
struct Rect {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    bool operator==(const Rect&) const = default;

    bool empty() const { return w <= 0 || h <= 0; }

    bool contains(int px, int py) const {
        return px >= x && px < x + w && py >= y && py < y + h;
    }

    bool intersects(const Rect& o) const {
        if (empty() || o.empty()) return false;
        return x < o.x + o.w && o.x < x + w && y < o.y + o.h && o.y < y + h;
    }

    /// True when this rectangle lies fully inside a width x height canvas.
    bool within(int width, int height) const {
        return !empty() && x >= 0 && y >= 0 && x + w <= width && y + h <= height;
    }

    static Rect union_of(const Rect& a, const Rect& b) {
        if (a.empty()) return b;
        if (b.empty()) return a;
        const int x0 = std::min(a.x, b.x);
        const int y0 = std::min(a.y, b.y);
        const int x1 = std::max(a.x + a.w, b.x + b.w);
        const int y1 = std::max(a.y + a.h, b.y + b.h);
        return Rect{x0, y0, x1 - x0, y1 - y0};
    }
};

} // namespace milde
