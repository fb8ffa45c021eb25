#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include <Eigen/Dense>

#include "elastic/curve.hpp"
#include "elastic/error.hpp"
#include "elastic/field.hpp"

namespace elastic {

// Pixel (row r, col c) is sampled at its center, taken as the point (x=c, y=r).

/// Pixels whose center lies within `radius` of `center`; clipped at the grid edge.
inline BinaryMask make_disk(Eigen::Index height, Eigen::Index width, const Point2<double>& center, double radius) {
    if (height < 1 || width < 1) throw InvalidInput("disk grid must be non-empty");
    if (!(radius > 0) || !std::isfinite(radius)) throw InvalidInput("disk radius must be positive");
    if (!(center.x() >= 0 && center.x() <= double(width - 1) && center.y() >= 0 && center.y() <= double(height - 1)))
        throw InvalidInput("disk center must lie on the grid");
    BinaryMask m(height, width);
    const double r2 = radius * radius;
    for (Eigen::Index r = 0; r < height; ++r)
        for (Eigen::Index c = 0; c < width; ++c) {
            const double dx = double(c) - center.x();
            const double dy = double(r) - center.y();
            m(r, c) = dx * dx + dy * dy <= r2 ? 1 : 0;
        }
    return m;
}

inline BinaryMask make_disk(Eigen::Index size, const Point2<double>& center, double radius) {
    return make_disk(size, size, center, radius);
}

/// Centre row of the vessel: an odd-width flat tube then covers exactly
/// `width` rows, and an even one is shifted half a pixel to do the same.
inline double vessel_midline(Eigen::Index size, double width) {
    const auto w = static_cast<long>(std::lround(width));
    return w % 2 == 1 ? double(size / 2) : double(size / 2) - 0.5;
}

/// Tube of the given width around y = mid + amplitude * sin(2 pi x / period),
/// spanning the full grid width.
inline BinaryMask make_vessel(Eigen::Index size, double amplitude, double period, double width) {
    if (size < 2) throw InvalidInput("vessel grid must be at least 2x2");
    if (!(width >= 1) || !std::isfinite(width)) throw InvalidInput("vessel width must be >= 1");
    if (!(period > 0) || !std::isfinite(period)) throw InvalidInput("vessel period must be positive");
    if (!std::isfinite(amplitude)) throw InvalidInput("vessel amplitude must be finite");
    const double mid = vessel_midline(size, width);
    const double half = width / 2;
    const double reach = std::abs(amplitude) + half;
    if (mid - reach < 0 || mid + reach > double(size - 1)) throw InvalidInput("vessel does not fit on the grid");

    auto centerline = [&](double x) { return mid + amplitude * std::sin(2 * std::numbers::pi * x / period); };
    constexpr double dx = 1.0 / 32.0;
    BinaryMask m = BinaryMask::Zero(size, size);
    for (Eigen::Index c = 0; c < size; ++c) {
        // Minimum distance from each pixel in this column to samples within reach.
        const auto lo = static_cast<long>(std::floor((double(c) - half) / dx));
        const auto hi = static_cast<long>(std::ceil((double(c) + half) / dx));
        for (Eigen::Index r = 0; r < size; ++r) {
            bool inside = false;
            for (long k = lo; k <= hi && !inside; ++k) {
                const double x = double(k) * dx;
                const double ddx = double(c) - x;
                const double ddy = double(r) - centerline(x);
                inside = ddx * ddx + ddy * ddy <= half * half + 1e-12;
            }
            m(r, c) = inside ? 1 : 0;
        }
    }
    return m;
}

/// Half-open column range [begin, end).
struct ColumnRange {
    Eigen::Index begin = 0;
    Eigen::Index end = 0;
};

/// Clears the foreground in the given columns (clipped to the grid).
inline BinaryMask punch_gap(BinaryMask mask, ColumnRange cols) {
    const Eigen::Index b = std::clamp<Eigen::Index>(cols.begin, 0, mask.cols());
    const Eigen::Index e = std::clamp<Eigen::Index>(cols.end, 0, mask.cols());
    if (e > b) mask.middleCols(b, e - b).setZero();
    return mask;
}

/// Columns of a `gap`-wide gap centred on a grid of the given width.
inline ColumnRange centered_gap(Eigen::Index width, Eigen::Index gap) { return {width / 2 - gap / 2, width / 2 - gap / 2 + gap}; }

/// Mean (x, y) of the foreground pixel centres; empty masks have no centroid.
inline std::optional<Point2<double>> centroid(const BinaryMask& mask) {
    double sx = 0, sy = 0, n = 0;
    for (Eigen::Index r = 0; r < mask.rows(); ++r)
        for (Eigen::Index c = 0; c < mask.cols(); ++c)
            if (mask(r, c)) {
                sx += double(c);
                sy += double(r);
                n += 1;
            }
    if (n == 0) return std::nullopt;
    return Point2<double>(sx / n, sy / n);
}

}  // namespace elastic
