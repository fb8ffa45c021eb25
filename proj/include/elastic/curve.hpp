#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "elastic/error.hpp"

namespace elastic {

template <typename Scalar>
using Point2 = Eigen::Matrix<Scalar, 2, 1>;

/// Closed polygonal curve. The physical tangent of edge i is
/// orientation * (points[i+1] - points[i]), so reversing the points and
/// flipping the sign describes the same oriented curve.
template <typename Scalar>
struct OrientedPolyline {
    std::vector<Point2<Scalar>> points;
    int orientation = +1;

    OrientedPolyline reversed() const {
        OrientedPolyline out{{points.rbegin(), points.rend()}, orientation};
        return out;
    }
    OrientedPolyline flipped() const { return {points, -orientation}; }
};

template <typename Scalar>
struct CurveEnergyParams {
    Scalar epsilon = Scalar(0.05);  ///< Core length in r -> sqrt(r^2 + eps^2).
    int quadrature = 4;             ///< Midpoint sub-segments per polygon edge.
};

template <typename Scalar>
struct PairEnergy {
    Scalar self1 = 0;
    Scalar self2 = 0;
    Scalar interaction = 0;

    Scalar total() const { return self1 + self2 + interaction; }
};

namespace detail {

template <typename Scalar>
struct Element {
    Point2<Scalar> mid;
    Point2<Scalar> dl;  // oriented, length = sub-segment length
};

template <typename Scalar>
void require_valid(const OrientedPolyline<Scalar>& c) {
    if (c.points.size() < 3) throw InvalidInput("polyline needs at least 3 points");
    if (c.orientation != 1 && c.orientation != -1) throw InvalidInput("orientation must be +1 or -1");
    for (std::size_t i = 0; i < c.points.size(); ++i) {
        const auto& a = c.points[i];
        const auto& b = c.points[(i + 1) % c.points.size()];
        if (!a.allFinite()) throw InvalidInput("polyline has non-finite coordinates");
        if (a == b) throw InvalidInput("polyline has repeated consecutive points");
    }
}

template <typename Scalar>
void require_valid(const CurveEnergyParams<Scalar>& p) {
    if (!(p.epsilon > Scalar(0))) throw InvalidInput("curve epsilon must be positive");
    if (p.quadrature < 1) throw InvalidInput("curve quadrature must be >= 1");
}

template <typename Scalar>
void append_elements(const OrientedPolyline<Scalar>& c, int q, std::vector<Element<Scalar>>& out) {
    require_valid(c);
    const std::size_t n = c.points.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point2<Scalar>& a = c.points[i];
        const Point2<Scalar> edge = c.points[(i + 1) % n] - a;
        const Point2<Scalar> dl = Scalar(c.orientation) * edge / Scalar(q);
        for (int k = 0; k < q; ++k) out.push_back({a + edge * ((Scalar(k) + Scalar(0.5)) / Scalar(q)), dl});
    }
}

template <typename Scalar>
std::vector<Element<Scalar>> elements(std::span<const OrientedPolyline<Scalar>> curves, int q) {
    std::vector<Element<Scalar>> out;
    for (const auto& c : curves) append_elements(c, q, out);
    return out;
}

// sum_i sum_j dl_i . dl_j / sqrt(r^2 + eps^2), fixed summation order with
// Neumaier compensation across rows.
template <typename Scalar>
Scalar kernel_sum(const std::vector<Element<Scalar>>& a, const std::vector<Element<Scalar>>& b, Scalar eps) {
    const Scalar eps2 = eps * eps;
    Scalar sum = 0, comp = 0;
    for (const auto& p : a) {
        Scalar row = 0;
        for (const auto& q : b) row += p.dl.dot(q.dl) / std::sqrt((p.mid - q.mid).squaredNorm() + eps2);
        const Scalar t = sum + row;
        comp += std::abs(sum) >= std::abs(row) ? (sum - t) + row : (row - t) + sum;
        sum = t;
    }
    return sum + comp;
}

}  // namespace detail

/// E = (1/8pi) sum over all directed element pairs of the union of curves.
template <typename Scalar>
Scalar curve_energy(std::span<const OrientedPolyline<Scalar>> curves, const CurveEnergyParams<Scalar>& params) {
    detail::require_valid(params);
    const auto els = detail::elements(curves, params.quadrature);
    return detail::kernel_sum(els, els, params.epsilon) / (Scalar(8) * std::numbers::pi_v<Scalar>);
}

template <typename Scalar>
Scalar curve_energy(const std::vector<OrientedPolyline<Scalar>>& curves, const CurveEnergyParams<Scalar>& params) {
    return curve_energy(std::span<const OrientedPolyline<Scalar>>(curves), params);
}

/// Self-energies of each curve and their interaction (1/4pi) int int dl1.dl2 / r.
template <typename Scalar>
PairEnergy<Scalar> pair_decompose(const OrientedPolyline<Scalar>& c1, const OrientedPolyline<Scalar>& c2,
                                  const CurveEnergyParams<Scalar>& params) {
    detail::require_valid(params);
    std::vector<detail::Element<Scalar>> e1, e2;
    detail::append_elements(c1, params.quadrature, e1);
    detail::append_elements(c2, params.quadrature, e2);
    const Scalar k = Scalar(8) * std::numbers::pi_v<Scalar>;
    return {detail::kernel_sum(e1, e1, params.epsilon) / k, detail::kernel_sum(e2, e2, params.epsilon) / k,
            Scalar(2) * detail::kernel_sum(e1, e2, params.epsilon) / k};
}

/// Normal speed w = (1/4pi) sum r . n_src |dl| / (r^2 + eps^2)^{3/2} at `at`,
/// where n_src = z x tau_src. The force on a curve passing through `at` with
/// unit normal `normal` (= z x its tangent) is w * normal, so w is the speed
/// along `normal`.
template <typename Scalar>
Scalar curve_force(std::span<const OrientedPolyline<Scalar>> curves, const Point2<Scalar>& at,
                   const Point2<Scalar>& normal, const CurveEnergyParams<Scalar>& params) {
    detail::require_valid(params);
    if (!at.allFinite()) throw InvalidInput("evaluation point must be finite");
    if (std::abs(normal.norm() - Scalar(1)) > Scalar(1e-9)) throw InvalidInput("normal must be a unit vector");
    const auto els = detail::elements(curves, params.quadrature);
    const Scalar eps2 = params.epsilon * params.epsilon;
    Scalar sum = 0;
    for (const auto& e : els) {
        const Point2<Scalar> r = at - e.mid;
        const Point2<Scalar> n_src(-e.dl.y(), e.dl.x());  // z x dl, carries |dl|
        const Scalar d2 = r.squaredNorm() + eps2;
        sum += r.dot(n_src) / (d2 * std::sqrt(d2));
    }
    return sum / (Scalar(4) * std::numbers::pi_v<Scalar>);
}

template <typename Scalar>
Scalar curve_force(const std::vector<OrientedPolyline<Scalar>>& curves, const Point2<Scalar>& at,
                   const Point2<Scalar>& normal, const CurveEnergyParams<Scalar>& params) {
    return curve_force(std::span<const OrientedPolyline<Scalar>>(curves), at, normal, params);
}

/// Regular polygon inscribed in a circle, counter-clockwise for orientation +1.
template <typename Scalar>
OrientedPolyline<Scalar> make_circle(Point2<Scalar> center, Scalar radius, int segments, int orientation = +1) {
    if (segments < 3 || !(radius > Scalar(0))) throw InvalidInput("circle needs radius > 0 and >= 3 segments");
    OrientedPolyline<Scalar> c;
    c.orientation = orientation;
    c.points.reserve(static_cast<std::size_t>(segments));
    for (int i = 0; i < segments; ++i) {
        const Scalar t = Scalar(2) * std::numbers::pi_v<Scalar> * Scalar(i) / Scalar(segments);
        c.points.push_back(center + radius * Point2<Scalar>(std::cos(t), std::sin(t)));
    }
    return c;
}

/// Axis-aligned rectangle traversed counter-clockwise for orientation +1.
template <typename Scalar>
OrientedPolyline<Scalar> make_rectangle(Point2<Scalar> lo, Point2<Scalar> hi, int orientation = +1) {
    if (!(hi.x() > lo.x() && hi.y() > lo.y())) throw InvalidInput("rectangle needs hi > lo");
    return {{lo, {hi.x(), lo.y()}, hi, {lo.x(), hi.y()}}, orientation};
}

}  // namespace elastic
