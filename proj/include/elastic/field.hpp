#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "elastic/error.hpp"

namespace elastic {

/// H x W real grid stored row-major: rows() is the height, cols() the width.
template <typename Scalar>
using Field = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using ScalarField2D = Field<double>;

/// Discrete {0,1} region indicator with the same layout as Field.
using BinaryMask = Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Smoothing { Sine, HardTanh };

template <typename Scalar>
struct SmoothingParams {
    Scalar beta = Scalar(0.25);
    Smoothing kind = Smoothing::HardTanh;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
    if (!ok) throw InvalidInput(what);
}

template <typename Derived>
void require_finite(const Eigen::DenseBase<Derived>& a, const char* name) {
    if (!a.derived().allFinite()) throw InvalidInput(std::string(name) + " contains non-finite values");
}

template <typename A, typename B>
void require_same_shape(const Eigen::DenseBase<A>& a, const Eigen::DenseBase<B>& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw InvalidInput(std::string(what) + ": shape mismatch (" + std::to_string(a.rows()) + "x" +
                           std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                           std::to_string(b.cols()) + ")");
}

template <typename Scalar>
void require_params(const SmoothingParams<Scalar>& p) {
    if (!(p.beta > Scalar(0)) || !std::isfinite(p.beta)) throw InvalidInput("smoothing beta must be positive");
}

template <typename Scalar>
Scalar heaviside(Scalar phi, const SmoothingParams<Scalar>& p) {
    if (phi <= -p.beta) return Scalar(0);
    if (phi >= p.beta) return Scalar(1);
    if (p.kind == Smoothing::Sine)
        return Scalar(0.5) * (std::sin(std::numbers::pi_v<Scalar> * phi / (Scalar(2) * p.beta)) + Scalar(1));
    return (phi + p.beta) / (Scalar(2) * p.beta);
}

// The band is closed: |phi| == beta still carries the in-band slope, so a
// level set encoded at the band edges (see levelset_from_mask) can move.
template <typename Scalar>
Scalar heaviside_slope(Scalar phi, const SmoothingParams<Scalar>& p) {
    if (std::abs(phi) > p.beta) return Scalar(0);
    if (p.kind == Smoothing::Sine) {
        const Scalar pi = std::numbers::pi_v<Scalar>;
        return pi / (Scalar(4) * p.beta) * std::cos(pi * phi / (Scalar(2) * p.beta));
    }
    return Scalar(1) / (Scalar(2) * p.beta);
}

}  // namespace detail

/// Smoothed Heaviside H(phi), exactly 0 below -beta and 1 above beta.
template <typename Derived>
Field<typename Derived::Scalar> heaviside_smooth(const Eigen::ArrayBase<Derived>& phi,
                                                 const SmoothingParams<typename Derived::Scalar>& params) {
    using Scalar = typename Derived::Scalar;
    detail::require_params(params);
    detail::require_finite(phi, "phi");
    return phi.unaryExpr([&](Scalar v) { return detail::heaviside(v, params); });
}

/// Pointwise H'(phi); zero outside the closed band |phi| <= beta.
template <typename Derived>
Field<typename Derived::Scalar> heaviside_derivative(const Eigen::ArrayBase<Derived>& phi,
                                                     const SmoothingParams<typename Derived::Scalar>& params) {
    using Scalar = typename Derived::Scalar;
    detail::require_params(params);
    detail::require_finite(phi, "phi");
    return phi.unaryExpr([&](Scalar v) { return detail::heaviside_slope(v, params); });
}

/// phi = prob - 0.5 for a probability map with values in [0,1].
template <typename Derived>
Field<typename Derived::Scalar> levelset_from_prob(const Eigen::ArrayBase<Derived>& prob) {
    using Scalar = typename Derived::Scalar;
    detail::require_finite(prob, "prob");
    if (prob.size() > 0 && (prob.minCoeff() < Scalar(0) || prob.maxCoeff() > Scalar(1)))
        throw InvalidInput("probability values must lie in [0,1]");
    return prob - Scalar(0.5);
}

/// Inverse of the HardTanh ramp: phi = 2*beta*(h - 1/2), so that a HardTanh
/// H(phi) reproduces h exactly. Binary inputs land on the band edges +-beta.
template <typename Derived>
Field<typename Derived::Scalar> levelset_from_indicator(const Eigen::ArrayBase<Derived>& h,
                                                        const SmoothingParams<typename Derived::Scalar>& params) {
    using Scalar = typename Derived::Scalar;
    detail::require_params(params);
    detail::require_finite(h, "indicator");
    if (h.size() > 0 && (h.minCoeff() < Scalar(0) || h.maxCoeff() > Scalar(1)))
        throw InvalidInput("indicator values must lie in [0,1]");
    return Scalar(2) * params.beta * (h - Scalar(0.5));
}

template <typename Scalar = double>
Field<Scalar> binary_mask_to_field(const BinaryMask& mask) {
    return mask.cast<Scalar>();
}

template <typename Scalar = double>
Field<Scalar> levelset_from_mask(const BinaryMask& mask, const SmoothingParams<Scalar>& params = {}) {
    return levelset_from_indicator(binary_mask_to_field<Scalar>(mask), params);
}

/// Foreground where the smoothed indicator strictly exceeds 1/2.
template <typename Derived>
BinaryMask threshold_mask(const Eigen::ArrayBase<Derived>& h, typename Derived::Scalar level = 0.5) {
    return (h > level).template cast<std::uint8_t>();
}

inline bool is_binary(const BinaryMask& mask) {
    return (mask <= std::uint8_t(1)).all();
}

}  // namespace elastic
