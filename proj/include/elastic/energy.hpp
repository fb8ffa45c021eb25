#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "elastic/error.hpp"
#include "elastic/field.hpp"
#include "elastic/spectral.hpp"

namespace elastic {

template <typename Scalar>
struct ElasticParams {
    Scalar alpha = Scalar(0.35);
    SmoothingParams<Scalar> smoothing{};
};

template <typename Scalar>
struct LossAndGrad {
    Scalar loss = 0;
    Field<Scalar> grad_phi;  ///< dL/dphi; the curve velocity is its negative.
};

/// Cost guards for the quadratic-time oracles.
inline constexpr Eigen::Index kDirectOracleMaxSide = 64;
inline constexpr Eigen::Index kSpatialOracleMaxSide = 48;

namespace detail {

template <typename Scalar>
void require_params(const ElasticParams<Scalar>& p) {
    if (!(p.alpha > Scalar(0)) || !std::isfinite(p.alpha)) throw InvalidInput("alpha must be positive");
    require_params(p.smoothing);
}

template <typename Derived>
void require_indicator(const Eigen::ArrayBase<Derived>& gt) {
    using Scalar = typename Derived::Scalar;
    const bool binary = gt.unaryExpr([](Scalar v) { return v == Scalar(0) || v == Scalar(1); }).all();
    if (!binary) throw InvalidInput("ground truth must be a {0,1} indicator");
}

template <typename Derived>
void require_max_side(const Eigen::DenseBase<Derived>& a, Eigen::Index limit, const char* who) {
    if (a.rows() > limit || a.cols() > limit)
        throw SizeLimit(std::string(who) + ": grid " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                        " exceeds " + std::to_string(limit) + "x" + std::to_string(limit));
}

}  // namespace detail

/// f = G - alpha * H(phi). The minus sign gives the predicted boundary the
/// orientation opposite to the ground truth, so coincident boundaries cancel.
template <typename GtDerived, typename PhiDerived>
Field<typename GtDerived::Scalar> combined_field(const Eigen::ArrayBase<GtDerived>& gt,
                                                 const Eigen::ArrayBase<PhiDerived>& phi,
                                                 const ElasticParams<typename GtDerived::Scalar>& params) {
    detail::require_same_shape(gt, phi, "combined_field");
    detail::require_params(params);
    detail::require_indicator(gt);
    return gt - params.alpha * heaviside_smooth(phi, params.smoothing);
}

/// Spectral H^{1/2} seminorm sum_{m,n} sqrt(m^2+n^2) |f^_mn|^2 of an arbitrary field.
template <typename Derived>
typename Derived::Scalar halfnorm_energy(const Eigen::ArrayBase<Derived>& f) {
    using Scalar = typename Derived::Scalar;
    const SpectralField<Scalar> spec = dft2(f);
    const Field<Scalar> weight = halfnorm_multiplier<Scalar>(FrequencyGrid(f.rows(), f.cols()));
    return (weight * spec.abs2()).sum();
}

/// Bilinear form behind halfnorm_energy: L(a+b) = L(a) + L(b) + 2 X(a,b).
template <typename A, typename B>
typename A::Scalar cross_energy(const Eigen::ArrayBase<A>& fa, const Eigen::ArrayBase<B>& fb) {
    using Scalar = typename A::Scalar;
    detail::require_same_shape(fa, fb, "cross_energy");
    const SpectralField<Scalar> sa = dft2(fa);
    const SpectralField<Scalar> sb = dft2(fb);
    const Field<Scalar> weight = halfnorm_multiplier<Scalar>(FrequencyGrid(fa.rows(), fa.cols()));
    return (weight * (sa * sb.conjugate()).real()).sum();
}

template <typename GtDerived, typename PhiDerived>
typename GtDerived::Scalar elastic_loss(const Eigen::ArrayBase<GtDerived>& gt, const Eigen::ArrayBase<PhiDerived>& phi,
                                        const ElasticParams<typename GtDerived::Scalar>& params) {
    return halfnorm_energy(combined_field(gt, phi, params));
}

/// Loss together with its exact differential in phi:
///   dL/dphi = -alpha * H'(phi) * idft2(2 sqrt(m^2+n^2) f^).
template <typename GtDerived, typename PhiDerived>
LossAndGrad<typename GtDerived::Scalar> elastic_loss_and_grad(const Eigen::ArrayBase<GtDerived>& gt,
                                                              const Eigen::ArrayBase<PhiDerived>& phi,
                                                              const ElasticParams<typename GtDerived::Scalar>& params) {
    using Scalar = typename GtDerived::Scalar;
    const Field<Scalar> f = combined_field(gt, phi, params);
    SpectralField<Scalar> spec = dft2(f);
    const Field<Scalar> weight = halfnorm_multiplier<Scalar>(FrequencyGrid(f.rows(), f.cols()));

    LossAndGrad<Scalar> out;
    out.loss = (weight * spec.abs2()).sum();
    spec *= (Scalar(2) * weight).template cast<std::complex<Scalar>>();
    const Field<Scalar> dl_df = idft2(spec);
    out.grad_phi = -params.alpha * heaviside_derivative(phi, params.smoothing) * dl_df;
    return out;
}

/// The same quadratic form as elastic_loss, but with the transform
/// evaluated from its definition (O(N^2) per bin). Sides up to 64.
template <typename GtDerived, typename PhiDerived>
typename GtDerived::Scalar direct_spectral_oracle(const Eigen::ArrayBase<GtDerived>& gt,
                                                  const Eigen::ArrayBase<PhiDerived>& phi,
                                                  const ElasticParams<typename GtDerived::Scalar>& params) {
    using Scalar = typename GtDerived::Scalar;
    using Complex = std::complex<Scalar>;
    detail::require_max_side(gt, kDirectOracleMaxSide, "direct_spectral_oracle");
    const Field<Scalar> f = combined_field(gt, phi, params);
    const Eigen::Index h = f.rows();
    const Eigen::Index w = f.cols();

    auto twiddles = [](Eigen::Index n) {
        std::vector<Complex> t(static_cast<std::size_t>(n));
        for (Eigen::Index k = 0; k < n; ++k) {
            const Scalar angle = -Scalar(2) * std::numbers::pi_v<Scalar> * Scalar(k) / Scalar(n);
            t[static_cast<std::size_t>(k)] = Complex(std::cos(angle), std::sin(angle));
        }
        return t;
    };
    const auto tr = twiddles(h);
    const auto tc = twiddles(w);

    Scalar total = 0;
    for (Eigen::Index u = 0; u < h; ++u) {
        const Scalar m = Scalar(u <= h / 2 ? u : u - h);
        for (Eigen::Index v = 0; v < w; ++v) {
            const Scalar n = Scalar(v <= w / 2 ? v : v - w);
            Complex coeff(0);
            for (Eigen::Index y = 0; y < h; ++y) {
                const Complex ry = tr[static_cast<std::size_t>((u * y) % h)];
                for (Eigen::Index x = 0; x < w; ++x)
                    coeff += f(y, x) * ry * tc[static_cast<std::size_t>((v * x) % w)];
            }
            total += std::sqrt(m * m + n * n) * std::norm(coeff);
        }
    }
    return total / Scalar(h * w);
}

/// Literal real-space double sum (1/8pi) sum_p sum_q grad f(p) . grad f(q) / sqrt(r^2 + eps^2)
/// with central-difference gradients (one-sided at the border). Free-space
/// kernel, so it is comparable with elastic_loss only in ordering. Sides up to 48.
template <typename GtDerived, typename PhiDerived>
typename GtDerived::Scalar spatial_kernel_oracle(const Eigen::ArrayBase<GtDerived>& gt,
                                                 const Eigen::ArrayBase<PhiDerived>& phi,
                                                 const ElasticParams<typename GtDerived::Scalar>& params,
                                                 typename GtDerived::Scalar epsilon = 1) {
    using Scalar = typename GtDerived::Scalar;
    detail::require_max_side(gt, kSpatialOracleMaxSide, "spatial_kernel_oracle");
    if (!(epsilon > Scalar(0))) throw InvalidInput("epsilon must be positive");
    const Field<Scalar> f = combined_field(gt, phi, params);
    const Eigen::Index h = f.rows();
    const Eigen::Index w = f.cols();

    struct Sample {
        Scalar x, y, gx, gy;
    };
    std::vector<Sample> samples;
    for (Eigen::Index r = 0; r < h; ++r) {
        for (Eigen::Index c = 0; c < w; ++c) {
            const Eigen::Index cl = std::max<Eigen::Index>(c - 1, 0), cr = std::min<Eigen::Index>(c + 1, w - 1);
            const Eigen::Index ru = std::max<Eigen::Index>(r - 1, 0), rd = std::min<Eigen::Index>(r + 1, h - 1);
            const Scalar gx = (f(r, cr) - f(r, cl)) / Scalar(cr - cl);
            const Scalar gy = (f(rd, c) - f(ru, c)) / Scalar(rd - ru);
            if (gx != Scalar(0) || gy != Scalar(0)) samples.push_back({Scalar(c), Scalar(r), gx, gy});
        }
    }

    const Scalar eps2 = epsilon * epsilon;
    Scalar total = 0;
    for (const Sample& p : samples) {
        Scalar row = 0;
        for (const Sample& q : samples) {
            const Scalar dx = p.x - q.x;
            const Scalar dy = p.y - q.y;
            row += (p.gx * q.gx + p.gy * q.gy) / std::sqrt(dx * dx + dy * dy + eps2);
        }
        total += row;
    }
    return total / (Scalar(8) * std::numbers::pi_v<Scalar>);
}

template <typename Scalar>
struct GradCheckReport {
    Scalar max_rel_error = 0;
    std::vector<Eigen::Index> pixels;  ///< Flat row-major indices that were probed.
};

/// Compares the analytic gradient with central differences of elastic_loss
/// at the `count` band pixels of largest analytic |dL/dphi|.
template <typename GtDerived, typename PhiDerived>
GradCheckReport<typename GtDerived::Scalar> gradient_check(const Eigen::ArrayBase<GtDerived>& gt,
                                                           const Eigen::ArrayBase<PhiDerived>& phi,
                                                           const ElasticParams<typename GtDerived::Scalar>& params,
                                                           typename GtDerived::Scalar step, int count = 20) {
    using Scalar = typename GtDerived::Scalar;
    if (!(step > Scalar(0))) throw InvalidInput("finite-difference step must be positive");
    const LossAndGrad<Scalar> lg = elastic_loss_and_grad(gt, phi, params);

    std::vector<Eigen::Index> order;
    Field<Scalar> probe = phi;
    for (Eigen::Index i = 0; i < probe.size(); ++i)
        if (std::abs(probe.data()[i]) <= params.smoothing.beta && lg.grad_phi.data()[i] != Scalar(0))
            order.push_back(i);
    const auto take = std::min<std::size_t>(order.size(), static_cast<std::size_t>(std::max(count, 0)));
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                      [&](Eigen::Index a, Eigen::Index b) {
                          return std::abs(lg.grad_phi.data()[a]) > std::abs(lg.grad_phi.data()[b]);
                      });
    order.resize(take);

    GradCheckReport<Scalar> report;
    report.pixels = order;
    for (Eigen::Index i : order) {
        const Scalar saved = probe.data()[i];
        probe.data()[i] = saved + step;
        const Scalar up = elastic_loss(gt, probe, params);
        probe.data()[i] = saved - step;
        const Scalar down = elastic_loss(gt, probe, params);
        probe.data()[i] = saved;
        const Scalar fd = (up - down) / (Scalar(2) * step);
        const Scalar analytic = lg.grad_phi.data()[i];
        report.max_rel_error = std::max(report.max_rel_error, std::abs(fd - analytic) / std::abs(analytic));
    }
    return report;
}

}  // namespace elastic
