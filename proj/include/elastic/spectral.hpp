#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "elastic/error.hpp"
#include "elastic/field.hpp"

namespace elastic {

template <typename Scalar>
using SpectralField = Eigen::Array<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using SpectralField2D = SpectralField<double>;

/// Integer frequencies (cycles per domain) of each DFT bin in standard
/// ordering: bin i maps to i for i <= N/2 and to i - N above.
struct FrequencyGrid {
    Eigen::Index height = 0;
    Eigen::Index width = 0;

    FrequencyGrid(Eigen::Index h, Eigen::Index w) : height(h), width(w) {
        if (h < 1 || w < 1) throw InvalidInput("frequency grid needs positive extents");
    }

    static Eigen::Index frequency(Eigen::Index bin, Eigen::Index n) { return bin <= n / 2 ? bin : bin - n; }
    Eigen::Index freq_m(Eigen::Index row) const { return frequency(row, height); }
    Eigen::Index freq_n(Eigen::Index col) const { return frequency(col, width); }
};

/// Per-bin weight sqrt(m^2 + n^2); zero at DC.
template <typename Scalar = double>
Field<Scalar> halfnorm_multiplier(const FrequencyGrid& grid) {
    Field<Scalar> w(grid.height, grid.width);
    for (Eigen::Index r = 0; r < grid.height; ++r) {
        const auto m = static_cast<Scalar>(grid.freq_m(r));
        for (Eigen::Index c = 0; c < grid.width; ++c) {
            const auto n = static_cast<Scalar>(grid.freq_n(c));
            w(r, c) = std::sqrt(m * m + n * n);
        }
    }
    return w;
}

namespace detail {

// Separable 2-D transform through 1-D passes. The Eigen::FFT object owns its
// plan cache, so one is created per call and nothing is shared across threads.
template <typename Scalar>
void transform_inplace(SpectralField<Scalar>& a, bool inverse) {
    using Complex = std::complex<Scalar>;
    Eigen::FFT<Scalar> fft;
    fft.SetFlag(Eigen::FFT<Scalar>::Unscaled);
    const Eigen::Index h = a.rows();
    const Eigen::Index w = a.cols();

    std::vector<Complex> in(static_cast<std::size_t>(std::max(h, w)));
    std::vector<Complex> out(in.size());
    auto run = [&](Eigen::Index n) {
        if (inverse)
            fft.inv(out.data(), in.data(), n);
        else
            fft.fwd(out.data(), in.data(), n);
    };

    for (Eigen::Index r = 0; r < h; ++r) {
        Complex* row = a.data() + r * w;
        std::copy(row, row + w, in.begin());
        run(w);
        std::copy(out.begin(), out.begin() + w, row);
    }
    for (Eigen::Index c = 0; c < w; ++c) {
        for (Eigen::Index r = 0; r < h; ++r) in[static_cast<std::size_t>(r)] = a(r, c);
        run(h);
        for (Eigen::Index r = 0; r < h; ++r) a(r, c) = out[static_cast<std::size_t>(r)];
    }
    a *= Scalar(1) / std::sqrt(static_cast<Scalar>(h * w));
}

template <typename Derived>
void require_transformable(const Eigen::DenseBase<Derived>& a) {
    if (a.rows() < 2 || a.cols() < 2) throw InvalidInput("transform needs height and width >= 2");
}

}  // namespace detail

/// Unitary 2-D DFT: sum |f|^2 == sum |f^|^2.
template <typename Derived>
SpectralField<typename Derived::Scalar> dft2(const Eigen::ArrayBase<Derived>& field) {
    using Scalar = typename Derived::Scalar;
    detail::require_transformable(field);
    detail::require_finite(field, "field");
    SpectralField<Scalar> spec = field.template cast<std::complex<Scalar>>();
    detail::transform_inplace(spec, false);
    return spec;
}

/// Complex inverse transform without the symmetry check.
template <typename Scalar>
SpectralField<Scalar> idft2_complex(SpectralField<Scalar> spec) {
    detail::require_transformable(spec);
    detail::transform_inplace(spec, true);
    return spec;
}

/// Inverse of dft2 for Hermitian spectra. Throws SymmetryViolation when the
/// imaginary residue exceeds 1e-8 of the output norm.
template <typename Scalar>
Field<Scalar> idft2(const SpectralField<Scalar>& spec) {
    SpectralField<Scalar> z = idft2_complex(spec);
    const Scalar norm = z.abs().matrix().norm();
    const Scalar residue = z.imag().matrix().norm();
    if (residue > Scalar(1e-8) * norm)
        throw SymmetryViolation("spectrum is not Hermitian: imaginary residue " + std::to_string(residue) +
                                " against norm " + std::to_string(norm));
    return z.real();
}

/// True when coeff(-m,-n) == conj(coeff(m,n)) to the given absolute tolerance.
template <typename Scalar>
bool is_hermitian(const SpectralField<Scalar>& spec, Scalar tol) {
    const Eigen::Index h = spec.rows();
    const Eigen::Index w = spec.cols();
    for (Eigen::Index r = 0; r < h; ++r)
        for (Eigen::Index c = 0; c < w; ++c)
            if (std::abs(spec((h - r) % h, (w - c) % w) - std::conj(spec(r, c))) > tol) return false;
    return true;
}

}  // namespace elastic
