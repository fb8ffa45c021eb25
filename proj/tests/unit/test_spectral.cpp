#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <thread>
#include <vector>

#include <doctest.h>

#include "elastic/spectral.hpp"

using namespace elastic;

namespace {

ScalarField2D random_field(std::uint64_t seed, Eigen::Index h, Eigen::Index w) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    ScalarField2D f(h, w);
    for (auto& v : f.reshaped()) v = n(rng);
    return f;
}

// Textbook DFT with the same unitary scaling, used as an independent oracle.
SpectralField2D naive_dft(const ScalarField2D& f) {
    const Eigen::Index h = f.rows(), w = f.cols();
    SpectralField2D out(h, w);
    for (Eigen::Index u = 0; u < h; ++u)
        for (Eigen::Index v = 0; v < w; ++v) {
            std::complex<double> acc = 0;
            for (Eigen::Index y = 0; y < h; ++y)
                for (Eigen::Index x = 0; x < w; ++x) {
                    const double a = -2 * std::numbers::pi * (double(u * y) / double(h) + double(v * x) / double(w));
                    acc += f(y, x) * std::polar(1.0, a);
                }
            out(u, v) = acc / std::sqrt(double(h * w));
        }
    return out;
}

}  // namespace

TEST_CASE("dft2: constant field is DC only with modulus c*N") {
    const double c = 1.7;
    const int n = 8;
    const SpectralField2D s = dft2(ScalarField2D::Constant(n, n, c));
    CHECK(std::abs(s(0, 0)) == doctest::Approx(c * n).epsilon(1e-14));
    double rest = 0;
    for (Eigen::Index i = 1; i < s.size(); ++i) rest = std::max(rest, std::abs(s.data()[i]));
    CHECK(rest < 1e-13);
}

TEST_CASE("dft2: unit impulse has a flat spectrum of modulus 1/N") {
    const int n = 16;
    ScalarField2D f = ScalarField2D::Zero(n, n);
    f(0, 0) = 1;
    const SpectralField2D s = dft2(f);
    CHECK(((s.abs() - 1.0 / n).abs() < 1e-15).all());
}

TEST_CASE("dft2 agrees with the textbook transform on rectangular and odd grids") {
    for (auto [h, w] : {std::pair{8, 8}, std::pair{6, 10}, std::pair{7, 5}, std::pair{3, 2}}) {
        const ScalarField2D f = random_field(3 + h * w, h, w);
        const SpectralField2D fast = dft2(f);
        const SpectralField2D slow = naive_dft(f);
        CHECK((fast - slow).abs().maxCoeff() < 1e-12);
        CHECK(is_hermitian(fast, 1e-12));
    }
}

TEST_CASE("Parseval and round trip on random fields up to 256x256") {
    for (int n : {8, 16, 33, 64, 256}) {
        const ScalarField2D f = random_field(n, n, n);
        const SpectralField2D s = dft2(f);
        const double direct = f.square().sum();
        const double spectral = s.abs2().sum();
        CHECK(std::abs(direct - spectral) / direct < (n == 8 ? 1e-12 : 1e-10));
        const ScalarField2D back = idft2(s);
        CHECK((back - f).matrix().norm() / f.matrix().norm() < 1e-10);
    }
}

TEST_CASE("idft2: zero spectrum and checkerboard") {
    CHECK((idft2(SpectralField2D(SpectralField2D::Zero(4, 6))) == 0.0).all());

    ScalarField2D checker(8, 8);
    for (Eigen::Index r = 0; r < 8; ++r)
        for (Eigen::Index c = 0; c < 8; ++c) checker(r, c) = double((r + c) % 2);
    const SpectralField2D spec = naive_dft(checker);
    CHECK((idft2(spec) - checker).abs().maxCoeff() < 1e-12);
}

TEST_CASE("idft2 rejects non-Hermitian input") {
    SpectralField2D s = SpectralField2D::Zero(4, 4);
    s(1, 0) = {1.0, 0.0};  // partner bin (3,0) left empty
    CHECK_THROWS_AS(idft2(s), SymmetryViolation);
}

TEST_CASE("transforms reject degenerate sizes") {
    CHECK_THROWS_AS(dft2(ScalarField2D::Zero(1, 8)), InvalidInput);
    CHECK_THROWS_AS(dft2(ScalarField2D::Zero(8, 1)), InvalidInput);
    CHECK_THROWS_AS(idft2(SpectralField2D(SpectralField2D::Zero(1, 1))), InvalidInput);
}

TEST_CASE("FrequencyGrid and halfnorm_multiplier") {
    const FrequencyGrid g(8, 7);
    CHECK(g.freq_m(0) == 0);
    CHECK(g.freq_n(0) == 0);
    CHECK(g.freq_m(4) == 4);   // even size: Nyquist at +N/2
    CHECK(g.freq_m(5) == -3);
    CHECK(g.freq_n(3) == 3);   // odd size: symmetric range
    CHECK(g.freq_n(4) == -3);

    const ScalarField2D w = halfnorm_multiplier(FrequencyGrid(16, 16));
    CHECK(w(0, 0) == 0.0);
    CHECK(w(3, 4) == 5.0);
    CHECK((w >= 0.0).all());
    for (Eigen::Index r = 0; r < 16; ++r)
        for (Eigen::Index c = 0; c < 16; ++c) {
            // (m,n) -> (-m,-n), excluding Nyquist self-pairs whose sign flips.
            if (r == 8 || c == 8) continue;
            CHECK(w(r, c) == w((16 - r) % 16, (16 - c) % 16));
        }
}

TEST_CASE("multiplier annihilates constants") {
    const ScalarField2D w = halfnorm_multiplier(FrequencyGrid(12, 12));
    const SpectralField2D s = dft2(ScalarField2D::Constant(12, 12, -4.2));
    CHECK((w * s.abs2()).sum() < 1e-24);
}

TEST_CASE("concurrent transforms give identical results") {
    const ScalarField2D f = random_field(99, 64, 48);
    const SpectralField2D ref = dft2(f);
    std::vector<SpectralField2D> out(4);
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < out.size(); ++i) pool.emplace_back([&, i] { out[i] = dft2(f); });
    for (auto& t : pool) t.join();
    for (const auto& s : out) CHECK((s - ref).abs().maxCoeff() == 0.0);
}
