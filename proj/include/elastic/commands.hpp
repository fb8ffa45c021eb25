#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace elastic::cli {

/// Process exit codes shared by every command.
enum ExitCode : int {
    kOk = 0,
    kCheckFailed = 1,
    kInputError = 2,
    kSizeLimit = 3,
    kDivergence = 4,
};

struct LossOptions {
    std::filesystem::path gt;
    std::filesystem::path pred;
    double alpha = 0.35;
    double beta = 0.25;
    std::string kind = "hardtanh";
    std::optional<std::string> oracle;  ///< "spectral" or "spatial"
    double epsilon = 1.0;               ///< Spatial oracle core length, pixels.
};

struct GradcheckOptions {
    int size = 16;
    std::uint64_t seed = 7;
    double eps = 1e-5;
    double alpha = 0.35;
    double beta = 0.25;
    int pixels = 20;
};

struct EvolveOptions {
    std::filesystem::path gt;
    std::filesystem::path init;
    int steps = 500;
    double lr = 2.5e-3;
    double alpha = 0.35;
    double beta = 0.25;
    std::string kind = "hardtanh";
    std::filesystem::path out;
    int snapshot_every = 50;
    double clamp = 1.0;
    double stop_tol = 0.0;
};

struct SynthOptions {
    std::string shape = "disk";  ///< disk | vessel | vessel-gap
    int size = 64;
    double radius = 8;
    std::optional<double> cx, cy;
    double amplitude = 10;
    double period = 64;
    double width = 3;
    int gap = 6;
    std::filesystem::path out;
};

struct MetricsOptions {
    std::filesystem::path gt;
    std::filesystem::path pred;
    double threshold = 0.5;
};

struct BenchOptions {
    std::vector<int> sizes{16, 32, 64, 128, 256, 512};
    int repeats = 5;
    std::uint64_t seed = 1;
};

int run_loss(const LossOptions& opt, std::ostream& out, std::ostream& err);
int run_gradcheck(const GradcheckOptions& opt, std::ostream& out, std::ostream& err);
int run_evolve(const EvolveOptions& opt, std::ostream& out, std::ostream& err);
int run_synth(const SynthOptions& opt, std::ostream& out, std::ostream& err);
int run_metrics(const MetricsOptions& opt, std::ostream& out, std::ostream& err);
int run_bench(const BenchOptions& opt, std::ostream& out, std::ostream& err);

/// Row of the bench CSV; direct_ms and ratio are absent above the oracle's size limit.
struct BenchRow {
    int size = 0;
    double fft_ms = 0;
    std::optional<double> direct_ms;
    std::optional<double> ratio;
};

/// Median-of-repeats timings of the FFT loss and the direct-transform oracle.
std::vector<BenchRow> bench_rows(const BenchOptions& opt);

}  // namespace elastic::cli
