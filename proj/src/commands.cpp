#include "elastic/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ostream>
#include <random>
#include <sstream>

#include "elastic/elastic.hpp"
#include "elastic/io.hpp"

namespace elastic::cli {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
    return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

// Portable uniform draw in [0,1) from the raw 64-bit engine output.
double unit_draw(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

Smoothing parse_kind(const std::string& kind) {
    if (kind == "hardtanh") return Smoothing::HardTanh;
    if (kind == "sine") return Smoothing::Sine;
    throw InvalidInput("unknown smoothing kind '" + kind + "' (expected hardtanh or sine)");
}

ElasticParams<double> make_params(double alpha, double beta, const std::string& kind) {
    ElasticParams<double> p;
    p.alpha = alpha;
    p.smoothing = {beta, parse_kind(kind)};
    detail::require_params(p);
    return p;
}

template <typename Fn>
int guarded(std::ostream& err, const char* command, Fn&& body) {
    try {
        return body();
    } catch (const io::IoError& e) {
        err << command << ": " << e.what() << '\n';
        return kInputError;
    } catch (const SizeLimit& e) {
        err << command << ": " << e.what() << '\n';
        return kSizeLimit;
    } catch (const InvalidInput& e) {
        err << command << ": " << e.what() << '\n';
        return kInputError;
    }
}

void require_same_size(const io::Image8& a, const io::Image8& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw InvalidInput("image sizes differ: " + std::to_string(a.cols()) + "x" + std::to_string(a.rows()) +
                           " vs " + std::to_string(b.cols()) + "x" + std::to_string(b.rows()));
}

template <typename Fn>
double median_ms(int repeats, Fn&& fn) {
    std::vector<double> t;
    for (int i = 0; i < std::max(repeats, 1); ++i) {
        const auto start = Clock::now();
        fn();
        t.push_back(elapsed_ms(start));
    }
    std::sort(t.begin(), t.end());
    const std::size_t n = t.size();
    return n % 2 ? t[n / 2] : 0.5 * (t[n / 2 - 1] + t[n / 2]);
}

}  // namespace

int run_loss(const LossOptions& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, "loss", [&] {
        const auto start = Clock::now();
        const ElasticParams<double> params = make_params(opt.alpha, opt.beta, opt.kind);
        const io::Image8 gt_img = io::read_pgm(opt.gt);
        const io::Image8 pred_img = io::read_pgm(opt.pred);
        require_same_size(gt_img, pred_img);
        const ScalarField2D gt = binary_mask_to_field(io::image_to_mask(gt_img));
        const ScalarField2D phi = levelset_from_prob(io::image_to_unit(pred_img));

        std::optional<double> oracle;
        if (opt.oracle) {
            if (*opt.oracle == "spectral")
                oracle = direct_spectral_oracle(gt, phi, params);
            else if (*opt.oracle == "spatial")
                oracle = spatial_kernel_oracle(gt, phi, params, opt.epsilon);
            else
                throw InvalidInput("unknown oracle '" + *opt.oracle + "' (expected spectral or spatial)");
        }
        const double loss = elastic_loss(gt, phi, params);

        io::RunReport report("loss");
        report.param("gt", opt.gt.string()).param("pred", opt.pred.string());
        report.param("alpha", opt.alpha).param("beta", opt.beta).param("kind", opt.kind);
        report.result("height", double(gt.rows())).result("width", double(gt.cols()));
        report.result("loss", loss);
        if (oracle) {
            const double denom = std::max(std::abs(loss), std::abs(*oracle));
            report.result("oracle", *opt.oracle).result("oracle_value", *oracle);
            report.result("rel_diff", denom > 0 ? std::abs(loss - *oracle) / denom : 0.0);
        }
        report.timing("total", elapsed_ms(start));
        report.print(out);
        return int(kOk);
    });
}

int run_gradcheck(const GradcheckOptions& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, "gradcheck", [&] {
        if (opt.size < 2) throw InvalidInput("--size must be >= 2");
        if (opt.size > kDirectOracleMaxSide)
            throw SizeLimit("--size " + std::to_string(opt.size) + " exceeds " + std::to_string(kDirectOracleMaxSide));
        if (!(opt.eps > 0)) throw InvalidInput("--eps must be positive");
        const ElasticParams<double> params = make_params(opt.alpha, opt.beta, "hardtanh");

        std::mt19937_64 rng(opt.seed);
        ScalarField2D gt(opt.size, opt.size), phi(opt.size, opt.size);
        for (Eigen::Index i = 0; i < gt.size(); ++i) gt.data()[i] = unit_draw(rng) < 0.5 ? 0.0 : 1.0;
        for (Eigen::Index i = 0; i < phi.size(); ++i) phi.data()[i] = opt.beta * (2.0 * unit_draw(rng) - 1.0);

        const auto start = Clock::now();
        const auto rep = gradient_check(gt, phi, params, opt.eps, opt.pixels);
        const bool pass = rep.max_rel_error < 1e-3;

        io::RunReport report("gradcheck");
        report.param("size", double(opt.size)).param("seed", std::to_string(opt.seed)).param("eps", opt.eps);
        report.param("alpha", opt.alpha).param("beta", opt.beta);
        report.result("pixels", double(rep.pixels.size()));
        report.result("max_rel_error", rep.max_rel_error);
        report.result("pass", pass ? "true" : "false");
        report.timing("total", elapsed_ms(start));
        report.print(out);
        return int(pass ? kOk : kCheckFailed);
    });
}

int run_evolve(const EvolveOptions& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, "evolve", [&]() -> int {
        if (opt.steps < 1) throw InvalidInput("--steps must be >= 1");
        if (opt.out.empty()) throw InvalidInput("--out is required");
        EvolveConfig<double> cfg;
        cfg.steps = opt.steps;
        cfg.learning_rate = opt.lr;
        cfg.params = make_params(opt.alpha, opt.beta, opt.kind);
        cfg.snapshot_every = opt.snapshot_every;
        cfg.clamp_phi = opt.clamp;
        cfg.stop_rel_tol = opt.stop_tol;
        detail::require_valid(cfg);

        const io::Image8 gt_img = io::read_pgm(opt.gt);
        const io::Image8 init_img = io::read_pgm(opt.init);
        require_same_size(gt_img, init_img);
        const BinaryMask gt_mask = io::image_to_mask(gt_img);
        const ScalarField2D gt = binary_mask_to_field(gt_mask);
        // The init image is read as the initial smoothed indicator H(phi0).
        const ScalarField2D phi0 = levelset_from_indicator(io::image_to_unit(init_img), cfg.params.smoothing);

        std::error_code ec;
        std::filesystem::create_directories(opt.out, ec);
        if (ec) throw io::IoError("cannot create " + opt.out.string() + ": " + ec.message());

        std::ostringstream csv;
        csv << "step,loss,f1,components\n";
        int final_components = 0;
        double final_f1 = 0;
        const auto observe = [&](int step, const ScalarField2D& phi, double loss) {
            const ScalarField2D h = heaviside_smooth(phi, cfg.params.smoothing);
            final_f1 = confusion_at(gt_mask, h, 0.5).f1;
            final_components = connected_components(threshold_mask(h));
            csv << step << ',' << io::format_number(loss) << ',' << io::format_number(final_f1) << ','
                << final_components << '\n';
        };

        const auto start = Clock::now();
        EvolutionTrace<double> trace;
        try {
            trace = evolve(gt, phi0, cfg, observe);
        } catch (const Divergence& d) {
            io::RunReport report("evolve");
            report.result("status", "diverged").result("step", double(d.step()));
            report.result("last_stable_step", double(d.last_stable_step()));
            report.print(out);
            err << "evolve: " << d.what() << '\n';
            return kDivergence;
        }
        const double run_ms = elapsed_ms(start);

        io::RunReport report("evolve");
        report.param("gt", opt.gt.string()).param("init", opt.init.string());
        report.param("steps", double(opt.steps)).param("lr", opt.lr).param("alpha", opt.alpha);
        report.param("beta", opt.beta).param("kind", opt.kind).param("clamp", opt.clamp);

        const std::filesystem::path loss_path = opt.out / "loss.csv";
        io::write_file_atomic(loss_path, csv.str());
        report.output(loss_path);
        for (std::size_t i = 0; i < trace.snapshots.size(); ++i) {
            char name[64];
            std::snprintf(name, sizeof name, "snapshot_%05d.pgm", trace.snapshot_steps[i]);
            const auto path = opt.out / name;
            io::write_pgm(path, io::unit_to_image(heaviside_smooth(trace.snapshots[i], cfg.params.smoothing)));
            report.output(path);
        }
        const auto mask_path = opt.out / "final_mask.pgm";
        io::write_pgm(mask_path, io::mask_to_image(threshold_mask(heaviside_smooth(trace.final_phi, cfg.params.smoothing))));
        report.output(mask_path);

        report.result("status", "ok");
        report.result("executed_steps", double(trace.stopped_at));
        report.result("initial_loss", trace.losses.front()).result("final_loss", trace.losses.back());
        report.result("final_f1", final_f1).result("final_components", double(final_components));
        report.timing("evolve", run_ms);
        report.print(out);
        return int(kOk);
    });
}

int run_synth(const SynthOptions& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, "synth", [&] {
        if (opt.size < 2) throw InvalidInput("--size must be >= 2");
        if (opt.out.empty()) throw InvalidInput("--out is required");
        BinaryMask mask;
        if (opt.shape == "disk") {
            const double cx = opt.cx.value_or(double(opt.size / 2));
            const double cy = opt.cy.value_or(double(opt.size / 2));
            mask = make_disk(opt.size, Point2<double>(cx, cy), opt.radius);
        } else if (opt.shape == "vessel" || opt.shape == "vessel-gap") {
            mask = make_vessel(opt.size, opt.amplitude, opt.period, opt.width);
            if (opt.shape == "vessel-gap") {
                if (opt.gap < 0) throw InvalidInput("--gap must be non-negative");
                mask = punch_gap(mask, centered_gap(opt.size, opt.gap));
            }
        } else {
            throw InvalidInput("unknown shape '" + opt.shape + "' (expected disk, vessel or vessel-gap)");
        }
        io::write_pgm(opt.out, io::mask_to_image(mask));

        io::RunReport report("synth");
        report.param("shape", opt.shape).param("size", double(opt.size));
        report.output(opt.out);
        report.result("foreground", double(mask.cast<int>().sum()));
        report.result("components", double(connected_components(mask)));
        report.print(out);
        return int(kOk);
    });
}

int run_metrics(const MetricsOptions& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, "metrics", [&] {
        const io::Image8 gt_img = io::read_pgm(opt.gt);
        const io::Image8 pred_img = io::read_pgm(opt.pred);
        require_same_size(gt_img, pred_img);
        const ConfusionMetrics m = compute_metrics(io::image_to_mask(gt_img), io::image_to_unit(pred_img), opt.threshold);

        io::RunReport report("metrics");
        report.param("gt", opt.gt.string()).param("pred", opt.pred.string()).param("threshold", opt.threshold);
        report.result("sensitivity", m.sensitivity).result("specificity", m.specificity);
        report.result("f1", m.f1).result("auc", m.auc);
        report.result("tp", double(m.tp)).result("fp", double(m.fp));
        report.result("tn", double(m.tn)).result("fn", double(m.fn));
        report.print(out);
        return int(kOk);
    });
}

std::vector<BenchRow> bench_rows(const BenchOptions& opt) {
    if (opt.sizes.empty()) throw InvalidInput("--sizes must not be empty");
    for (std::size_t i = 0; i < opt.sizes.size(); ++i) {
        if (opt.sizes[i] < 2) throw InvalidInput("bench sizes must be >= 2");
        if (i > 0 && opt.sizes[i] <= opt.sizes[i - 1]) throw InvalidInput("bench sizes must be strictly ascending");
    }
    const ElasticParams<double> params;
    std::mt19937_64 rng(opt.seed);
    std::vector<BenchRow> rows;
    for (int n : opt.sizes) {
        ScalarField2D gt(n, n), phi(n, n);
        for (Eigen::Index i = 0; i < gt.size(); ++i) gt.data()[i] = unit_draw(rng) < 0.5 ? 0.0 : 1.0;
        for (Eigen::Index i = 0; i < phi.size(); ++i) phi.data()[i] = 0.5 * (2.0 * unit_draw(rng) - 1.0);
        volatile double sink = 0;
        BenchRow row;
        row.size = n;
        row.fft_ms = median_ms(opt.repeats, [&] { sink = elastic_loss(gt, phi, params); });
        if (n <= kDirectOracleMaxSide) {
            row.direct_ms = median_ms(opt.repeats, [&] { sink = direct_spectral_oracle(gt, phi, params); });
            row.ratio = *row.direct_ms / std::max(row.fft_ms, 1e-9);
        }
        (void)sink;
        rows.push_back(row);
    }
    return rows;
}

int run_bench(const BenchOptions& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, "bench", [&] {
        const auto rows = bench_rows(opt);
        out << "size,fft_ms,direct_ms,ratio\n";
        for (const auto& r : rows) {
            out << r.size << ',' << io::format_number(r.fft_ms) << ','
                << (r.direct_ms ? io::format_number(*r.direct_ms) : "") << ','
                << (r.ratio ? io::format_number(*r.ratio) : "") << '\n';
        }
        return int(kOk);
    });
}

}  // namespace elastic::cli
