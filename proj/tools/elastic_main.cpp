// elastic: command-line front end for the elastic-interaction loss engine.

#include <iostream>

#include <CLI11.hpp>

#include "elastic/commands.hpp"

int main(int argc, char** argv) {
    using namespace elastic::cli;

    CLI::App app{"Elastic-interaction boundary loss: evaluation, gradient checks, gradient flow, synthetic data"};
    app.require_subcommand(1);

    LossOptions loss;
    auto* loss_cmd = app.add_subcommand("loss", "Evaluate the loss of a prediction against a ground-truth mask");
    loss_cmd->add_option("--gt", loss.gt, "Ground-truth PGM (>=128 is foreground)")->required();
    loss_cmd->add_option("--pred", loss.pred, "Prediction PGM read as probability (intensity/255)")->required();
    loss_cmd->add_option("--alpha", loss.alpha, "Prediction weight")->capture_default_str();
    loss_cmd->add_option("--beta", loss.beta, "Heaviside half-width")->capture_default_str();
    loss_cmd->add_option("--kind", loss.kind, "hardtanh or sine")->capture_default_str();
    loss_cmd->add_option("--oracle", loss.oracle, "Also evaluate an oracle: spectral or spatial");
    loss_cmd->add_option("--epsilon", loss.epsilon, "Spatial oracle core length (pixels)")->capture_default_str();

    GradcheckOptions gc;
    auto* gc_cmd = app.add_subcommand("gradcheck", "Analytic gradient versus central differences on a random instance");
    gc_cmd->add_option("--size", gc.size, "Grid side (<= 64)")->capture_default_str();
    gc_cmd->add_option("--seed", gc.seed, "RNG seed")->capture_default_str();
    gc_cmd->add_option("--eps", gc.eps, "Finite-difference step")->capture_default_str();
    gc_cmd->add_option("--alpha", gc.alpha)->capture_default_str();
    gc_cmd->add_option("--beta", gc.beta)->capture_default_str();
    gc_cmd->add_option("--pixels", gc.pixels, "Pixels probed")->capture_default_str();

    EvolveOptions ev;
    auto* ev_cmd = app.add_subcommand("evolve", "Gradient flow of the level set toward the ground truth");
    ev_cmd->add_option("--gt", ev.gt, "Ground-truth PGM")->required();
    ev_cmd->add_option("--init", ev.init, "Initial indicator PGM (intensity/255 = H(phi0))")->required();
    ev_cmd->add_option("--steps", ev.steps)->capture_default_str();
    ev_cmd->add_option("--lr", ev.lr, "Learning rate")->capture_default_str();
    ev_cmd->add_option("--alpha", ev.alpha)->capture_default_str();
    ev_cmd->add_option("--beta", ev.beta)->capture_default_str();
    ev_cmd->add_option("--kind", ev.kind, "hardtanh or sine")->capture_default_str();
    ev_cmd->add_option("--out", ev.out, "Output directory")->required();
    ev_cmd->add_option("--snapshot-every", ev.snapshot_every)->capture_default_str();
    ev_cmd->add_option("--clamp", ev.clamp, "Bound on |phi| after each step")->capture_default_str();
    ev_cmd->add_option("--stop-tol", ev.stop_tol, "Relative loss change that stops the run")->capture_default_str();

    SynthOptions sy;
    auto* sy_cmd = app.add_subcommand("synth", "Write a synthetic mask");
    sy_cmd->add_option("shape", sy.shape, "disk, vessel or vessel-gap")->required();
    sy_cmd->add_option("--size", sy.size)->capture_default_str();
    sy_cmd->add_option("--radius", sy.radius)->capture_default_str();
    sy_cmd->add_option("--cx", sy.cx, "Disk centre column (default size/2)");
    sy_cmd->add_option("--cy", sy.cy, "Disk centre row (default size/2)");
    sy_cmd->add_option("--amplitude", sy.amplitude)->capture_default_str();
    sy_cmd->add_option("--period", sy.period)->capture_default_str();
    sy_cmd->add_option("--width", sy.width)->capture_default_str();
    sy_cmd->add_option("--gap", sy.gap, "Gap width in columns for vessel-gap")->capture_default_str();
    sy_cmd->add_option("--out", sy.out, "Output PGM")->required();

    MetricsOptions me;
    auto* me_cmd = app.add_subcommand("metrics", "Sensitivity, specificity, F1 and AUC");
    me_cmd->add_option("--gt", me.gt)->required();
    me_cmd->add_option("--pred", me.pred, "Score PGM (intensity/255)")->required();
    me_cmd->add_option("--threshold", me.threshold)->capture_default_str();

    BenchOptions be;
    auto* be_cmd = app.add_subcommand("bench", "Time the FFT loss against the direct-transform oracle");
    be_cmd->add_option("--sizes", be.sizes, "Ascending grid sides")->delimiter(',')->capture_default_str();
    be_cmd->add_option("--repeats", be.repeats)->capture_default_str();
    be_cmd->add_option("--seed", be.seed)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kInputError;
    }

    if (*loss_cmd) return run_loss(loss, std::cout, std::cerr);
    if (*gc_cmd) return run_gradcheck(gc, std::cout, std::cerr);
    if (*ev_cmd) return run_evolve(ev, std::cout, std::cerr);
    if (*sy_cmd) return run_synth(sy, std::cout, std::cerr);
    if (*me_cmd) return run_metrics(me, std::cout, std::cerr);
    if (*be_cmd) return run_bench(be, std::cout, std::cerr);
    return kInputError;
}
