#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "elastic/energy.hpp"
#include "elastic/error.hpp"
#include "elastic/field.hpp"
#include "elastic/metrics.hpp"
#include "elastic/synth.hpp"

namespace elastic {

template <typename Scalar>
struct EvolveConfig {
    int steps = 500;
    Scalar learning_rate = Scalar(2.5e-3);
    ElasticParams<Scalar> params{};
    int snapshot_every = 50;
    Scalar stop_rel_tol = 0;   ///< 0 never stops early.
    Scalar clamp_phi = 1;      ///< |phi| bound after every step; must be >= beta.
};

template <typename Scalar>
struct EvolutionTrace {
    std::vector<Scalar> losses;               ///< losses[k] is the loss after k steps.
    std::vector<int> snapshot_steps;
    std::vector<Field<Scalar>> snapshots;     ///< phi at each snapshot step.
    std::vector<ConfusionMetrics> metrics;    ///< H(phi) against the ground truth, per snapshot.
    int stopped_at = 0;                       ///< Number of executed steps.
    Field<Scalar> final_phi;
};

/// Called after every step with (step, phi, loss); step 0 is the initial state.
template <typename Scalar>
using StepObserver = std::function<void(int, const Field<Scalar>&, Scalar)>;

namespace detail {

template <typename Scalar>
void require_valid(const EvolveConfig<Scalar>& cfg) {
    require(cfg.steps >= 1, "evolve: steps must be >= 1");
    require(cfg.learning_rate > Scalar(0) && std::isfinite(cfg.learning_rate), "evolve: learning rate must be positive");
    require(cfg.snapshot_every >= 1, "evolve: snapshot_every must be >= 1");
    require(cfg.stop_rel_tol >= Scalar(0), "evolve: stop_rel_tol must be non-negative");
    require(cfg.clamp_phi >= cfg.params.smoothing.beta, "evolve: clamp_phi must be >= beta");
    require_params(cfg.params);
}

template <typename Scalar>
BinaryMask to_mask(const Field<Scalar>& f) { return (f != Scalar(0)).template cast<std::uint8_t>(); }

}  // namespace detail

/// Plain gradient descent on phi: phi <- clamp(phi - lr * dL/dphi, +-clamp_phi).
template <typename Scalar>
EvolutionTrace<Scalar> evolve(const Field<Scalar>& gt, const Field<Scalar>& phi0, const EvolveConfig<Scalar>& cfg,
                              const std::type_identity_t<StepObserver<Scalar>>& observer = {}) {
    detail::require_valid(cfg);
    detail::require_same_shape(gt, phi0, "evolve");
    detail::require_indicator(gt);
    const BinaryMask gt_mask = detail::to_mask(gt);

    EvolutionTrace<Scalar> trace;
    Field<Scalar> phi = phi0;
    auto snapshot = [&](int step) {
        trace.snapshot_steps.push_back(step);
        trace.snapshots.push_back(phi);
        trace.metrics.push_back(compute_metrics(gt_mask, heaviside_smooth(phi, cfg.params.smoothing), Scalar(0.5)));
    };

    LossAndGrad<Scalar> lg = elastic_loss_and_grad(gt, phi, cfg.params);
    if (!std::isfinite(lg.loss) || !lg.grad_phi.allFinite()) throw Divergence(0, "non-finite initial loss");
    trace.losses.push_back(lg.loss);
    if (observer) observer(0, phi, lg.loss);
    snapshot(0);

    int k = 1;
    for (; k <= cfg.steps; ++k) {
        phi = (phi - cfg.learning_rate * lg.grad_phi).cwiseMax(-cfg.clamp_phi).cwiseMin(cfg.clamp_phi);
        if (!phi.allFinite()) throw Divergence(k, "non-finite level set");
        lg = elastic_loss_and_grad(gt, phi, cfg.params);
        if (!std::isfinite(lg.loss) || !lg.grad_phi.allFinite()) throw Divergence(k, "non-finite loss");
        trace.losses.push_back(lg.loss);
        if (observer) observer(k, phi, lg.loss);
        if (k % cfg.snapshot_every == 0) snapshot(k);

        const Scalar prev = trace.losses[trace.losses.size() - 2];
        const Scalar rel = std::abs(lg.loss - prev) / std::max(prev, std::numeric_limits<Scalar>::min());
        if (rel < cfg.stop_rel_tol) break;
    }
    trace.stopped_at = std::min(k, cfg.steps);
    if (trace.snapshot_steps.back() != trace.stopped_at) snapshot(trace.stopped_at);
    trace.final_phi = std::move(phi);
    return trace;
}

/// True when no loss exceeds its predecessor by more than rel_slack * losses[0].
template <typename Scalar>
bool is_non_increasing(const std::vector<Scalar>& losses, Scalar rel_slack = Scalar(1e-12)) {
    if (losses.empty()) return true;
    const Scalar slack = rel_slack * std::abs(losses.front());
    for (std::size_t i = 1; i < losses.size(); ++i)
        if (losses[i] > losses[i - 1] + slack) return false;
    return true;
}

template <typename Scalar>
struct DescentProblem {
    Field<Scalar> gt;
    Field<Scalar> phi0;
};

/// Halves the rate from `start` until every problem's loss sequence is
/// non-increasing under `base` (its steps, params and clamp). Throws
/// InvalidInput if no rate down to `start * 2^-max_halvings` qualifies.
template <typename Scalar>
Scalar find_descent_rate(const std::vector<DescentProblem<Scalar>>& problems, EvolveConfig<Scalar> base,
                         Scalar start = Scalar(1e-2), int max_halvings = 30) {
    base.stop_rel_tol = 0;
    base.snapshot_every = std::max(base.snapshot_every, base.steps);
    Scalar rate = start;
    for (int i = 0; i <= max_halvings; ++i, rate /= Scalar(2)) {
        base.learning_rate = rate;
        const bool ok = std::all_of(problems.begin(), problems.end(), [&](const DescentProblem<Scalar>& p) {
            return is_non_increasing(evolve(p.gt, p.phi0, base).losses);
        });
        if (ok) return rate;
    }
    throw InvalidInput("no descent rate found");
}

/// Number of 8-connected foreground components (non-periodic).
inline int connected_components(const BinaryMask& mask) {
    const Eigen::Index h = mask.rows();
    const Eigen::Index w = mask.cols();
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(h * w), 0);
    std::vector<Eigen::Index> stack;
    int count = 0;
    for (Eigen::Index start = 0; start < h * w; ++start) {
        if (!mask.data()[start] || seen[static_cast<std::size_t>(start)]) continue;
        ++count;
        seen[static_cast<std::size_t>(start)] = 1;
        stack.push_back(start);
        while (!stack.empty()) {
            const Eigen::Index p = stack.back();
            stack.pop_back();
            const Eigen::Index r = p / w, c = p % w;
            for (Eigen::Index dr = -1; dr <= 1; ++dr)
                for (Eigen::Index dc = -1; dc <= 1; ++dc) {
                    const Eigen::Index rr = r + dr, cc = c + dc;
                    if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
                    const Eigen::Index q = rr * w + cc;
                    if (mask.data()[q] && !seen[static_cast<std::size_t>(q)]) {
                        seen[static_cast<std::size_t>(q)] = 1;
                        stack.push_back(q);
                    }
                }
        }
    }
    return count;
}

struct ReconnectionResult {
    int initial_components = 0;
    int final_components = 0;
    double final_f1 = 0;
    EvolutionTrace<double> trace;
};

/// A full-width 3-px bar as ground truth, the same bar with a centred gap as
/// the initial prediction, evolved under cfg.
inline ReconnectionResult reconnection_experiment(Eigen::Index size, Eigen::Index gap_px,
                                                  const EvolveConfig<double>& cfg) {
    detail::require(gap_px >= 0 && 4 * gap_px < size, "reconnection: gap must be shorter than a quarter of the bar");
    const BinaryMask gt_mask = make_vessel(size, 0.0, double(size), 3.0);
    const BinaryMask init = punch_gap(gt_mask, centered_gap(size, gap_px));
    const Field<double> gt = binary_mask_to_field(gt_mask);
    const Field<double> phi0 = levelset_from_mask(init, cfg.params.smoothing);

    ReconnectionResult out;
    out.initial_components = connected_components(threshold_mask(heaviside_smooth(phi0, cfg.params.smoothing)));
    out.trace = evolve(gt, phi0, cfg);
    const Field<double> h = heaviside_smooth(out.trace.final_phi, cfg.params.smoothing);
    out.final_components = connected_components(threshold_mask(h));
    out.final_f1 = compute_metrics(gt_mask, h, 0.5).f1;
    return out;
}

}  // namespace elastic
