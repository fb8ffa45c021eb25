#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <doctest.h>

#include "elastic/evolve.hpp"

using namespace elastic;

namespace {

using P = Point2<double>;

EvolveConfig<double> config(double alpha, double lr, int steps) {
    EvolveConfig<double> cfg;
    cfg.params.alpha = alpha;
    cfg.learning_rate = lr;
    cfg.steps = steps;
    return cfg;
}

BinaryMask predicted(const ScalarField2D& phi, const SmoothingParams<double>& s) {
    return threshold_mask(heaviside_smooth(phi, s));
}

ScalarField2D random_phi(std::uint64_t seed, Eigen::Index n, double bound) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-bound, bound);
    ScalarField2D phi(n, n);
    for (auto& v : phi.reshaped()) v = u(rng);
    return phi;
}

ScalarField2D random_gt(std::uint64_t seed, Eigen::Index n) {
    std::mt19937_64 rng(seed);
    ScalarField2D gt(n, n);
    for (auto& v : gt.reshaped()) v = double(rng() & 1u);
    return gt;
}

}  // namespace

TEST_CASE("evolve: the global minimum is a fixed point") {
    const auto cfg = config(1.0, 2.5e-3, 20);
    const BinaryMask disk = make_disk(64, P(30, 34), 12);
    const auto tr = evolve(binary_mask_to_field(disk), levelset_from_mask(disk, cfg.params.smoothing), cfg);
    CHECK(tr.losses.front() == 0.0);
    for (double l : tr.losses) CHECK(std::abs(l) < 1e-20);
    CHECK((tr.final_phi == levelset_from_mask(disk, cfg.params.smoothing)).all());
    CHECK(tr.metrics.back().f1 == 1.0);
}

TEST_CASE("evolve: trace bookkeeping") {
    const ScalarField2D gt = random_gt(1, 16);
    const ScalarField2D phi0 = random_phi(2, 16, 0.2);
    auto cfg = config(0.35, 1e-3, 7);
    cfg.snapshot_every = 3;
    int calls = 0;
    const auto tr = evolve(gt, phi0, cfg, [&](int k, const ScalarField2D&, double) { CHECK(k == calls++); });
    CHECK(calls == 8);
    CHECK(tr.losses.size() == 8);
    CHECK(tr.stopped_at == 7);
    CHECK(tr.losses.front() == doctest::Approx(elastic_loss(gt, phi0, cfg.params)).epsilon(1e-14));
    CHECK(tr.snapshot_steps == std::vector<int>{0, 3, 6, 7});
    CHECK(tr.snapshots.size() == 4);
    CHECK(tr.metrics.size() == 4);
    CHECK((tr.snapshots.front() == phi0).all());
    CHECK((tr.snapshots.back() == tr.final_phi).all());
    CHECK(tr.final_phi.abs().maxCoeff() <= cfg.clamp_phi);
}

TEST_CASE("evolve: early stop on relative loss change") {
    // With alpha < 1 the minimum is not zero, so the loss plateaus.
    auto cfg = config(0.35, 2.5e-3, 2000);
    cfg.stop_rel_tol = 1e-4;
    const auto tr = evolve(random_gt(9, 32), random_phi(10, 32, 0.2), cfg);
    CHECK(tr.stopped_at < 2000);
    CHECK(tr.losses.size() == std::size_t(tr.stopped_at) + 1);
    const double a = tr.losses[tr.losses.size() - 2], b = tr.losses.back();
    CHECK(std::abs(b - a) / a < 1e-4);
    CHECK(tr.snapshot_steps.back() == tr.stopped_at);
}

TEST_CASE("evolve: rejects bad configurations and inputs") {
    const ScalarField2D gt = random_gt(3, 8);
    const ScalarField2D phi = random_phi(4, 8, 0.2);
    auto bad = [&](auto mutate) {
        auto cfg = config(0.35, 1e-3, 5);
        mutate(cfg);
        CHECK_THROWS_AS(evolve(gt, phi, cfg), InvalidInput);
    };
    bad([](auto& c) { c.steps = 0; });
    bad([](auto& c) { c.learning_rate = 0; });
    bad([](auto& c) { c.learning_rate = std::numeric_limits<double>::infinity(); });
    bad([](auto& c) { c.snapshot_every = 0; });
    bad([](auto& c) { c.stop_rel_tol = -1; });
    bad([](auto& c) { c.clamp_phi = 0.1; });
    CHECK_THROWS_AS(evolve(gt, ScalarField2D(ScalarField2D::Zero(8, 9)), config(0.35, 1e-3, 5)), InvalidInput);
    CHECK_THROWS_AS(evolve(ScalarField2D(gt * 0.5), phi, config(0.35, 1e-3, 5)), InvalidInput);
}

TEST_CASE("evolve: divergence reports the failing step") {
    auto cfg = config(0.35, 1e308, 5);
    cfg.clamp_phi = std::numeric_limits<double>::infinity();
    try {
        evolve(random_gt(5, 16), random_phi(6, 16, 0.2), cfg);
        FAIL("expected divergence");
    } catch (const Divergence& d) {
        CHECK(d.step() == 1);
        CHECK(d.last_stable_step() == 0);
    }
}

TEST_CASE("a single small step lowers the loss by lr * |grad|^2") {
    const ScalarField2D gt = random_gt(7, 32);
    const ScalarField2D phi = random_phi(8, 32, 0.2);
    auto cfg = config(0.35, 1.0, 1);
    const auto lg = elastic_loss_and_grad(gt, phi, cfg.params);
    const double g2 = lg.grad_phi.square().sum();
    for (double lr : {1e-6, 1e-7}) {
        cfg.learning_rate = lr;
        const auto tr = evolve(gt, phi, cfg);
        const double ratio = (tr.losses[1] - tr.losses[0]) / (-lr * g2);
        CHECK(ratio > 0.9);
        CHECK(ratio < 1.1);
    }
}

TEST_CASE("a displaced disk is attracted and captured") {
    const auto cfg = config(1.0, 2.5e-3, 300);
    const BinaryMask gt_mask = make_disk(128, P(64, 64), 20);
    const ScalarField2D phi0 = levelset_from_mask(make_disk(128, P(94, 64), 20), cfg.params.smoothing);
    std::vector<double> dist;
    const auto tr = evolve(binary_mask_to_field(gt_mask), phi0, cfg, [&](int k, const ScalarField2D& phi, double) {
        if (k > 50) return;
        const auto c = centroid(predicted(phi, cfg.params.smoothing));
        REQUIRE(c.has_value());
        dist.push_back((*c - P(64, 64)).norm());
    });
    REQUIRE(dist.size() == 51);
    CHECK(dist.front() == doctest::Approx(30));
    for (std::size_t k = 1; k < dist.size(); ++k) CHECK(dist[k] <= dist[k - 1]);
    CHECK(dist.back() < dist.front() - 10);
    CHECK(is_non_increasing(tr.losses));
    CHECK(tr.metrics.back().f1 >= 0.95);
}

TEST_CASE("an unsupported disk shrinks") {
    const auto cfg = config(1.0, 1e-3, 150);
    const ScalarField2D phi0 = levelset_from_mask(make_disk(128, P(64, 64), 20), cfg.params.smoothing);
    std::vector<int> area;
    const auto tr = evolve(ScalarField2D(ScalarField2D::Zero(128, 128)), phi0, cfg, [&](int, const ScalarField2D& phi, double) {
        area.push_back(predicted(phi, cfg.params.smoothing).cast<int>().sum());
    });
    for (std::size_t k = 1; k < area.size(); ++k) CHECK(area[k] <= area[k - 1]);
    CHECK(area.back() < area.front());
    CHECK(is_non_increasing(tr.losses));
}

TEST_CASE("reconnection across a 6 px gap") {
    const auto r = reconnection_experiment(128, 6, config(1.0, 2.5e-3, 500));
    CHECK(r.initial_components == 2);
    CHECK(r.final_components == 1);
    CHECK(r.final_f1 > 0.9);
    CHECK(r.trace.losses.size() == 501);
    CHECK(is_non_increasing(r.trace.losses));
    CHECK_THROWS_AS(reconnection_experiment(128, 32, config(1.0, 2.5e-3, 5)), InvalidInput);
}

TEST_CASE("find_descent_rate") {
    const auto smoothing = config(1.0, 1e-3, 1).params.smoothing;
    std::vector<DescentProblem<double>> problems;
    problems.push_back({binary_mask_to_field(make_disk(64, P(32, 32), 10)),
                        levelset_from_mask(make_disk(64, P(44, 32), 10), smoothing)});
    problems.push_back({ScalarField2D::Zero(64, 64), levelset_from_mask(make_disk(64, P(32, 32), 10), smoothing)});
    const auto base = config(1.0, 1.0, 150);
    const double eta = find_descent_rate(problems, base);
    CHECK(eta > 0);
    CHECK(eta <= 1e-2);
    auto at = base;
    at.learning_rate = eta;
    for (const auto& p : problems) CHECK(is_non_increasing(evolve(p.gt, p.phi0, at).losses));
    if (eta < 1e-2) {
        at.learning_rate = 2 * eta;
        bool all_ok = true;
        for (const auto& p : problems) all_ok = all_ok && is_non_increasing(evolve(p.gt, p.phi0, at).losses);
        CHECK_FALSE(all_ok);
    }
    CHECK_THROWS_AS(find_descent_rate(problems, base, 1e3, 0), InvalidInput);
}

TEST_CASE("is_non_increasing") {
    CHECK(is_non_increasing(std::vector<double>{}));
    CHECK(is_non_increasing(std::vector<double>{3, 2, 2, 1}));
    CHECK_FALSE(is_non_increasing(std::vector<double>{3, 2, 2.1}));
    CHECK(is_non_increasing(std::vector<double>{1, 1 + 1e-14}));
}
