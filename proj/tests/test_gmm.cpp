#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mlad/error.hpp"
#include "mlad/gmm.hpp"
#include "mlad/gradcheck.hpp"
#include "mlad/rng.hpp"

using namespace mlad;

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

Tensor random_tensor(std::vector<int> shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
    Tensor t = Tensor::zeros(std::move(shape));
    for (auto& v : t.data()) v = rng.uniform(lo, hi);
    return t;
}

// Rows on the simplex for estimation inputs.
Tensor random_memberships(int n, int k, Rng& rng) {
    Tensor y = Tensor::zeros({n, k});
    for (int i = 0; i < n; ++i) {
        double sum = 0.0;
        for (int j = 0; j < k; ++j) sum += (y.at(i, j) = rng.uniform(0.05, 1.0));
        for (int j = 0; j < k; ++j) y.at(i, j) /= sum;
    }
    return y;
}

} // namespace

TEST_CASE("membership: singleton head, uniform head, simplex rows") {
    Rng rng(1);
    {
        MembershipHead head = MembershipHead::init(3, 1, 1.5, rng);
        const auto y = membership_plain({0.3, -0.2, 0.9}, head.W_h->value, head.b->value, 1.5);
        CHECK(y == std::vector<double>{1.0});
    }
    {
        MembershipHead head = MembershipHead::init(3, 4, 1.5, rng);
        head.W_h->value = Tensor::zeros({3, 4});
        head.b->value = Tensor::zeros({1, 4});
        const auto y = membership_plain({1.0, 2.0, 3.0}, head.W_h->value, head.b->value, 1.5);
        for (double v : y) CHECK(v == doctest::Approx(0.25).epsilon(1e-9));
    }
    MembershipHead head = MembershipHead::init(4, 3, 1.5, rng);
    for (int trial = 0; trial < 100; ++trial) {
        const Tensor h = random_tensor({1, 4}, rng, -3.0, 3.0);
        const auto y =
            membership_plain(h.data(), head.W_h->value, head.b->value, head.alpha);
        double sum = 0.0;
        for (double v : y) {
            CHECK(v >= 0.0);
            sum += v;
        }
        CHECK(std::abs(sum - 1.0) <= 1e-8);
    }
}

TEST_CASE("estimate reproduces hand-computed statistics") {
    const double eps = 1e-6;
    {
        // Two points, one component: mean (1,0), covariance [[1,0],[0,0]] + eps I.
        Tensor H = Tensor::from({2, 2}, {0, 0, 2, 0});
        Tensor Y = Tensor::full({2, 1}, 1.0);
        const GmmStats s = estimate(H, Y, eps);
        CHECK(s.phi == std::vector<double>{1.0});
        CHECK(s.mu.at(0, 0) == doctest::Approx(1.0));
        CHECK(s.mu.at(0, 1) == doctest::Approx(0.0));
        CHECK(s.sigma[0].at(0, 0) == doctest::Approx(1.0 + eps));
        CHECK(s.sigma[0].at(0, 1) == doctest::Approx(0.0));
        CHECK(s.sigma[0].at(1, 1) == doctest::Approx(eps));
    }
    {
        // Identical points collapse the scatter to eps I exactly.
        Tensor H = Tensor::from({3, 2}, {0.5, -1, 0.5, -1, 0.5, -1});
        Tensor Y = Tensor::full({3, 1}, 1.0);
        const GmmStats s = estimate(H, Y, eps);
        CHECK(s.sigma[0].at(0, 0) == doctest::Approx(eps));
        CHECK(s.sigma[0].at(1, 1) == doctest::Approx(eps));
        CHECK(s.sigma[0].at(0, 1) == 0.0);
    }
    {
        // Hard memberships split two clusters; means equal cluster averages.
        Tensor H = Tensor::from({4, 2}, {0, 0, 0, 2, 10, 0, 10, 4});
        Tensor Y = Tensor::from({4, 2}, {1, 0, 1, 0, 0, 1, 0, 1});
        const GmmStats s = estimate(H, Y, eps);
        CHECK(s.phi[0] == doctest::Approx(0.5));
        CHECK(s.phi[1] == doctest::Approx(0.5));
        CHECK(s.mu.at(0, 0) == doctest::Approx(0.0));
        CHECK(s.mu.at(0, 1) == doctest::Approx(1.0));
        CHECK(s.mu.at(1, 0) == doctest::Approx(10.0));
        CHECK(s.mu.at(1, 1) == doctest::Approx(2.0));
    }
    CHECK_THROWS_AS(estimate(Tensor::zeros({1, 2}), Tensor::zeros({1, 1}), eps),
                    ContractError);
}

TEST_CASE("zero-membership components go inactive") {
    Tensor H = Tensor::from({2, 2}, {0, 0, 1, 1});
    Tensor Y = Tensor::from({2, 2}, {1, 0, 1, 0});
    const GmmStats s = estimate(H, Y, 1e-6);
    CHECK(s.active[0]);
    CHECK_FALSE(s.active[1]);
    CHECK(s.phi[1] == 0.0);
    CHECK(std::isfinite(energy({0.0, 0.0}, s)));

    CHECK_THROWS_AS(estimate(H, Tensor::zeros({2, 2}), 1e-6), NumericError);
}

TEST_CASE("energy at the mode of a standard gaussian is log(2 pi)") {
    GmmStats s;
    s.phi = {1.0};
    s.mu = Tensor::zeros({1, 2});
    s.sigma = {Tensor::eye(2)};
    s.active = {true};
    CHECK(std::abs(energy({0.0, 0.0}, s) - std::log(2.0 * 3.14159265358979323846)) < 1e-9);
    CHECK(energy({3.0, 0.0}, s) > energy({1.0, 0.0}, s));
}

TEST_CASE("two symmetric components give a reflection-symmetric energy") {
    GmmStats s;
    s.phi = {0.5, 0.5};
    s.mu = Tensor::from({2, 1}, {-2.0, 2.0});
    s.sigma = {Tensor::eye(1, 0.7), Tensor::eye(1, 0.7)};
    s.active = {true, true};
    for (double x : {0.3, 1.1, 2.5}) {
        CHECK(energy({x}, s) == doctest::Approx(energy({-x}, s)).epsilon(1e-12));
    }
}

TEST_CASE("energy is invariant to permuting components") {
    Rng rng(5);
    GmmStats s;
    s.phi = {0.2, 0.5, 0.3};
    s.mu = random_tensor({3, 3}, rng);
    for (int k = 0; k < 3; ++k) {
        Tensor m = random_tensor({3, 3}, rng, -0.5, 0.5);
        Tensor a = Tensor::eye(3, 0.8);
        mm_tn(m.raw(), m.raw(), a.raw(), 3, 3, 3);
        s.sigma.push_back(a);
    }
    s.active = {true, true, true};

    GmmStats permuted;
    permuted.phi = {s.phi[2], s.phi[0], s.phi[1]};
    permuted.mu = Tensor::zeros({3, 3});
    for (int j = 0; j < 3; ++j) {
        permuted.mu.at(0, j) = s.mu.at(2, j);
        permuted.mu.at(1, j) = s.mu.at(0, j);
        permuted.mu.at(2, j) = s.mu.at(1, j);
    }
    permuted.sigma = {s.sigma[2], s.sigma[0], s.sigma[1]};
    permuted.active = {true, true, true};

    for (int trial = 0; trial < 10; ++trial) {
        const Tensor h = random_tensor({1, 3}, rng, -2.0, 2.0);
        CHECK(energy(h.data(), s) == doctest::Approx(energy(h.data(), permuted)).epsilon(1e-12));
    }
}

TEST_CASE("isotropic single component: energy is affine in squared distance") {
    const double s2 = 0.6;
    GmmStats s;
    s.phi = {1.0};
    s.mu = Tensor::from({1, 2}, {1.0, -1.0});
    s.sigma = {Tensor::eye(2, s2)};
    s.active = {true};
    // E(h) = 0.5*||h-mu||^2/s2 + log(2 pi) + log(s2).
    Rng rng(6);
    for (int trial = 0; trial < 20; ++trial) {
        const double a = rng.uniform(-3, 3);
        const double b = rng.uniform(-3, 3);
        const double dist2 = (a - 1.0) * (a - 1.0) + (b + 1.0) * (b + 1.0);
        const double expected = 0.5 * dist2 / s2 + kLog2Pi + std::log(s2);
        CHECK(energy({a, b}, s) == doctest::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("estimate then energy stays finite on the estimating batch") {
    Rng rng(7);
    const Tensor H = random_tensor({40, 4}, rng, -2.0, 2.0);
    const Tensor Y = random_memberships(40, 3, rng);
    const GmmStats s = estimate(H, Y, 1e-6);
    for (int i = 0; i < 40; ++i) {
        CHECK(std::isfinite(energy(H.row(i), s)));
    }
}

TEST_CASE("covariance penalty values and monotonicity") {
    GmmStats s;
    s.phi = {1.0};
    s.mu = Tensor::zeros({1, 2});
    s.sigma = {Tensor::eye(2)};
    s.active = {true};
    CHECK(cov_penalty(s) == doctest::Approx(2.0));

    s.sigma[0] = Tensor::from({2, 2}, {0.5, 0, 0, 2.0});
    CHECK(cov_penalty(s) == doctest::Approx(2.5));

    s.sigma[0].at(0, 0) = 0.25; // shrinking a diagonal entry raises the penalty
    CHECK(cov_penalty(s) == doctest::Approx(4.5));
}

TEST_CASE("graph terms agree with the plain route") {
    Rng rng(8);
    const Tensor H = random_tensor({12, 3}, rng, -1.5, 1.5);
    const Tensor Y = random_memberships(12, 2, rng);
    const GmmStats s = estimate(H, Y, 1e-6);

    const GmmGraph gg = gmm_graph_terms(ad::constant(H), ad::constant(Y), 1e-6);
    for (int i = 0; i < 12; ++i) {
        CHECK(gg.energies->value.data()[static_cast<std::size_t>(i)] ==
              doctest::Approx(energy(H.row(i), s)).epsilon(1e-9));
    }
    CHECK(gg.penalty->value.data()[0] == doctest::Approx(cov_penalty(s)).epsilon(1e-9));
}

TEST_CASE("mean batch energy is differentiable in codes and memberships") {
    Rng rng(9);
    auto H = ad::leaf(random_tensor({6, 3}, rng, -1.0, 1.0), "H");
    // Memberships enter through an entmax head so perturbations stay valid.
    auto W = ad::leaf(random_tensor({3, 2}, rng, -0.8, 0.8), "W");
    EntmaxConfig ecfg;
    ecfg.alpha = 1.0; // softmax memberships keep every component active
    const auto f = [&] {
        auto Y = ad::entmax_rows(ad::matmul(H, W), ecfg);
        const GmmGraph gg = gmm_graph_terms(H, Y, 1e-4);
        return ad::add(ad::scale(ad::sum(gg.energies), 1.0 / 6.0),
                       ad::scale(gg.penalty, 0.01));
    };
    CHECK(ad::grad_check(f, {H, W}, 1e-5) < 1e-4);
}
