#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "mlad/kernels.hpp"
#include "mlad/rng.hpp"

using namespace mlad;

namespace {

std::vector<double> random_vec(std::size_t n, Rng& rng) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(-5.0, 5.0);
    return v;
}

const std::vector<std::size_t> kSizes = {0, 1, 2, 3, 4, 5, 7, 8, 15, 16, 17, 64, 1000};

} // namespace

TEST_CASE("scalar backend basics") {
    const auto& be = kern::scalar_backend();
    const double x[] = {1.0, 2.0, 3.0};
    const double y[] = {4.0, 5.0, 6.0};
    CHECK(be.dot(x, y, 3) == doctest::Approx(32.0));
    CHECK(be.sum(x, 3) == doctest::Approx(6.0));
    double z[] = {1.0, 1.0, 1.0};
    be.axpy(2.0, x, z, 3);
    CHECK(z[0] == 3.0);
    CHECK(z[2] == 7.0);
}

TEST_CASE("all_finite flags NaN and Inf anywhere") {
    const auto& be = kern::active();
    Rng rng(11);
    for (std::size_t n : {1ul, 4ul, 5ul, 33ul}) {
        auto v = random_vec(n, rng);
        CHECK(be.all_finite(v.data(), n));
        for (std::size_t pos = 0; pos < n; ++pos) {
            auto bad = v;
            bad[pos] = std::numeric_limits<double>::quiet_NaN();
            CHECK_FALSE(be.all_finite(bad.data(), n));
            bad[pos] = std::numeric_limits<double>::infinity();
            CHECK_FALSE(be.all_finite(bad.data(), n));
        }
    }
}

#if defined(MLAD_HAVE_AVX2)
TEST_CASE("avx2 and scalar backends agree") {
    if (!kern::avx2_supported()) return;
    const auto& sc = kern::scalar_backend();
    const auto& vx = kern::avx2_backend();
    Rng rng(17);

    for (std::size_t n : kSizes) {
        const auto x = random_vec(n, rng);
        const auto y = random_vec(n, rng);

        // Elementwise kernels must be bit-identical.
        std::vector<double> a(n), b(n);
        sc.add(x.data(), y.data(), a.data(), n);
        vx.add(x.data(), y.data(), b.data(), n);
        CHECK(a == b);
        sc.sub(x.data(), y.data(), a.data(), n);
        vx.sub(x.data(), y.data(), b.data(), n);
        CHECK(a == b);
        sc.mul(x.data(), y.data(), a.data(), n);
        vx.mul(x.data(), y.data(), b.data(), n);
        CHECK(a == b);
        sc.scale(x.data(), 1.7, a.data(), n);
        vx.scale(x.data(), 1.7, b.data(), n);
        CHECK(a == b);

        // Reductions may reassociate; compare at tight tolerance.
        const double ds = sc.dot(x.data(), y.data(), n);
        const double dv = vx.dot(x.data(), y.data(), n);
        CHECK(std::abs(ds - dv) <= 1e-12 * (1.0 + std::abs(ds)));
        const double ss = sc.sum(x.data(), n);
        const double sv = vx.sum(x.data(), n);
        CHECK(std::abs(ss - sv) <= 1e-12 * (1.0 + std::abs(ss)));

        std::vector<double> ya = y, yb = y;
        sc.axpy(-0.3, x.data(), ya.data(), n);
        vx.axpy(-0.3, x.data(), yb.data(), n);
        CHECK(ya == yb);

        CHECK(sc.all_finite(x.data(), n) == vx.all_finite(x.data(), n));
    }
}

TEST_CASE("avx2 all_finite matches scalar on planted specials") {
    if (!kern::avx2_supported()) return;
    const auto& sc = kern::scalar_backend();
    const auto& vx = kern::avx2_backend();
    Rng rng(23);
    for (std::size_t n : {4ul, 6ul, 9ul, 32ul}) {
        for (std::size_t pos = 0; pos < n; ++pos) {
            auto v = random_vec(n, rng);
            v[pos] = -std::numeric_limits<double>::infinity();
            CHECK(sc.all_finite(v.data(), n) == vx.all_finite(v.data(), n));
            v[pos] = std::numeric_limits<double>::quiet_NaN();
            CHECK(sc.all_finite(v.data(), n) == vx.all_finite(v.data(), n));
        }
    }
}
#endif

TEST_CASE("backend selection") {
    CHECK(std::string(kern::active().name).size() > 0);
    CHECK_THROWS(kern::select("no-such-backend"));
    kern::select("scalar");
    CHECK(std::string(kern::active().name) == "scalar");
#if defined(MLAD_HAVE_AVX2)
    if (kern::avx2_supported()) {
        kern::select("avx2");
        CHECK(std::string(kern::active().name) == "avx2");
    }
#endif
}
