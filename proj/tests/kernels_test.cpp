#include <doctest.h>

#include <cmath>
#include <vector>

#include "elevinfer/kernels.hpp"
#include "elevinfer/rng.hpp"

using namespace elev;
namespace k = elev::kernels;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n, double scale = 10.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(-scale, scale);
    return v;
}

}  // namespace

TEST_CASE("kernels: scalar reference values") {
    const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
    const std::vector<double> y{0.5, -1.0, 2.0, 0.0};
    CHECK(k::scalar::dot(x.data(), y.data(), 4) == doctest::Approx(1.0 * 0.5 - 2.0 + 6.0));
    CHECK(k::scalar::sum(x.data(), 4) == doctest::Approx(10.0));
    CHECK(k::scalar::max_value(y.data(), 4) == doctest::Approx(2.0));

    std::vector<double> z = y;
    k::scalar::axpy(2.0, x.data(), z.data(), 4);
    CHECK(z[0] == doctest::Approx(2.5));
    CHECK(z[3] == doctest::Approx(8.0));

    std::vector<double> r(4);
    k::scalar::relu(y.data(), r.data(), 4);
    CHECK(r == std::vector<double>{0.5, 0.0, 2.0, 0.0});
}

TEST_CASE("kernels: avx2 variants match the scalar reference") {
    if (!k::avx2_supported()) {
        MESSAGE("AVX2 not available; dispatch falls back to scalar");
        return;
    }
    Rng rng(20240901);
    // sizes straddle every remainder path of the 4- and 8-wide loops
    for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 11u, 15u, 16u, 17u, 31u, 100u, 1001u}) {
        const auto x = random_vec(rng, n);
        const auto y = random_vec(rng, n);

        CHECK(k::avx2::dot(x.data(), y.data(), n) ==
              doctest::Approx(k::scalar::dot(x.data(), y.data(), n)).epsilon(1e-12));
        CHECK(k::avx2::sum(x.data(), n) ==
              doctest::Approx(k::scalar::sum(x.data(), n)).epsilon(1e-12));
        if (n > 0) {
            CHECK(k::avx2::max_value(x.data(), n) == k::scalar::max_value(x.data(), n));
        }

        auto ys = y, yv = y;
        k::scalar::axpy(1.75, x.data(), ys.data(), n);
        k::avx2::axpy(1.75, x.data(), yv.data(), n);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(yv[i] == doctest::Approx(ys[i]).epsilon(1e-13));
        }

        auto xs = x, xv = x;
        k::scalar::scale(xs.data(), -0.3, n);
        k::avx2::scale(xv.data(), -0.3, n);
        CHECK(xs == xv);

        std::vector<double> rs(n), rv(n);
        k::scalar::relu(x.data(), rs.data(), n);
        k::avx2::relu(x.data(), rv.data(), n);
        CHECK(rs == rv);
    }
}

TEST_CASE("kernels: backend switch round-trips") {
    const auto before = k::active_backend();
    k::set_backend(k::Backend::scalar);
    CHECK(k::backend_name() == "scalar");
    const std::vector<double> x{3.0, -1.0};
    CHECK(k::dot(x.data(), x.data(), 2) == doctest::Approx(10.0));
    k::set_backend(before);
}
