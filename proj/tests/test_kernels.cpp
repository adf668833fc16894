#include <random>
#include <vector>

#include "doctest.h"
#include "sps/kernels.hpp"

namespace k = sps::kernels;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> d;
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

void check_close(double a, double b, double tol) {
    CHECK(std::abs(a - b) <= tol * (1.0 + std::abs(b)));
}

}  // namespace

TEST_CASE("scalar kernels match naive loops") {
    const auto& s = k::scalar_table();
    std::vector<double> x{1, 2, 3};
    CHECK(s.sum_sq_diff(x.data(), 3) == doctest::Approx(1 + 1 + 1 + 9));
    std::vector<double> out(3);
    s.second_difference(x.data(), out.data(), 3, 1.0);
    CHECK(out[0] == 0.0);
    CHECK(out[1] == 0.0);
    CHECK(out[2] == -4.0);
}

TEST_CASE("avx2 kernels agree with the scalar reference") {
    if (!k::avx2_available()) {
        MESSAGE("AVX2 not available; equivalence test skipped");
        return;
    }
#if defined(__x86_64__) || defined(_M_X64)
    const auto& s = k::scalar_table();
    const auto& v = k::avx2_table();
    std::mt19937_64 rng(7);
    for (std::size_t n : {0u, 1u, 2u, 3u, 5u, 8u, 15u, 16u, 17u, 63u, 64u, 1000u, 4099u}) {
        CAPTURE(n);
        auto a = random_vec(rng, n), b = random_vec(rng, n), w = random_vec(rng, n);
        check_close(v.dot(a.data(), b.data(), n), s.dot(a.data(), b.data(), n), 1e-13);
        check_close(v.wdot(w.data(), a.data(), b.data(), n), s.wdot(w.data(), a.data(), b.data(), n), 1e-13);
        check_close(v.sum_sq_diff(a.data(), n), s.sum_sq_diff(a.data(), n), 1e-13);

        std::vector<double> o1(n), o2(n);
        s.mul(a.data(), b.data(), o1.data(), n);
        v.mul(a.data(), b.data(), o2.data(), n);
        CHECK(o1 == o2);

        o1 = b;
        o2 = b;
        s.axpy(0.37, a.data(), o1.data(), n);
        v.axpy(0.37, a.data(), o2.data(), n);
        for (std::size_t i = 0; i < n; ++i) check_close(o2[i], o1[i], 1e-15);

        s.second_difference(a.data(), o1.data(), n, 3.5);
        v.second_difference(a.data(), o2.data(), n, 3.5);
        for (std::size_t i = 0; i < n; ++i) check_close(o2[i], o1[i], 1e-14);

        o1 = w;
        o2 = w;
        s.add_cross_difference(a.data(), b.data(), w.data(), o1.data(), n, 2.0);
        v.add_cross_difference(a.data(), b.data(), w.data(), o2.data(), n, 2.0);
        for (std::size_t i = 0; i < n; ++i) check_close(o2[i], o1[i], 1e-14);
        o1 = w;
        o2 = w;
        s.add_cross_difference(nullptr, b.data(), a.data(), o1.data(), n, 2.0);
        v.add_cross_difference(nullptr, b.data(), a.data(), o2.data(), n, 2.0);
        for (std::size_t i = 0; i < n; ++i) check_close(o2[i], o1[i], 1e-14);
    }
#endif
}

TEST_CASE("table selection") {
    const auto* before = &k::active();
    CHECK(k::select("scalar"));
    CHECK(std::string(k::active().name) == "scalar");
    CHECK_FALSE(k::select("neon-nonexistent"));
    if (k::avx2_available()) {
        CHECK(k::select("avx2"));
        CHECK(std::string(k::active().name) == "avx2");
    }
    k::select(before->name);
}
