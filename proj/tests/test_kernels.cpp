#include <doctest.h>

#include <cmath>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "robex/kernels.hpp"

namespace {

using robex::kernels::Backend;

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> v(n);
    for (double& x : v) x = dist(rng);
    return v;
}

double naive_dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Restores whatever backend was active when the test started.
struct BackendGuard {
    Backend saved = robex::kernels::active_backend();
    ~BackendGuard() { robex::kernels::force_backend(saved); }
};

bool avx2_available() {
    try {
        robex::kernels::force_backend(Backend::Avx2);
    } catch (const std::invalid_argument&) {
        return false;
    }
    return true;
}

const std::vector<std::size_t> kSizes{0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 64, 100, 257};

}  // namespace

TEST_CASE("reference kernels match naive arithmetic") {
    BackendGuard guard;
    robex::kernels::force_backend(Backend::Scalar);
    std::mt19937_64 rng(101);

    for (std::size_t n : kSizes) {
        CAPTURE(n);
        const std::vector<double> a = random_vector(rng, n);
        const std::vector<double> b = random_vector(rng, n);
        const std::vector<double> w = random_vector(rng, n);

        CHECK(robex::kernels::dot(a.data(), b.data(), n) == doctest::Approx(naive_dot(a, b)).epsilon(1e-13));

        double wref = 0.0;
        for (std::size_t i = 0; i < n; ++i) wref += w[i] * a[i] * b[i];
        CHECK(robex::kernels::weighted_dot(w.data(), a.data(), b.data(), n) ==
              doctest::Approx(wref).epsilon(1e-13));

        std::vector<double> y = b;
        robex::kernels::axpy(0.75, a.data(), y.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(y[i] == doctest::Approx(b[i] + 0.75 * a[i]));

        std::vector<double> had(n, 0.0);
        robex::kernels::hadamard(a.data(), b.data(), had.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(had[i] == a[i] * b[i]);
    }
}

TEST_CASE("reference matvec matches naive loops") {
    BackendGuard guard;
    robex::kernels::force_backend(Backend::Scalar);
    std::mt19937_64 rng(202);

    const std::vector<std::pair<std::size_t, std::size_t>> shapes{
        {1, 1}, {3, 7}, {8, 8}, {5, 16}, {13, 5}, {2, 0}, {0, 3}, {33, 17}};
    for (const auto& [rows, cols] : shapes) {
        CAPTURE(rows);
        CAPTURE(cols);
        const std::vector<double> mat = random_vector(rng, rows * cols);
        const std::vector<double> x = random_vector(rng, cols);
        const std::vector<double> xt = random_vector(rng, rows);

        std::vector<double> y(rows, -7.0);
        robex::kernels::matvec(mat.data(), rows, cols, x.data(), y.data());
        for (std::size_t r = 0; r < rows; ++r) {
            double s = 0.0;
            for (std::size_t c = 0; c < cols; ++c) s += mat[r * cols + c] * x[c];
            CHECK(y[r] == doctest::Approx(s).epsilon(1e-13));
        }

        std::vector<double> yt(cols, -7.0);
        robex::kernels::matvec_transpose(mat.data(), rows, cols, xt.data(), yt.data());
        for (std::size_t c = 0; c < cols; ++c) {
            double s = 0.0;
            for (std::size_t r = 0; r < rows; ++r) s += mat[r * cols + c] * xt[r];
            CHECK(yt[c] == doctest::Approx(s).epsilon(1e-13));
        }
    }
}

TEST_CASE("vector backend agrees with the reference backend") {
    BackendGuard guard;
    if (!avx2_available()) {
        MESSAGE("AVX2 backend unavailable on this machine; equivalence not exercised");
        return;
    }
    std::mt19937_64 rng(303);

    for (std::size_t n : kSizes) {
        CAPTURE(n);
        const std::vector<double> a = random_vector(rng, n);
        const std::vector<double> b = random_vector(rng, n);
        const std::vector<double> w = random_vector(rng, n);

        robex::kernels::force_backend(Backend::Scalar);
        const double dot_s = robex::kernels::dot(a.data(), b.data(), n);
        const double wdot_s = robex::kernels::weighted_dot(w.data(), a.data(), b.data(), n);
        std::vector<double> axpy_s = b;
        robex::kernels::axpy(1.25, a.data(), axpy_s.data(), n);
        std::vector<double> had_s(n, 0.0);
        robex::kernels::hadamard(a.data(), b.data(), had_s.data(), n);

        robex::kernels::force_backend(Backend::Avx2);
        const double dot_v = robex::kernels::dot(a.data(), b.data(), n);
        const double wdot_v = robex::kernels::weighted_dot(w.data(), a.data(), b.data(), n);
        std::vector<double> axpy_v = b;
        robex::kernels::axpy(1.25, a.data(), axpy_v.data(), n);
        std::vector<double> had_v(n, 0.0);
        robex::kernels::hadamard(a.data(), b.data(), had_v.data(), n);

        // FMA reorders rounding, so agreement is to relative precision, not bits.
        CHECK(dot_v == doctest::Approx(dot_s).epsilon(1e-12));
        CHECK(wdot_v == doctest::Approx(wdot_s).epsilon(1e-12));
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(axpy_v[i] == doctest::Approx(axpy_s[i]).epsilon(1e-12));
            CHECK(had_v[i] == doctest::Approx(had_s[i]).epsilon(1e-12));
        }
    }

    std::mt19937_64 rng2(404);
    const std::size_t rows = 23, cols = 41;
    const std::vector<double> mat = random_vector(rng2, rows * cols);
    const std::vector<double> x = random_vector(rng2, cols);
    const std::vector<double> xt = random_vector(rng2, rows);

    robex::kernels::force_backend(Backend::Scalar);
    std::vector<double> y_s(rows, 0.0), yt_s(cols, 0.0);
    robex::kernels::matvec(mat.data(), rows, cols, x.data(), y_s.data());
    robex::kernels::matvec_transpose(mat.data(), rows, cols, xt.data(), yt_s.data());

    robex::kernels::force_backend(Backend::Avx2);
    std::vector<double> y_v(rows, 0.0), yt_v(cols, 0.0);
    robex::kernels::matvec(mat.data(), rows, cols, x.data(), y_v.data());
    robex::kernels::matvec_transpose(mat.data(), rows, cols, xt.data(), yt_v.data());

    for (std::size_t r = 0; r < rows; ++r) CHECK(y_v[r] == doctest::Approx(y_s[r]).epsilon(1e-12));
    for (std::size_t c = 0; c < cols; ++c)
        CHECK(yt_v[c] == doctest::Approx(yt_s[c]).epsilon(1e-12));
}

TEST_CASE("backend forcing is observable and reversible") {
    BackendGuard guard;
    robex::kernels::force_backend(Backend::Scalar);
    CHECK(robex::kernels::active_backend() == Backend::Scalar);
    CHECK(std::string(robex::kernels::backend_name(Backend::Scalar)) == "scalar");
    CHECK(std::string(robex::kernels::backend_name(Backend::Avx2)) == "avx2");
}
