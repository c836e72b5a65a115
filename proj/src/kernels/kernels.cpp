#include "elevinfer/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <limits>

namespace elev::kernels {

namespace scalar {

double dot(const double* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double sum(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i];
    return acc;
}

void scale(double* x, double alpha, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

double max_value(const double* x, std::size_t n) {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        if (x[i] > m) m = x[i];
    }
    return m;
}

void relu(const double* x, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] > 0.0 ? x[i] : 0.0;
}

}  // namespace scalar

bool avx2_supported() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {

Backend pick_initial_backend() {
    if (const char* env = std::getenv("ELEVINFER_KERNELS")) {
        if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
        if (std::strcmp(env, "avx2") == 0 && avx2_supported()) return Backend::avx2;
    }
    return avx2_supported() ? Backend::avx2 : Backend::scalar;
}

Backend& backend_slot() {
    static Backend b = pick_initial_backend();
    return b;
}

}  // namespace

Backend active_backend() { return backend_slot(); }

void set_backend(Backend b) {
    if (b == Backend::avx2 && !avx2_supported()) b = Backend::scalar;
    backend_slot() = b;
}

std::string backend_name() {
    return active_backend() == Backend::avx2 ? "avx2" : "scalar";
}

double dot(const double* x, const double* y, std::size_t n) {
    return active_backend() == Backend::avx2 ? avx2::dot(x, y, n) : scalar::dot(x, y, n);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    if (active_backend() == Backend::avx2)
        avx2::axpy(alpha, x, y, n);
    else
        scalar::axpy(alpha, x, y, n);
}

double sum(const double* x, std::size_t n) {
    return active_backend() == Backend::avx2 ? avx2::sum(x, n) : scalar::sum(x, n);
}

void scale(double* x, double alpha, std::size_t n) {
    if (active_backend() == Backend::avx2)
        avx2::scale(x, alpha, n);
    else
        scalar::scale(x, alpha, n);
}

double max_value(const double* x, std::size_t n) {
    return active_backend() == Backend::avx2 ? avx2::max_value(x, n) : scalar::max_value(x, n);
}

void relu(const double* x, double* out, std::size_t n) {
    if (active_backend() == Backend::avx2)
        avx2::relu(x, out, n);
    else
        scalar::relu(x, out, n);
}

}  // namespace elev::kernels
