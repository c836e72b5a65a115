#pragma once

#include <cstddef>
#include <string>

// Data-parallel inner loops shared by the classifiers and vectorizers.
// Scalar reference implementations always exist; an AVX2+FMA variant is
// selected at runtime when the CPU supports it. The two backends are
// equivalence-tested against each other (tests/kernels_test.cpp).
//
// Backend selection can be forced with the ELEVINFER_KERNELS environment
// variable ("scalar" or "avx2") before the first kernel call.

namespace elev::kernels {

enum class Backend { scalar, avx2 };

Backend active_backend();
void set_backend(Backend b);
bool avx2_supported();
std::string backend_name();

// y . x over n entries
double dot(const double* x, const double* y, std::size_t n);

// y += alpha * x
void axpy(double alpha, const double* x, double* y, std::size_t n);

double sum(const double* x, std::size_t n);

// x *= alpha
void scale(double* x, double alpha, std::size_t n);

double max_value(const double* x, std::size_t n);

// out = max(x, 0)
void relu(const double* x, double* out, std::size_t n);

namespace scalar {
double dot(const double* x, const double* y, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double sum(const double* x, std::size_t n);
void scale(double* x, double alpha, std::size_t n);
double max_value(const double* x, std::size_t n);
void relu(const double* x, double* out, std::size_t n);
}  // namespace scalar

namespace avx2 {
double dot(const double* x, const double* y, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double sum(const double* x, std::size_t n);
void scale(double* x, double alpha, std::size_t n);
double max_value(const double* x, std::size_t n);
void relu(const double* x, double* out, std::size_t n);
}  // namespace avx2

}  // namespace elev::kernels
