#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "kgcr/graph.hpp"

namespace kgcr {

// Row-major dense matrix, just big enough for the factor algebra here.
struct Mat {
  std::size_t rows = 0, cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const {
    return a[i * cols + j];
  }
  static Mat identity(std::size_t n);
};

Mat transpose(const Mat& m);
Mat matmul(const Mat& x, const Mat& y);

// Symmetric eigendecomposition by cyclic Jacobi rotations. Eigenpairs come
// back sorted by eigenvalue descending; each eigenvector column has its
// largest-magnitude entry non-negative.
struct EigenResult {
  std::vector<double> values;
  Mat vectors;  // column k is the k-th eigenvector
};
EigenResult jacobi_eigen(const Mat& sym, int max_sweeps = 100);

// Dense 3-mode tensor with per-axis label maps. Observed triples are 1.0.
struct Tensor3 {
  std::array<std::size_t, 3> dims{0, 0, 0};
  std::array<std::vector<std::string>, 3> labels;
  std::vector<double> data;  // i*(n2*n3) + j*n3 + k

  Tensor3() = default;
  Tensor3(std::size_t n1, std::size_t n2, std::size_t n3)
      : dims{n1, n2, n3}, data(n1 * n2 * n3, 0.0) {}
  double& at(std::size_t i, std::size_t j, std::size_t k) {
    return data[(i * dims[1] + j) * dims[2] + k];
  }
  double at(std::size_t i, std::size_t j, std::size_t k) const {
    return data[(i * dims[1] + j) * dims[2] + k];
  }
  double frobenius() const;
};

// Mode-n unfolding (mode rows, product of the other two dims as columns).
Mat unfold(const Tensor3& t, int mode);

// Mode-n product with the transpose of `factor` (projects the mode onto
// the factor's column space): result dim along `mode` becomes factor.cols.
Tensor3 mode_multiply_transposed(const Tensor3& t, const Mat& factor,
                                 int mode);
// Mode-n product with `factor` itself (expands the mode).
Tensor3 mode_multiply(const Tensor3& t, const Mat& factor, int mode);

struct TuckerFactors {
  Tensor3 core;       // r1 x r2 x r3
  Mat a, b, c;        // n1 x r1, n2 x r2, n3 x r3, orthonormal columns
  std::vector<double> fit_history;  // ||t - reconstruct||_F per iteration
};

// HOSVD-initialized higher-order orthogonal iteration. Deterministic for a
// fixed seed; stops at max_iters or relative fit change below 1e-10.
TuckerFactors hooi(const Tensor3& t, std::array<std::size_t, 3> ranks,
                   int max_iters, unsigned seed);

// core x1 A x2 B x3 C by direct summation; carries over t's labels when
// given (the CLI passes them through).
Tensor3 reconstruct(const TuckerFactors& f);

struct CompletionCandidate {
  std::string subject, predicate, object;
  double score = 0.0;
};

// Zero-support cells ranked by reconstructed score descending, ties by
// (subject, predicate, object) label order.
std::vector<CompletionCandidate> complete(const Tensor3& t,
                                          const TuckerFactors& f,
                                          std::size_t top_k);

// SVO extraction: one 1.0 cell per (scene subject, verb, whom/what value),
// where the verb is the scene's hasPredicate or hasProperty. Axis labels
// are indexed in first-seen order over sorted scene IRIs. Throws
// EMPTY_EXTRACTION when no scene yields a triple.
Tensor3 build_tensor(const Graph& g);

}  // namespace kgcr
