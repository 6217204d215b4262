#include "kgcr/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kgcr/error.hpp"
#include "kgcr/scene.hpp"

namespace kgcr {

Mat Mat::identity(std::size_t n) {
  Mat m(n, n);
  for (std::size_t i = 0; i < n; i++) m(i, i) = 1.0;
  return m;
}

Mat transpose(const Mat& m) {
  Mat t(m.cols, m.rows);
  for (std::size_t i = 0; i < m.rows; i++)
    for (std::size_t j = 0; j < m.cols; j++) t(j, i) = m(i, j);
  return t;
}

Mat matmul(const Mat& x, const Mat& y) {
  Mat r(x.rows, y.cols);
  for (std::size_t i = 0; i < x.rows; i++)
    for (std::size_t k = 0; k < x.cols; k++) {
      double xv = x(i, k);
      if (xv == 0.0) continue;
      for (std::size_t j = 0; j < y.cols; j++) r(i, j) += xv * y(k, j);
    }
  return r;
}

EigenResult jacobi_eigen(const Mat& sym, int max_sweeps) {
  std::size_t n = sym.rows;
  Mat a = sym;
  Mat v = Mat::identity(n);
  const double tol = 1e-14;
  for (int sweep = 0; sweep < max_sweeps; sweep++) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; p++)
      for (std::size_t q = p + 1; q < n; q++) off += a(p, q) * a(p, q);
    if (off < tol * tol) break;
    for (std::size_t p = 0; p < n; p++)
      for (std::size_t q = p + 1; q < n; q++) {
        double apq = a(p, q);
        if (std::abs(apq) < 1e-300) continue;
        double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (std::size_t k = 0; k < n; k++) {
          double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; k++) {
          double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; k++) {
          double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
  }
  // Sort descending by eigenvalue; stable so degenerate subspaces keep a
  // deterministic order.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return a(i, i) > a(j, j);
  });
  EigenResult result;
  result.values.resize(n);
  result.vectors = Mat(n, n);
  for (std::size_t col = 0; col < n; col++) {
    std::size_t src = order[col];
    result.values[col] = a(src, src);
    // Sign convention: largest-magnitude entry non-negative.
    double best = 0.0;
    for (std::size_t k = 0; k < n; k++)
      if (std::abs(v(k, src)) > std::abs(best)) best = v(k, src);
    double sign = best < 0.0 ? -1.0 : 1.0;
    for (std::size_t k = 0; k < n; k++)
      result.vectors(k, col) = sign * v(k, src);
  }
  return result;
}

double Tensor3::frobenius() const {
  double s = 0.0;
  for (double x : data) s += x * x;
  return std::sqrt(s);
}

Mat unfold(const Tensor3& t, int mode) {
  auto [n1, n2, n3] = t.dims;
  Mat m;
  switch (mode) {
    case 0:
      m = Mat(n1, n2 * n3);
      for (std::size_t i = 0; i < n1; i++)
        for (std::size_t j = 0; j < n2; j++)
          for (std::size_t k = 0; k < n3; k++)
            m(i, j * n3 + k) = t.at(i, j, k);
      break;
    case 1:
      m = Mat(n2, n1 * n3);
      for (std::size_t i = 0; i < n1; i++)
        for (std::size_t j = 0; j < n2; j++)
          for (std::size_t k = 0; k < n3; k++)
            m(j, i * n3 + k) = t.at(i, j, k);
      break;
    default:
      m = Mat(n3, n1 * n2);
      for (std::size_t i = 0; i < n1; i++)
        for (std::size_t j = 0; j < n2; j++)
          for (std::size_t k = 0; k < n3; k++)
            m(k, i * n2 + j) = t.at(i, j, k);
      break;
  }
  return m;
}

namespace {

Tensor3 mode_apply(const Tensor3& t, const Mat& m, int mode, bool transposed) {
  // result[..., r, ...] = sum_d M'(r, d) * t[..., d, ...]
  // where M' = M^T when transposed (projection), else M (expansion).
  std::size_t in_dim = t.dims[static_cast<std::size_t>(mode)];
  std::size_t out_dim = transposed ? m.cols : m.rows;
  auto coeff = [&](std::size_t r, std::size_t d) {
    return transposed ? m(d, r) : m(r, d);
  };
  std::array<std::size_t, 3> dims = t.dims;
  dims[static_cast<std::size_t>(mode)] = out_dim;
  Tensor3 out(dims[0], dims[1], dims[2]);
  for (std::size_t i = 0; i < dims[0]; i++)
    for (std::size_t j = 0; j < dims[1]; j++)
      for (std::size_t k = 0; k < dims[2]; k++) {
        double s = 0.0;
        for (std::size_t d = 0; d < in_dim; d++) {
          std::size_t ii = mode == 0 ? d : i;
          std::size_t jj = mode == 1 ? d : j;
          std::size_t kk = mode == 2 ? d : k;
          std::size_t r = mode == 0 ? i : (mode == 1 ? j : k);
          s += coeff(r, d) * t.at(ii, jj, kk);
        }
        out.at(i, j, k) = s;
      }
  return out;
}

// Leading r eigenvectors of U U^T for the given unfolding.
Mat leading_factor(const Mat& u, std::size_t r) {
  Mat gram(u.rows, u.rows);
  for (std::size_t i = 0; i < u.rows; i++)
    for (std::size_t j = i; j < u.rows; j++) {
      double s = 0.0;
      for (std::size_t k = 0; k < u.cols; k++) s += u(i, k) * u(j, k);
      gram(i, j) = s;
      gram(j, i) = s;
    }
  EigenResult eig = jacobi_eigen(gram);
  Mat f(u.rows, r);
  for (std::size_t col = 0; col < r; col++)
    for (std::size_t row = 0; row < u.rows; row++)
      f(row, col) = eig.vectors(row, col);
  return f;
}

}  // namespace

Tensor3 mode_multiply_transposed(const Tensor3& t, const Mat& factor,
                                 int mode) {
  return mode_apply(t, factor, mode, true);
}

Tensor3 mode_multiply(const Tensor3& t, const Mat& factor, int mode) {
  return mode_apply(t, factor, mode, false);
}

TuckerFactors hooi(const Tensor3& t, std::array<std::size_t, 3> ranks,
                   int max_iters, unsigned seed) {
  (void)seed;  // the pipeline is fully deterministic; seed kept for the API
  for (int m = 0; m < 3; m++)
    if (ranks[static_cast<std::size_t>(m)] < 1 ||
        ranks[static_cast<std::size_t>(m)] > t.dims[static_cast<std::size_t>(m)])
      throw Error("RANK_OUT_OF_RANGE",
                  "rank " + std::to_string(ranks[static_cast<std::size_t>(m)]) +
                      " for mode of size " +
                      std::to_string(t.dims[static_cast<std::size_t>(m)]));

  TuckerFactors f;
  // HOSVD initialization: leading singular vectors of each raw unfolding.
  f.a = leading_factor(unfold(t, 0), ranks[0]);
  f.b = leading_factor(unfold(t, 1), ranks[1]);
  f.c = leading_factor(unfold(t, 2), ranks[2]);

  double norm_sq = 0.0;
  for (double x : t.data) norm_sq += x * x;

  double prev_fit = -1.0;
  for (int iter = 0; iter < max_iters; iter++) {
    {
      Tensor3 y = mode_multiply_transposed(
          mode_multiply_transposed(t, f.b, 1), f.c, 2);
      f.a = leading_factor(unfold(y, 0), ranks[0]);
    }
    {
      Tensor3 y = mode_multiply_transposed(
          mode_multiply_transposed(t, f.a, 0), f.c, 2);
      f.b = leading_factor(unfold(y, 1), ranks[1]);
    }
    {
      Tensor3 y = mode_multiply_transposed(
          mode_multiply_transposed(t, f.a, 0), f.b, 1);
      f.c = leading_factor(unfold(y, 2), ranks[2]);
    }
    f.core = mode_multiply_transposed(
        mode_multiply_transposed(
            mode_multiply_transposed(t, f.a, 0), f.b, 1),
        f.c, 2);
    double core_sq = 0.0;
    for (double x : f.core.data) core_sq += x * x;
    double fit = std::sqrt(std::max(0.0, norm_sq - core_sq));
    f.fit_history.push_back(fit);
    if (prev_fit >= 0.0) {
      double denom = std::max(prev_fit, 1e-30);
      if (std::abs(prev_fit - fit) / denom < 1e-10) break;
    }
    prev_fit = fit;
  }
  if (f.fit_history.empty()) {
    // max_iters == 0: still produce the HOSVD core.
    f.core = mode_multiply_transposed(
        mode_multiply_transposed(
            mode_multiply_transposed(t, f.a, 0), f.b, 1),
        f.c, 2);
  }
  return f;
}

Tensor3 reconstruct(const TuckerFactors& f) {
  Tensor3 out = mode_multiply(f.core, f.a, 0);
  out = mode_multiply(out, f.b, 1);
  out = mode_multiply(out, f.c, 2);
  return out;
}

std::vector<CompletionCandidate> complete(const Tensor3& t,
                                          const TuckerFactors& f,
                                          std::size_t top_k) {
  Tensor3 approx = reconstruct(f);
  std::vector<CompletionCandidate> candidates;
  for (std::size_t i = 0; i < t.dims[0]; i++)
    for (std::size_t j = 0; j < t.dims[1]; j++)
      for (std::size_t k = 0; k < t.dims[2]; k++) {
        if (t.at(i, j, k) != 0.0) continue;  // observed support excluded
        candidates.push_back({t.labels[0][i], t.labels[1][j], t.labels[2][k],
                              approx.at(i, j, k)});
      }
  std::sort(candidates.begin(), candidates.end(),
            [](const CompletionCandidate& x, const CompletionCandidate& y) {
              if (x.score != y.score) return x.score > y.score;
              return std::tie(x.subject, x.predicate, x.object) <
                     std::tie(y.subject, y.predicate, y.object);
            });
  if (candidates.size() > top_k) candidates.resize(top_k);
  return candidates;
}

Tensor3 build_tensor(const Graph& g) {
  struct Axis {
    std::vector<std::string> labels;
    std::map<std::string, std::size_t> index;
    std::size_t get(const std::string& label) {
      auto [it, fresh] = index.try_emplace(label, labels.size());
      if (fresh) labels.push_back(label);
      return it->second;
    }
  };
  Axis subjects, verbs, objects;
  std::vector<std::array<std::size_t, 3>> cells;
  for (const Term& id : scene_ids(g)) {
    Scene sc = scene_view(g, id);
    const Term* verb = sc.predicate ? &*sc.predicate
                                    : (sc.property ? &*sc.property : nullptr);
    if (!verb) continue;
    std::vector<Term> objs = sc.whom;
    objs.insert(objs.end(), sc.what.begin(), sc.what.end());
    for (const Term& subj : sc.subjects)
      for (const Term& obj : objs)
        cells.push_back({subjects.get(subj.value), verbs.get(verb->value),
                         objects.get(obj.value)});
  }
  if (cells.empty())
    throw Error("EMPTY_EXTRACTION", "no scene yields an SVO triple");
  Tensor3 t(subjects.labels.size(), verbs.labels.size(),
            objects.labels.size());
  t.labels = {subjects.labels, verbs.labels, objects.labels};
  for (const auto& [i, j, k] : cells) t.at(i, j, k) = 1.0;
  return t;
}

}  // namespace kgcr
