// Times the serial and OpenMP data-matrix products on dense and sparse inputs.
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "l1pca/kernels.hpp"
#include "l1pca/random.hpp"

using namespace l1pca;

namespace {

double seconds_per_call(const std::function<void()>& fn, int reps) {
  fn();
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) fn();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count() / reps;
}

void row(const char* name, double serial, double omp, bool same) {
  std::printf("%-14s serial %9.3f ms   omp %9.3f ms   speedup %5.2fx   identical %s\n", name, serial * 1e3,
              omp * 1e3, serial / omp, same ? "yes" : "NO");
}

}  // namespace

int main(int argc, char** argv) {
  const Index d = argc > 1 ? std::stol(argv[1]) : 2000;
  const Index n = argc > 2 ? std::stol(argv[2]) : 4000;
  const Index k = argc > 3 ? std::stol(argv[3]) : 10;
  const int reps = 5;
  std::printf("d=%ld n=%ld K=%ld threads=%d\n", static_cast<long>(d), static_cast<long>(n), static_cast<long>(k),
              kernels::max_threads());

  Philox rng(1, 2);
  const Matrix x = gaussian_matrix(d, n, rng);
  Matrix thin(d, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < d; ++i)
      if (rng.uniform() < 0.01) thin(i, j) = rng.normal();
  const SparseMatrix xs = SparseMatrix::from_dense(thin);
  const Matrix q = gaussian_matrix(d, k, rng);
  const Matrix p = gaussian_matrix(n, k, rng);

  Matrix a(n, k), b(n, k);
  row("dense X^T Q", seconds_per_call([&] { kernels::serial::dense_tmul(x, q, a); }, reps),
      seconds_per_call([&] { kernels::omp::dense_tmul(x, q, b); }, reps), a == b);
  Matrix c(d, k), e(d, k);
  row("dense X P", seconds_per_call([&] { kernels::serial::dense_mul(x, p, c); }, reps),
      seconds_per_call([&] { kernels::omp::dense_mul(x, p, e); }, reps), c == e);
  row("sparse X^T Q", seconds_per_call([&] { kernels::serial::sparse_tmul(xs, q, a); }, reps),
      seconds_per_call([&] { kernels::omp::sparse_tmul(xs, q, b); }, reps), a == b);
  row("sparse X P", seconds_per_call([&] { kernels::serial::sparse_mul(xs, p, c); }, reps),
      seconds_per_call([&] { kernels::omp::sparse_mul(xs, p, e); }, reps), c == e);
  return 0;
}
