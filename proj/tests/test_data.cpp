#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "l1pca/data.hpp"
#include "l1pca/error.hpp"
#include "l1pca/linalg.hpp"

using namespace l1pca;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "l1pca_test_data";
  fs::create_directories(dir);
  return dir / name;
}

double span_residual(const Matrix& z, const Matrix& u) {
  return frobenius_norm(z - matmul(u, matmul_tn(u, z)));
}

}  // namespace

TEST_CASE("fixed-effect generator invariants") {
  const FixedEffectInstance g = gen_fixed_effect({80, 30, 4, 0.5, 7});
  CHECK(stiefel_residual(g.u) < 1e-12);
  CHECK(span_residual(g.z, g.u) <= 1e-10);
  for (Index i = 0; i < 30; ++i) {
    double s = 0;
    for (Index j = 0; j < 80; ++j) s += g.z(i, j);
    CHECK(std::abs(s) <= 1e-10);
  }
  const FixedEffectInstance again = gen_fixed_effect({80, 30, 4, 0.5, 7});
  CHECK(again.x == g.x);
  CHECK(gen_fixed_effect({80, 30, 4, 0.5, 8}).x != g.x);
}

TEST_CASE("sigma zero gives the noiseless part") {
  const FixedEffectInstance g = gen_fixed_effect({20, 6, 2, 0.0, 1});
  CHECK(g.x == g.z);
}

TEST_CASE("generator rejects bad specs") {
  CHECK_THROWS_AS(gen_fixed_effect({10, 3, 4, 0.5, 0}), Error);
  CHECK_THROWS_AS(gen_fixed_effect({10, 3, 1, -1.0, 0}), Error);
  CHECK_THROWS_AS(gen_fixed_effect({0, 3, 1, 0.5, 0}), Error);
}

TEST_CASE("sparse text parsing examples") {
  std::istringstream one("+1 1:0.5 3:-2\n");
  const LabeledDataset a = parse_sparse_labeled(one);
  CHECK(a.labels == std::vector<long long>{1});
  CHECK(a.x.to_dense() == Matrix::from_rows({{0.5}, {0}, {-2}}));

  std::istringstream two("1 1:4\n2 2:5\n");
  const LabeledDataset b = parse_sparse_labeled(two);
  CHECK(b.x.to_dense() == Matrix::from_rows({{4, 0}, {0, 5}}));
  CHECK(b.x.nonzeros() == 2);

  std::istringstream empty_row("-1\n1 2:1\n");
  const LabeledDataset c = parse_sparse_labeled(empty_row);
  CHECK(c.labels == std::vector<long long>{-1, 1});
  CHECK(c.x.to_dense() == Matrix::from_rows({{0, 0}, {0, 1}}));

  std::istringstream wide("1 1:1\n");
  CHECK(parse_sparse_labeled(wide, 5).x.rows() == 5);
}

TEST_CASE("parse errors carry line numbers") {
  auto line_of = [](const std::string& text) -> long long {
    std::istringstream in(text);
    try {
      parse_sparse_labeled(in);
    } catch (const ParseError& e) {
      return static_cast<long long>(e.line());
    }
    return -1;
  };
  CHECK(line_of("1 1:1\n1 2:x\n") == 2);
  CHECK(line_of("1 1:1\n1 2:1\n1 3:1 2:1\n") == 3);
  CHECK(line_of("abc 1:1\n") == 1);
  CHECK(line_of("1 0:1\n") == 1);
  CHECK(line_of("1 1-1\n") == 1);
  std::istringstream nothing("");
  CHECK_THROWS_AS(parse_sparse_labeled(nothing), Error);
}

TEST_CASE("sparse text round trip is bit-exact") {
  std::istringstream in("1 1:0.1 4:-3.25e-7\n-1 2:1e300\n2\n1 3:0.30000000000000004\n-1 1:-0.5 2:2 3:7\n");
  const LabeledDataset a = parse_sparse_labeled(in);
  std::ostringstream out;
  write_sparse_labeled(out, a.x, a.labels);
  std::istringstream back(out.str());
  const LabeledDataset b = parse_sparse_labeled(back, a.x.rows());
  CHECK(b.x == a.x);
  CHECK(b.labels == a.labels);
}

TEST_CASE("dense binary round trip and errors") {
  const Matrix m = Matrix::from_rows({{1, -2.5, 3}, {1e-300, 0, INFINITY}});
  const auto path = scratch("m.bin").string();
  write_dense(path, m);
  CHECK(read_dense(path) == m);
  CHECK(read_matrix_auto(path).to_dense() == m);

  {
    std::ofstream f(scratch("bad.bin"), std::ios::binary);
    f << "NOTMAGIC";
  }
  CHECK_THROWS_AS(read_dense(scratch("bad.bin").string()), Error);
  {
    std::ifstream src(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(src)), {});
    std::ofstream f(scratch("short.bin"), std::ios::binary);
    f << bytes.substr(0, bytes.size() - 3);
    std::ofstream g(scratch("long.bin"), std::ios::binary);
    g << bytes << 'x';
  }
  CHECK_THROWS_AS(read_dense(scratch("short.bin").string()), Error);
  CHECK_THROWS_AS(read_dense(scratch("long.bin").string()), Error);
  CHECK_THROWS_AS(read_dense(scratch("missing.bin").string()), Error);
}

TEST_CASE("read_matrix_auto on sparse text keeps labels") {
  const auto path = scratch("x.svm").string();
  {
    std::ofstream f(path);
    f << "1 1:2\n-1 2:3\n";
  }
  std::vector<long long> labels;
  const DataMatrix x = read_matrix_auto(path, &labels);
  CHECK(x.is_sparse());
  CHECK(labels == std::vector<long long>{1, -1});
}

TEST_CASE("trace output") {
  std::ostringstream empty;
  write_trace({}, empty, TraceFormat::kCsv);
  CHECK(empty.str() == std::string(kTraceCsvHeader) + "\n");

  IterateTrace t{{0, -1.5, -1.5, 0, 0, 0, 0.0}, {1, -2.0, -1.75, 0.1, 0.2, 0.3, 0.001}};
  std::ostringstream one;
  write_trace({t[0]}, one, TraceFormat::kCsv);
  const std::string text = one.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);

  const auto csv = scratch("t.csv").string();
  const auto json = scratch("t.json").string();
  write_trace(t, csv, TraceFormat::kCsv);
  write_trace(t, json, TraceFormat::kJson);
  const IterateTrace c = read_trace_csv(csv);
  const IterateTrace j = read_trace_json(json);
  REQUIRE(c.size() == 2);
  REQUIRE(j.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(c[i].same_values(t[i]));
    CHECK(j[i].same_values(t[i]));
    CHECK(c[i].wall_time_seconds == t[i].wall_time_seconds);
  }
}
