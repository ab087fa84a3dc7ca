#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "l1pca/matrix.hpp"
#include "l1pca/model.hpp"
#include "l1pca/solvers.hpp"

namespace l1pca {

struct FixedEffectSpec {
  Index n = 0;
  Index d = 0;
  Index k = 0;
  double sigma = 0.0;  // noise standard deviation
  std::uint64_t seed = 0;

  void validate() const;
};

struct FixedEffectInstance {
  Matrix x;  // d x n, x_i = z_i + e_i
  Matrix u;  // d x K ground-truth basis
  Matrix z;  // d x n noiseless part, columns in span(U), summing to zero
};

// Y, the coefficients a_i and the noise each draw from their own stream, so
// changing sigma leaves Y and Z untouched.
FixedEffectInstance gen_fixed_effect(const FixedEffectSpec& spec);

// ---- sparse labeled text ---------------------------------------------------
// One sample per line: "label idx:val idx:val ...", 1-based strictly
// ascending indices, integer labels. Blank lines are skipped.

struct LabeledDataset {
  SparseMatrix x;  // d x n
  std::vector<long long> labels;

  ProblemInstance instance(Index k) const;
};

LabeledDataset parse_sparse_labeled(std::istream& in, std::optional<Index> d_override = std::nullopt);
LabeledDataset read_sparse_labeled(const std::string& path, std::optional<Index> d_override = std::nullopt);
void write_sparse_labeled(std::ostream& out, const SparseMatrix& x, const std::vector<long long>& labels);
void write_sparse_labeled(const std::string& path, const SparseMatrix& x, const std::vector<long long>& labels);

// ---- dense binary ----------------------------------------------------------
// 16-byte header: "L1PCAMAT", uint32 rows, uint32 cols (little endian),
// then rows*cols little-endian float64 in column-major order.

void write_dense(const std::string& path, const Matrix& m);
Matrix read_dense(const std::string& path);

// Dense binary when the file starts with the magic, sparse text otherwise.
DataMatrix read_matrix_auto(const std::string& path, std::vector<long long>* labels = nullptr);

// ---- traces ----------------------------------------------------------------

enum class TraceFormat { kCsv, kJson };

inline constexpr const char* kTraceCsvHeader =
    "k,h_value,psi_value,delta_P_norm,delta_Q_norm,delta_C_norm,wall_time_seconds";

void write_trace(const IterateTrace& trace, std::ostream& out, TraceFormat format);
void write_trace(const IterateTrace& trace, const std::string& path, TraceFormat format);
IterateTrace read_trace_json(const std::string& path);
IterateTrace read_trace_csv(const std::string& path);

}  // namespace l1pca
