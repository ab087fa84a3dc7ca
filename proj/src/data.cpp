#include "l1pca/data.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "l1pca/error.hpp"
#include "l1pca/linalg.hpp"
#include "l1pca/random.hpp"

namespace l1pca {

namespace {

constexpr std::array<char, 8> kMagic{'L', '1', 'P', 'C', 'A', 'M', 'A', 'T'};
constexpr std::uint64_t kStreamY = 1;
constexpr std::uint64_t kStreamA = 2;
constexpr std::uint64_t kStreamE = 3;
constexpr int kMaxRetries = 3;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
T byteswap_if_big(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  }
  return v;
}

bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size() && std::isfinite(out);
}

template <class Int>
bool parse_int(std::string_view s, Int& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream f(path, mode);
  if (!f) throw Error(ErrorKind::kIo, "cannot open '" + path + "' for writing");
  return f;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream f(path, mode);
  if (!f) throw Error(ErrorKind::kIo, "cannot open '" + path + "'");
  return f;
}

}  // namespace

void FixedEffectSpec::validate() const {
  if (n < 1 || d < 1 || k < 1) throw Error(ErrorKind::kInvalidInput, "n, d, K must be >= 1");
  if (k > std::min(n, d)) throw Error(ErrorKind::kInvalidInput, "K must be <= min(n, d)");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw Error(ErrorKind::kInvalidInput, "sigma must be finite and >= 0");
}

FixedEffectInstance gen_fixed_effect(const FixedEffectSpec& spec) {
  spec.validate();
  FixedEffectInstance out;

  Matrix y;
  for (int attempt = 0;; ++attempt) {
    Philox ry(spec.seed, kStreamY + (static_cast<std::uint64_t>(attempt) << 32));
    y = gaussian_matrix(spec.d, spec.k, ry);
    const auto s = singular_values(y);
    if (s.back() > 1e-10 * s.front()) break;
    if (attempt == kMaxRetries) {
      throw Error(ErrorKind::kDegenerateUpdate, "gen_fixed_effect: Y^T Y singular after retries");
    }
  }
  out.u = polar_factor(y);

  Philox ra(spec.seed, kStreamA);
  Matrix a(spec.k, spec.n);
  for (double& v : a.values()) v = ra.uniform();
  for (Index i = 0; i < spec.k; ++i) {
    double mean = 0.0;
    for (Index j = 0; j < spec.n; ++j) mean += a(i, j);
    mean /= static_cast<double>(spec.n);
    for (Index j = 0; j < spec.n; ++j) a(i, j) -= mean;
  }
  out.z = matmul(out.u, a);

  Philox re(spec.seed, kStreamE);
  const double b = spec.sigma / std::sqrt(2.0);
  out.x = out.z;
  for (double& v : out.x.values()) v += re.laplace(b);
  return out;
}

ProblemInstance LabeledDataset::instance(Index k) const {
  ProblemInstance inst{DataMatrix(x), k, labels};
  inst.validate();
  return inst;
}

LabeledDataset parse_sparse_labeled(std::istream& in, std::optional<Index> d_override) {
  std::vector<Index> col_ptr{0};
  std::vector<Index> row_idx;
  std::vector<double> values;
  std::vector<long long> labels;
  Index max_index = 0;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view rest(line);
    auto next_token = [&rest]() -> std::string_view {
      const auto b = rest.find_first_not_of(" \t\r");
      if (b == std::string_view::npos) {
        rest = {};
        return {};
      }
      rest.remove_prefix(b);
      const auto e = rest.find_first_of(" \t\r");
      const auto tok = rest.substr(0, e);
      rest.remove_prefix(e == std::string_view::npos ? rest.size() : e);
      return tok;
    };
    std::string_view tok = next_token();
    if (tok.empty()) continue;

    long long label = 0;
    if (!parse_int(tok, label)) throw ParseError(line_no, "invalid label '" + std::string(tok) + "'");
    Index prev = 0;
    for (tok = next_token(); !tok.empty(); tok = next_token()) {
      const auto colon = tok.find(':');
      if (colon == std::string_view::npos) {
        throw ParseError(line_no, "expected index:value, got '" + std::string(tok) + "'");
      }
      Index idx = 0;
      double val = 0.0;
      if (!parse_int(tok.substr(0, colon), idx) || idx < 1) {
        throw ParseError(line_no, "invalid feature index in '" + std::string(tok) + "'");
      }
      if (!parse_double(tok.substr(colon + 1), val)) {
        throw ParseError(line_no, "invalid feature value in '" + std::string(tok) + "'");
      }
      if (idx <= prev) throw ParseError(line_no, "feature indices must be strictly ascending");
      prev = idx;
      row_idx.push_back(idx - 1);
      values.push_back(val);
      max_index = std::max(max_index, idx);
    }
    labels.push_back(label);
    col_ptr.push_back(static_cast<Index>(row_idx.size()));
  }
  if (labels.empty()) throw Error(ErrorKind::kParse, "no samples in input");
  Index d = max_index;
  if (d_override) {
    if (*d_override < max_index) {
      throw Error(ErrorKind::kParse, "feature dimension override " + std::to_string(*d_override) +
                                         " is smaller than the largest index " + std::to_string(max_index));
    }
    d = *d_override;
  }
  const auto n = static_cast<Index>(labels.size());
  return {SparseMatrix(d, n, std::move(col_ptr), std::move(row_idx), std::move(values)), std::move(labels)};
}

LabeledDataset read_sparse_labeled(const std::string& path, std::optional<Index> d_override) {
  auto f = open_in(path);
  return parse_sparse_labeled(f, d_override);
}

void write_sparse_labeled(std::ostream& out, const SparseMatrix& x, const std::vector<long long>& labels) {
  if (static_cast<Index>(labels.size()) != x.cols()) {
    throw Error(ErrorKind::kDimensionMismatch, "one label per column required");
  }
  const auto& cp = x.col_ptr();
  const auto& ri = x.row_idx();
  const auto& v = x.values();
  for (Index j = 0; j < x.cols(); ++j) {
    out << labels[static_cast<std::size_t>(j)];
    for (Index p = cp[j]; p < cp[j + 1]; ++p) out << ' ' << ri[p] + 1 << ':' << fmt17(v[p]);
    out << '\n';
  }
}

void write_sparse_labeled(const std::string& path, const SparseMatrix& x, const std::vector<long long>& labels) {
  auto f = open_out(path);
  write_sparse_labeled(f, x, labels);
  if (!f) throw Error(ErrorKind::kIo, "write failed for '" + path + "'");
}

void write_dense(const std::string& path, const Matrix& m) {
  if (m.rows() > 0xffffffffLL || m.cols() > 0xffffffffLL) {
    throw Error(ErrorKind::kInvalidInput, "matrix too large for the dense format");
  }
  auto f = open_out(path, std::ios::out | std::ios::binary);
  f.write(kMagic.data(), kMagic.size());
  const std::uint32_t dims[2] = {byteswap_if_big(static_cast<std::uint32_t>(m.rows())),
                                 byteswap_if_big(static_cast<std::uint32_t>(m.cols()))};
  f.write(reinterpret_cast<const char*>(dims), sizeof dims);
  for (double v : m.values()) {
    const double le = byteswap_if_big(v);
    f.write(reinterpret_cast<const char*>(&le), sizeof le);
  }
  if (!f) throw Error(ErrorKind::kIo, "write failed for '" + path + "'");
}

Matrix read_dense(const std::string& path) {
  auto f = open_in(path, std::ios::in | std::ios::binary);
  std::array<char, 8> magic{};
  std::uint32_t dims[2] = {0, 0};
  f.read(magic.data(), magic.size());
  f.read(reinterpret_cast<char*>(dims), sizeof dims);
  if (!f || magic != kMagic) throw Error(ErrorKind::kParse, "'" + path + "' is not a dense matrix file");
  const Index rows = byteswap_if_big(dims[0]);
  const Index cols = byteswap_if_big(dims[1]);
  std::vector<double> values(static_cast<std::size_t>(rows * cols));
  f.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(double)));
  if (!f) throw Error(ErrorKind::kParse, "'" + path + "' is truncated");
  if (f.peek() != std::char_traits<char>::eof()) {
    throw Error(ErrorKind::kParse, "'" + path + "' has trailing bytes");
  }
  for (double& v : values) v = byteswap_if_big(v);
  return Matrix(rows, cols, std::move(values));
}

DataMatrix read_matrix_auto(const std::string& path, std::vector<long long>* labels) {
  std::array<char, 8> magic{};
  {
    auto f = open_in(path, std::ios::in | std::ios::binary);
    f.read(magic.data(), magic.size());
    if (f && magic == kMagic) return read_dense(path);
  }
  auto ds = read_sparse_labeled(path);
  if (labels) *labels = std::move(ds.labels);
  return std::move(ds.x);
}

void write_trace(const IterateTrace& trace, std::ostream& out, TraceFormat format) {
  if (format == TraceFormat::kCsv) {
    out << kTraceCsvHeader << '\n';
    for (const auto& r : trace) {
      out << r.k << ',' << fmt17(r.h_value) << ',' << fmt17(r.psi_value) << ',' << fmt17(r.delta_P_norm) << ','
          << fmt17(r.delta_Q_norm) << ',' << fmt17(r.delta_C_norm) << ',' << fmt17(r.wall_time_seconds) << '\n';
    }
    return;
  }
  nlohmann::json j;
  j["schema_version"] = 1;
  j["records"] = nlohmann::json::array();
  for (const auto& r : trace) {
    j["records"].push_back({{"k", r.k},
                            {"h_value", r.h_value},
                            {"psi_value", r.psi_value},
                            {"delta_P_norm", r.delta_P_norm},
                            {"delta_Q_norm", r.delta_Q_norm},
                            {"delta_C_norm", r.delta_C_norm},
                            {"wall_time_seconds", r.wall_time_seconds}});
  }
  out << j.dump(2) << '\n';
}

void write_trace(const IterateTrace& trace, const std::string& path, TraceFormat format) {
  auto f = open_out(path);
  write_trace(trace, f, format);
  if (!f) throw Error(ErrorKind::kIo, "write failed for '" + path + "'");
}

IterateTrace read_trace_json(const std::string& path) {
  auto f = open_in(path);
  nlohmann::json j;
  try {
    f >> j;
    IterateTrace t;
    for (const auto& r : j.at("records")) {
      t.push_back({r.at("k").get<Index>(), r.at("h_value").get<double>(), r.at("psi_value").get<double>(),
                   r.at("delta_P_norm").get<double>(), r.at("delta_Q_norm").get<double>(),
                   r.at("delta_C_norm").get<double>(), r.at("wall_time_seconds").get<double>()});
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, "'" + path + "': " + e.what());
  }
}

IterateTrace read_trace_csv(const std::string& path) {
  auto f = open_in(path);
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(f, line) || line != kTraceCsvHeader) throw ParseError(1, "missing trace CSV header");
  IterateTrace t;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::array<double, 6> v{};
    Index k = 0;
    std::string_view rest(line);
    auto field = [&]() {
      const auto c = rest.find(',');
      const auto tok = rest.substr(0, c);
      rest.remove_prefix(c == std::string_view::npos ? rest.size() : c + 1);
      return tok;
    };
    if (!parse_int(field(), k)) throw ParseError(line_no, "invalid k");
    for (double& x : v)
      if (!parse_double(field(), x)) throw ParseError(line_no, "invalid number");
    t.push_back({k, v[0], v[1], v[2], v[3], v[4], v[5]});
  }
  return t;
}

}  // namespace l1pca
