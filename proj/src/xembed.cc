// Copyright 2026 The Wikimine Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "wikimine/xembed.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "wikimine/util.h"

namespace wikimine {

EmbeddingSpace::EmbeddingSpace(std::string lang, std::vector<std::string> words,
                               RowMatrix vectors)
    : lang_(std::move(lang)), words_(std::move(words)), vectors_(std::move(vectors)) {
  if (static_cast<Eigen::Index>(words_.size()) != vectors_.rows()) {
    throw std::invalid_argument("embedding words and rows differ in count");
  }
  if (!vectors_.allFinite()) throw std::invalid_argument("embedding has non-finite values");
  for (std::size_t r = 0; r < words_.size(); ++r) {
    if (!index_.emplace(words_[r], static_cast<int>(r)).second) {
      throw std::invalid_argument("duplicate embedding word '" + words_[r] + "'");
    }
  }
}

int EmbeddingSpace::Find(std::string_view word) const {
  auto it = index_.find(std::string(word));
  return it == index_.end() ? -1 : it->second;
}

EmbeddingSpace ReadEmbeddings(std::istream &in, const std::string &lang,
                              EmbeddingLoadStats *stats) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("embedding file has no header");
  const auto header = SplitWhitespace(StripCr(line));
  long long declared = 0, dim = 0;
  if (header.size() != 2 || !ParseInt(header[0], &declared) || !ParseInt(header[1], &dim) ||
      declared < 0 || dim <= 0) {
    throw DataError("corrupt embedding header '" + std::string(StripCr(line)) + "'");
  }
  EmbeddingLoadStats local;
  std::vector<std::string> words;
  std::vector<double> values;
  std::unordered_map<std::string, bool> seen;
  std::vector<double> row(static_cast<std::size_t>(dim));
  while (std::getline(in, line)) {
    const auto fields = SplitWhitespace(StripCr(line));
    if (fields.empty()) continue;
    ++local.rows_read;
    bool ok = static_cast<long long>(fields.size()) == dim + 1;
    for (long long c = 0; ok && c < dim; ++c) {
      double v = 0;
      ok = ParseDouble(fields[static_cast<std::size_t>(c) + 1], &v) && std::isfinite(v);
      row[static_cast<std::size_t>(c)] = v;
    }
    if (!ok) {
      ++local.skipped_malformed;
      continue;
    }
    if (!seen.emplace(std::string(fields[0]), true).second) {
      ++local.skipped_duplicate;
      continue;
    }
    words.emplace_back(fields[0]);
    values.insert(values.end(), row.begin(), row.end());
  }
  const std::size_t allowed = std::max<std::size_t>(1, local.rows_read / 100);
  if (local.skipped_malformed > allowed) {
    throw DataError(std::to_string(local.skipped_malformed) + " of " +
                    std::to_string(local.rows_read) + " embedding rows are malformed");
  }
  if (stats != nullptr) *stats = local;
  RowMatrix matrix = Eigen::Map<const RowMatrix>(
      values.data(), static_cast<Eigen::Index>(words.size()), static_cast<Eigen::Index>(dim));
  return EmbeddingSpace(lang, std::move(words), std::move(matrix));
}

EmbeddingSpace LoadEmbeddings(const std::filesystem::path &path, const std::string &lang,
                              EmbeddingLoadStats *stats) {
  std::ifstream in = OpenForRead(path);
  try {
    return ReadEmbeddings(in, lang, stats);
  } catch (const DataError &e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void WriteEmbeddings(std::ostream &out, const EmbeddingSpace &space) {
  out << space.size() << ' ' << space.dim() << '\n';
  for (std::size_t r = 0; r < space.size(); ++r) {
    out << space.words()[r];
    for (double v : space.Vector(static_cast<int>(r))) out << ' ' << FormatDouble(v);
    out << '\n';
  }
}

void SaveEmbeddings(const std::filesystem::path &path, const EmbeddingSpace &space) {
  std::ofstream out = OpenForWrite(path);
  WriteEmbeddings(out, space);
}

namespace {

// (S)^(-1/2) for a symmetric positive semi-definite S; null directions map
// to zero.
Eigen::MatrixXd InverseSqrt(const Eigen::MatrixXd &s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s);
  const Eigen::VectorXd &lambda = solver.eigenvalues();
  const double floor = std::max(lambda.cwiseAbs().maxCoeff(), 1.0) * 1e-14;
  Eigen::VectorXd inv = lambda.unaryExpr(
      [floor](double l) { return l > floor ? 1.0 / std::sqrt(l) : 0.0; });
  return solver.eigenvectors() * inv.asDiagonal() * solver.eigenvectors().transpose();
}

// Singular values below this are treated as zero when reducing k.
constexpr double kRankTolerance = 1e-10;

void WriteVector(std::ostream &out, const Eigen::VectorXd &v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) out << ' ';
    out << FormatDouble(v(i));
  }
  out << '\n';
}

void WriteMatrix(std::ostream &out, const Eigen::MatrixXd &m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) out << ' ';
      out << FormatDouble(m(r, c));
    }
    out << '\n';
  }
}

}  // namespace

int DefaultCcaDim(int dim_e, int dim_f) { return std::max(1, std::min(dim_e, dim_f) / 2); }

CcaProjection FitCcaOnPairs(const Eigen::MatrixXd &x, const Eigen::MatrixXd &y, int k,
                            std::optional<double> epsilon) {
  if (x.rows() != y.rows()) throw std::invalid_argument("CCA inputs differ in row count");
  if (x.rows() < 2) throw DataError("fewer than 2 usable pairs for CCA");
  const int dim_e = static_cast<int>(x.cols());
  const int dim_f = static_cast<int>(y.cols());
  if (k < 1 || k > std::min(dim_e, dim_f)) {
    throw std::invalid_argument("CCA dimension k=" + std::to_string(k) +
                                " outside [1, min(d_e, d_f)]");
  }
  const double n = static_cast<double>(x.rows());
  CcaProjection proj;
  proj.dim_e = dim_e;
  proj.dim_f = dim_f;
  proj.mean_e = x.colwise().mean().transpose();
  proj.mean_f = y.colwise().mean().transpose();
  const Eigen::MatrixXd xc = x.rowwise() - proj.mean_e.transpose();
  const Eigen::MatrixXd yc = y.rowwise() - proj.mean_f.transpose();
  Eigen::MatrixXd sxx = xc.transpose() * xc / n;
  Eigen::MatrixXd syy = yc.transpose() * yc / n;
  const Eigen::MatrixXd sxy = xc.transpose() * yc / n;
  if (epsilon) {
    if (!(*epsilon >= 0.0)) throw std::invalid_argument("CCA epsilon must be >= 0");
    proj.epsilon = *epsilon;
  } else {
    proj.epsilon = kRelativeEpsilon * (sxx.trace() + syy.trace()) / (dim_e + dim_f);
  }
  sxx.diagonal().array() += proj.epsilon;
  syy.diagonal().array() += proj.epsilon;
  const Eigen::MatrixXd wx = InverseSqrt(sxx);
  const Eigen::MatrixXd wy = InverseSqrt(syy);
  const Eigen::MatrixXd c = wx * sxy * wy;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(c, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd &sigma = svd.singularValues();
  int rank = 0;
  while (rank < k && rank < sigma.size() && sigma(rank) > kRankTolerance) ++rank;
  if (rank == 0) throw DataError("CCA cross-covariance has zero rank");
  proj.k = rank;
  proj.a = wx * svd.matrixU().leftCols(rank);
  proj.b = wy * svd.matrixV().leftCols(rank);
  for (int col = 0; col < rank; ++col) {
    Eigen::Index arg = 0;
    proj.a.col(col).cwiseAbs().maxCoeff(&arg);
    if (proj.a(arg, col) < 0) {
      proj.a.col(col) *= -1.0;
      proj.b.col(col) *= -1.0;
    }
    proj.correlations.push_back(sigma(col));
  }
  return proj;
}

CcaProjection FitCca(const BilingualDictionary &dict, const EmbeddingSpace &emb_e,
                     const EmbeddingSpace &emb_f, int k, std::optional<double> epsilon,
                     std::size_t *usable_pairs) {
  std::vector<std::pair<int, int>> rows;
  for (const auto &[key, provenance] : dict.entries()) {
    const int re = emb_e.Find(key.first);
    const int rf = emb_f.Find(key.second);
    if (re >= 0 && rf >= 0) rows.emplace_back(re, rf);
  }
  if (usable_pairs != nullptr) *usable_pairs = rows.size();
  if (rows.size() < 2) throw DataError("fewer than 2 usable pairs for CCA");
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), emb_e.dim());
  Eigen::MatrixXd y(static_cast<Eigen::Index>(rows.size()), emb_f.dim());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    x.row(static_cast<Eigen::Index>(r)) = emb_e.vectors().row(rows[r].first);
    y.row(static_cast<Eigen::Index>(r)) = emb_f.vectors().row(rows[r].second);
  }
  return FitCcaOnPairs(x, y, k, epsilon);
}

EmbeddingSpace Project(const EmbeddingSpace &space, Side side, const CcaProjection &proj) {
  const Eigen::VectorXd &mean = side == Side::kE ? proj.mean_e : proj.mean_f;
  const Eigen::MatrixXd &m = side == Side::kE ? proj.a : proj.b;
  if (space.dim() != m.rows() || mean.size() != m.rows()) {
    throw std::invalid_argument("embedding dimension " + std::to_string(space.dim()) +
                                " does not match the projection input " +
                                std::to_string(m.rows()));
  }
  RowMatrix out = (space.vectors().rowwise() - mean.transpose()) * m;
  return EmbeddingSpace(space.lang(), space.words(), std::move(out));
}

double Cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw std::invalid_argument("cosine of vectors of different sizes");
  double dot = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  if (uu == 0.0 || vv == 0.0) return 0.0;
  return dot / (std::sqrt(uu) * std::sqrt(vv));
}

void CcaProjection::Write(std::ostream &out) const {
  out << "dims " << dim_e << ' ' << dim_f << '\n';
  out << "k " << k << '\n';
  out << "epsilon " << FormatDouble(epsilon) << '\n';
  out << "[mean_e]\n";
  WriteVector(out, mean_e);
  out << "[mean_f]\n";
  WriteVector(out, mean_f);
  out << "[a]\n";
  WriteMatrix(out, a);
  out << "[b]\n";
  WriteMatrix(out, b);
  out << "[correlations]\n";
  WriteVector(out, Eigen::Map<const Eigen::VectorXd>(correlations.data(),
                                                     static_cast<Eigen::Index>(correlations.size())));
}

void CcaProjection::Save(const std::filesystem::path &path) const {
  std::ofstream out = OpenForWrite(path);
  Write(out);
}

namespace {

class ProjectionReader {
 public:
  explicit ProjectionReader(std::istream &in) : in_(in) {}

  std::vector<std::string_view> Line() {
    if (!std::getline(in_, line_)) throw DataError("truncated CCA projection file");
    return SplitWhitespace(StripCr(line_));
  }

  long long Int(std::string_view field) {
    long long v = 0;
    if (!ParseInt(field, &v)) Fail();
    return v;
  }

  double Double(std::string_view field) {
    double v = 0;
    if (!ParseDouble(field, &v)) Fail();
    return v;
  }

  void Expect(std::string_view header) {
    const auto fields = Line();
    if (fields.size() != 1 || fields[0] != header) Fail();
  }

  std::vector<double> Row(long long width) {
    const auto fields = Line();
    if (static_cast<long long>(fields.size()) != width) Fail();
    std::vector<double> values;
    for (std::string_view f : fields) values.push_back(Double(f));
    return values;
  }

  [[noreturn]] void Fail() { throw DataError("malformed CCA projection line '" + line_ + "'"); }

 private:
  std::istream &in_;
  std::string line_;
};

}  // namespace

CcaProjection CcaProjection::Read(std::istream &in) {
  ProjectionReader reader(in);
  CcaProjection proj;
  auto fields = reader.Line();
  if (fields.size() != 3 || fields[0] != "dims") reader.Fail();
  proj.dim_e = static_cast<int>(reader.Int(fields[1]));
  proj.dim_f = static_cast<int>(reader.Int(fields[2]));
  fields = reader.Line();
  if (fields.size() != 2 || fields[0] != "k") reader.Fail();
  proj.k = static_cast<int>(reader.Int(fields[1]));
  fields = reader.Line();
  if (fields.size() != 2 || fields[0] != "epsilon") reader.Fail();
  proj.epsilon = reader.Double(fields[1]);
  if (proj.dim_e < 1 || proj.dim_f < 1 || proj.k < 1) reader.Fail();
  auto read_vector = [&](std::string_view header, int size) {
    reader.Expect(header);
    const auto values = reader.Row(size);
    return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(values.data(), size));
  };
  auto read_matrix = [&](std::string_view header, int rows, int cols) {
    reader.Expect(header);
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r) {
      const auto values = reader.Row(cols);
      for (int c = 0; c < cols; ++c) m(r, c) = values[static_cast<std::size_t>(c)];
    }
    return m;
  };
  proj.mean_e = read_vector("[mean_e]", proj.dim_e);
  proj.mean_f = read_vector("[mean_f]", proj.dim_f);
  proj.a = read_matrix("[a]", proj.dim_e, proj.k);
  proj.b = read_matrix("[b]", proj.dim_f, proj.k);
  reader.Expect("[correlations]");
  proj.correlations = reader.Row(proj.k);
  return proj;
}

CcaProjection CcaProjection::Load(const std::filesystem::path &path) {
  std::ifstream in = OpenForRead(path);
  return Read(in);
}

}  // namespace wikimine
