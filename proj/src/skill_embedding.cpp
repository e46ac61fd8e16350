#include "exes/skill_embedding.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "exes/error.hpp"

namespace exes {

SkillEmbedding::SkillEmbedding(std::vector<std::string> tokens, std::size_t dimension,
                               std::vector<double> values)
    : tokens_(std::move(tokens)), dimension_(dimension), values_(std::move(values)) {
  if (values_.size() != tokens_.size() * dimension_) {
    throw Error(ErrorCode::kInvalidArgument, "embedding size mismatch");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, "non-finite embedding value");
  }
}

bool SkillEmbedding::is_zero(SkillId s) const {
  auto v = vector_of(s);
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

}  // namespace

double SkillEmbedding::cosine(std::span<const double> v, SkillId b) const {
  auto w = vector_of(b);
  const double nv = std::sqrt(dot(v, v));
  const double nw = std::sqrt(dot(w, w));
  if (nv == 0.0 || nw == 0.0) return 0.0;
  return dot(v, w) / (nv * nw);
}

double SkillEmbedding::cosine(SkillId a, SkillId b) const {
  // Normalize the argument order so that sim(a, b) and sim(b, a) round identically.
  if (b < a) std::swap(a, b);
  return cosine(vector_of(a), b);
}

std::vector<double> SkillEmbedding::centroid(std::span<const SkillId> targets) const {
  std::vector<double> c(dimension_, 0.0);
  for (SkillId s : targets) {
    auto v = vector_of(s);
    for (std::size_t i = 0; i < dimension_; ++i) c[i] += v[i];
  }
  if (!targets.empty()) {
    for (double& x : c) x /= static_cast<double>(targets.size());
  }
  return c;
}

std::vector<double> cooccurrence_counts(const CollaborationNetwork& net) {
  const std::size_t n = net.num_skills();
  std::vector<double> counts(n * n, 0.0);
  for (std::size_t u = 0; u < net.num_nodes(); ++u) {
    auto skills = net.skills_of(node_id(u));
    for (SkillId a : skills) {
      for (SkillId b : skills) {
        if (a != b) counts[index(a) * n + index(b)] += 1.0;
      }
    }
  }
  return counts;
}

std::vector<double> ppmi(const std::vector<double>& counts, std::size_t n) {
  std::vector<double> row(n, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) row[i] += counts[i * n + j];
    total += row[i];
  }
  std::vector<double> out(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double c = counts[i * n + j];
      if (c <= 0.0) continue;
      const double pmi = std::log(c * total / (row[i] * row[j]));
      out[i * n + j] = std::max(0.0, pmi);
    }
  }
  return out;
}

std::size_t default_embedding_dimension(const CollaborationNetwork& net) {
  return std::min<std::size_t>(net.num_skills(), 16);
}

SkillEmbedding fit_embedding(const CollaborationNetwork& net, std::size_t dimension) {
  const std::size_t n = net.num_skills();
  if (dimension == 0 || dimension > n) {
    throw Error(ErrorCode::kDimensionTooLarge, "dimension " + std::to_string(dimension) +
                                                   " for " + std::to_string(n) + " skills");
  }
  const std::vector<double> m = ppmi(cooccurrence_counts(net), n);
  Eigen::MatrixXd a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m[i * n + j];
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU);
  Eigen::MatrixXd u = svd.matrixU();
  const Eigen::VectorXd& sigma = svd.singularValues();

  std::vector<double> values(n * dimension, 0.0);
  for (std::size_t c = 0; c < dimension; ++c) {
    const auto col = static_cast<Eigen::Index>(c);
    Eigen::Index pivot = 0;
    for (Eigen::Index r = 1; r < u.rows(); ++r) {
      if (std::abs(u(r, col)) > std::abs(u(pivot, col))) pivot = r;
    }
    const double sign = u(pivot, col) < 0.0 ? -1.0 : 1.0;
    // Numerically null directions carry no co-occurrence signal.
    const double sv = sigma(col) > 1e-12 * sigma(0) ? sigma(col) : 0.0;
    const double scale = std::sqrt(sv);
    for (std::size_t r = 0; r < n; ++r) {
      values[r * dimension + c] = sign * u(static_cast<Eigen::Index>(r), col) * scale;
    }
  }
  // Skills without any co-occurrence get exactly the zero vector.
  for (std::size_t r = 0; r < n; ++r) {
    bool empty = true;
    for (std::size_t j = 0; j < n && empty; ++j) empty = m[r * n + j] == 0.0;
    if (empty) std::fill_n(values.begin() + static_cast<std::ptrdiff_t>(r * dimension), dimension, 0.0);
  }
  std::vector<std::string> tokens;
  for (std::size_t i = 0; i < n; ++i) tokens.push_back(net.skill_token(skill_id(i)));
  return SkillEmbedding(std::move(tokens), dimension, std::move(values));
}

std::vector<SimilarSkill> rank_similar(const SkillEmbedding& emb, std::span<const SkillId> targets,
                                       std::span<const SkillId> exclude) {
  if (emb.vocabulary_size() == 0) throw Error(ErrorCode::kEmptyVocabulary, "empty vocabulary");
  if (targets.empty()) throw Error(ErrorCode::kInvalidArgument, "no target skills");
  const std::vector<double> c = emb.centroid(targets);
  std::vector<SimilarSkill> out;
  for (std::size_t i = 0; i < emb.vocabulary_size(); ++i) {
    const SkillId s = skill_id(i);
    if (std::find(exclude.begin(), exclude.end(), s) != exclude.end()) continue;
    out.push_back({s, emb.cosine(c, s)});
  }
  const auto& tokens = emb.tokens();
  std::sort(out.begin(), out.end(), [&](const SimilarSkill& a, const SimilarSkill& b) {
    const bool za = emb.is_zero(a.skill);
    const bool zb = emb.is_zero(b.skill);
    if (za != zb) return zb;
    const auto ka = std::llround(a.similarity * 1e12);
    const auto kb = std::llround(b.similarity * 1e12);
    if (ka != kb) return ka > kb;
    return tokens[index(a.skill)] < tokens[index(b.skill)];
  });
  return out;
}

std::vector<SkillId> top_similar(const SkillEmbedding& emb, std::span<const SkillId> targets,
                                 std::span<const SkillId> exclude, std::size_t t) {
  std::vector<SkillId> out;
  for (const auto& s : rank_similar(emb, targets, exclude)) {
    if (out.size() >= t) break;
    out.push_back(s.skill);
  }
  return out;
}

void save_embedding(const SkillEmbedding& emb, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  char buf[40];
  for (std::size_t i = 0; i < emb.vocabulary_size(); ++i) {
    out << emb.tokens()[i] << '\t';
    auto v = emb.vector_of(skill_id(i));
    for (std::size_t j = 0; j < v.size(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", v[j]);
      out << (j ? "," : "") << buf;
    }
    out << '\n';
  }
}

SkillEmbedding load_embedding(const CollaborationNetwork& net, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::map<std::string, std::vector<double>> rows;
  std::string line;
  std::size_t number = 0;
  std::size_t dimension = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error(ErrorCode::kParseError, "embedding line " + std::to_string(number));
    }
    std::vector<double> v;
    std::stringstream ss(line.substr(tab + 1));
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        v.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw Error(ErrorCode::kParseError, "embedding line " + std::to_string(number));
      }
    }
    if (dimension == 0) dimension = v.size();
    if (v.size() != dimension || dimension == 0) {
      throw Error(ErrorCode::kParseError, "embedding line " + std::to_string(number) +
                                              ": inconsistent dimension");
    }
    rows[line.substr(0, tab)] = std::move(v);
  }
  if (rows.size() != net.num_skills()) {
    throw Error(ErrorCode::kParseError, "embedding does not match the skill universe");
  }
  std::vector<std::string> tokens;
  std::vector<double> values;
  for (std::size_t i = 0; i < net.num_skills(); ++i) {
    const std::string& token = net.skill_token(skill_id(i));
    auto it = rows.find(token);
    if (it == rows.end()) throw Error(ErrorCode::kParseError, "embedding lacks skill " + token);
    tokens.push_back(token);
    values.insert(values.end(), it->second.begin(), it->second.end());
  }
  return SkillEmbedding(std::move(tokens), dimension, std::move(values));
}

}  // namespace exes
