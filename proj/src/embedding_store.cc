#include "nlidb/embedding_store.h"

#include <cmath>
#include <sstream>

#include "nlidb/error.h"
#include "nlidb/text.h"

namespace nlidb {

namespace {
constexpr char kStage[] = "load_embeddings";
}  // namespace

EmbeddingStore::EmbeddingStore(size_t dim) : dim_(dim) {
  if (dim == 0) throw Error(kStage, "embedding dimension must be positive");
}

void EmbeddingStore::Add(const std::string &word, Vector vector) {
  if (vector.size() != dim_) {
    throw Error(kStage, "vector for \"" + word + "\" has " +
                            std::to_string(vector.size()) + " components, expected " +
                            std::to_string(dim_));
  }
  vectors_[word] = std::move(vector);
}

const Vector *EmbeddingStore::Find(std::string_view word) const {
  auto it = vectors_.find(std::string(word));
  if (it != vectors_.end()) return &it->second;
  it = vectors_.find(ToLower(word));
  return it == vectors_.end() ? nullptr : &it->second;
}

std::optional<Vector> EmbeddingStore::Phrase(std::span<const std::string> words) const {
  Vector sum(dim_, 0.0);
  size_t known = 0;
  for (const auto &word : words) {
    const Vector *v = Find(word);
    if (v == nullptr) continue;
    for (size_t i = 0; i < dim_; ++i) sum[i] += (*v)[i];
    ++known;
  }
  if (known == 0) return std::nullopt;
  for (double &x : sum) x /= static_cast<double>(known);
  return sum;
}

double Cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error("map_with_embeddings", "dimension mismatch: " + std::to_string(a.size()) +
                                           " vs " + std::to_string(b.size()));
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

EmbeddingStore LoadEmbeddings(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError(kStage, "missing header", 1);
  ++line_no;
  std::istringstream header(line);
  long long count = -1;
  long long dim = -1;
  if (!(header >> count >> dim) || count < 0 || dim <= 0) {
    throw ParseError(kStage, "header must be \"<count> <dim>\"", line_no);
  }
  EmbeddingStore store(static_cast<size_t>(dim));
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty()) continue;
    std::istringstream row(line);
    std::string word;
    row >> word;
    Vector v;
    double x = 0.0;
    while (row >> x) v.push_back(x);
    if (!row.eof()) throw ParseError(kStage, "non-numeric component", line_no);
    if (v.size() != store.dim()) {
      throw ParseError(kStage, "expected " + std::to_string(dim) + " components, found " +
                                   std::to_string(v.size()), line_no);
    }
    store.Add(word, std::move(v));
  }
  if (static_cast<long long>(store.size()) != count) {
    throw ParseError(kStage, "header announces " + std::to_string(count) +
                                 " words, file holds " + std::to_string(store.size()), 1);
  }
  return store;
}

EmbeddingStore LoadEmbeddingsFile(const std::string &path) {
  return LoadEmbeddings(ReadFile(path));
}

}  // namespace nlidb
