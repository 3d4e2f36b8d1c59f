#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace nlidb {

using Vector = std::vector<double>;

// Word vectors in word2vec text format.
class EmbeddingStore {
 public:
  explicit EmbeddingStore(size_t dim);

  size_t dim() const { return dim_; }
  size_t size() const { return vectors_.size(); }

  // Throws nlidb::Error when the vector length differs from dim().
  void Add(const std::string &word, Vector vector);

  // Exact match first, then lowercase.
  const Vector *Find(std::string_view word) const;

  // Mean of the in-vocabulary words; nullopt when none are known.
  std::optional<Vector> Phrase(std::span<const std::string> words) const;

 private:
  size_t dim_;
  std::unordered_map<std::string, Vector> vectors_;
};

// Cosine similarity; 0 when either vector has zero norm. Throws nlidb::Error
// on a length mismatch.
double Cosine(std::span<const double> a, std::span<const double> b);

EmbeddingStore LoadEmbeddings(std::string_view text);
EmbeddingStore LoadEmbeddingsFile(const std::string &path);

}  // namespace nlidb
