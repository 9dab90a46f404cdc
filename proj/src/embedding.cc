#include <algorithm>
#include <cmath>

#include "themekg/errors.h"
#include "themekg/providers.h"

namespace themekg {

double cosine(const Vector &a, const Vector &b) {
  if (a.size() != b.size()) {
    throw InvalidArgument("cosine of vectors with different dimensions");
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
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

void l2_normalize(Vector &v) {
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm == 0.0) throw InvalidArgument("cannot normalize a zero vector");
  for (double &x : v) x /= norm;
}

double self_coherence(EmbeddingProvider &embedder, std::string_view category,
                      std::string_view entity) {
  return cosine(embedder.embed(category), embedder.embed(entity));
}

double theme_coherence(EmbeddingProvider &embedder, std::string_view text,
                       const Theme &theme) {
  return cosine(embedder.embed(text), embedder.embed(theme.description));
}

ScaledEmbedding::ScaledEmbedding(EmbeddingProvider &inner, double factor)
    : inner_(inner), factor_(factor) {
  if (!(factor > 0.0)) throw InvalidArgument("scale factor must be positive");
}

std::string ScaledEmbedding::id() const {
  return inner_.id() + "*" + std::to_string(factor_);
}

Vector ScaledEmbedding::embed(std::string_view text) {
  Vector v = inner_.embed(text);
  for (double &x : v) x *= factor_;
  return v;
}

}  // namespace themekg
