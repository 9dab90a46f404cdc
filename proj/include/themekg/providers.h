#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "themekg/model.h"

namespace themekg {

using Vector = std::vector<double>;

// Cosine similarity clamped to [-1, 1]; scale invariant. Zero vectors give 0.
double cosine(const Vector &a, const Vector &b);
// Divides by the L2 norm; throws InvalidArgument for a zero vector.
void l2_normalize(Vector &v);

class EmbeddingProvider;

// Cosine between a category name and an entity name.
double self_coherence(EmbeddingProvider &embedder, std::string_view category,
                      std::string_view entity);
// Cosine between a text (category name or mention) and the theme description.
double theme_coherence(EmbeddingProvider &embedder, std::string_view text,
                       const Theme &theme);

// Every provider is callable from several threads at once.

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::string id() const = 0;
  virtual size_t dimension() const = 0;
  // Unit-norm vector; identical input gives an identical vector.
  virtual Vector embed(std::string_view text) = 0;
};

struct Decoding {
  double temperature = 0.0;
  int max_tokens = 512;
};

class LlmProvider {
 public:
  virtual ~LlmProvider() = default;
  virtual std::string id() const = 0;
  virtual std::string complete(std::string_view prompt,
                               const Decoding &decoding = {}) = 0;
};

class WikiCategoryProvider {
 public:
  virtual ~WikiCategoryProvider() = default;
  virtual std::string id() const = 0;
  // Subcategory names, never including category itself.
  virtual std::vector<std::string> children(std::string_view category) = 0;
  virtual std::vector<std::string> page_categories(std::string_view title) = 0;
  virtual bool page_exists(std::string_view title) = 0;
  virtual bool category_exists(std::string_view category) = 0;
};

struct TaggedToken {
  std::string text;
  // Penn Treebank tag.
  std::string tag;
  // Byte span relative to the tagged sentence.
  Span span;
};

class PosTagger {
 public:
  virtual ~PosTagger() = default;
  virtual std::string id() const = 0;
  virtual std::vector<TaggedToken> tag(std::string_view sentence) = 0;
  // Ordered, non-overlapping byte spans relative to sentence.
  virtual std::vector<Span> noun_chunks(std::string_view sentence) = 0;
};

class ContextTypingProvider {
 public:
  virtual ~ContextTypingProvider() = default;
  virtual std::string id() const = 0;
  // Consistency of typing entity (seen in context) as category, in [0, 1].
  virtual double consistency(std::string_view entity, std::string_view context,
                             std::string_view category) = 0;
};

class CandidateCategoryRetriever {
 public:
  virtual ~CandidateCategoryRetriever() = default;
  virtual std::string id() const = 0;
  // At most k distinct category names, best first.
  virtual std::vector<std::string> retrieve(std::string_view mention,
                                            std::string_view context,
                                            size_t k) = 0;
};

// Multiplies every vector of an inner provider by a positive constant. Used
// to check that category choices are scale invariant.
class ScaledEmbedding : public EmbeddingProvider {
 public:
  ScaledEmbedding(EmbeddingProvider &inner, double factor);
  std::string id() const override;
  size_t dimension() const override { return inner_.dimension(); }
  Vector embed(std::string_view text) override;

 private:
  EmbeddingProvider &inner_;
  double factor_;
};

}  // namespace themekg
