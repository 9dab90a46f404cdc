// Prints the mock-embedding cosine for each pair of arguments, one per
// line, for comparison against the Python reference.
#include <cstdio>

#include "themekg/mock_providers.h"

int main(int argc, char **argv) {
  themekg::MockEmbedding embedder;
  for (int i = 1; i + 1 < argc; i += 2) {
    double c = themekg::cosine(embedder.embed(argv[i]), embedder.embed(argv[i + 1]));
    std::printf("%.17g\n", c);
  }
  return 0;
}
