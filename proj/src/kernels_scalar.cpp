#include "qec/kernels.hpp"

#include <bit>

namespace qec::kernels {
namespace {

void xor_into_scalar(Word* dst, const Word* src, std::size_t words) {
  for (std::size_t i = 0; i < words; ++i) dst[i] ^= src[i];
}

bool and_parity_scalar(const Word* a, const Word* b, std::size_t words) {
  Word acc = 0;
  for (std::size_t i = 0; i < words; ++i) acc ^= a[i] & b[i];
  return (std::popcount(acc) & 1) != 0;
}

std::size_t popcount_scalar(const Word* a, std::size_t words) {
  std::size_t total = 0;
  for (std::size_t i = 0; i < words; ++i) total += static_cast<std::size_t>(std::popcount(a[i]));
  return total;
}

bool is_zero_scalar(const Word* a, std::size_t words) {
  Word acc = 0;
  for (std::size_t i = 0; i < words; ++i) acc |= a[i];
  return acc == 0;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar", xor_into_scalar, and_parity_scalar, popcount_scalar,
                                 is_zero_scalar};
  return table;
}

}  // namespace qec::kernels
