// Compiled with -mavx2; only reached after a runtime CPU check.
#include <immintrin.h>

#include <bit>

#include "qec/kernels.hpp"

namespace qec::kernels::detail {
namespace {

constexpr std::size_t kLane = 4;  // 64-bit words per __m256i

void xor_into_avx2(Word* dst, const Word* src, std::size_t words) {
  std::size_t i = 0;
  for (; i + kLane <= words; i += kLane) {
    auto* d = reinterpret_cast<__m256i*>(dst + i);
    const __m256i x = _mm256_loadu_si256(d);
    const __m256i y = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src + i));
    _mm256_storeu_si256(d, _mm256_xor_si256(x, y));
  }
  for (; i < words; ++i) dst[i] ^= src[i];
}

Word fold(__m256i v) {
  alignas(32) Word lanes[kLane];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), v);
  return lanes[0] ^ lanes[1] ^ lanes[2] ^ lanes[3];
}

bool and_parity_avx2(const Word* a, const Word* b, std::size_t words) {
  __m256i acc = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + kLane <= words; i += kLane) {
    const __m256i x = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    const __m256i y = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
    acc = _mm256_xor_si256(acc, _mm256_and_si256(x, y));
  }
  Word tail = fold(acc);
  for (; i < words; ++i) tail ^= a[i] & b[i];
  return (std::popcount(tail) & 1) != 0;
}

// Nibble lookup popcount (Mula); byte counts are summed with SAD.
std::size_t popcount_avx2(const Word* a, std::size_t words) {
  const __m256i lookup =
      _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4, 0, 1, 1, 2, 1, 2, 2, 3, 1, 2,
                       2, 3, 2, 3, 3, 4);
  const __m256i low_mask = _mm256_set1_epi8(0x0f);
  __m256i sums = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + kLane <= words; i += kLane) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    const __m256i lo = _mm256_and_si256(v, low_mask);
    const __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), low_mask);
    const __m256i bytes =
        _mm256_add_epi8(_mm256_shuffle_epi8(lookup, lo), _mm256_shuffle_epi8(lookup, hi));
    sums = _mm256_add_epi64(sums, _mm256_sad_epu8(bytes, _mm256_setzero_si256()));
  }
  alignas(32) Word lanes[kLane];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), sums);
  std::size_t total = static_cast<std::size_t>(lanes[0] + lanes[1] + lanes[2] + lanes[3]);
  for (; i < words; ++i) total += static_cast<std::size_t>(std::popcount(a[i]));
  return total;
}

bool is_zero_avx2(const Word* a, std::size_t words) {
  __m256i acc = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + kLane <= words; i += kLane) {
    acc = _mm256_or_si256(acc, _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i)));
  }
  if (!_mm256_testz_si256(acc, acc)) return false;
  for (; i < words; ++i) {
    if (a[i] != 0) return false;
  }
  return true;
}

}  // namespace

const KernelTable& avx2_table_impl() {
  static const KernelTable table{"avx2", xor_into_avx2, and_parity_avx2, popcount_avx2,
                                 is_zero_avx2};
  return table;
}

}  // namespace qec::kernels::detail
