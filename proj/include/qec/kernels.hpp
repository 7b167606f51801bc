#pragma once
// Word-level GF(2) kernels used by the bit-packed containers in gf2.hpp.
//
// Two variants exist: a portable scalar one and an AVX2 one. The active
// variant is chosen once at startup from the CPU feature flags; setting
// QEC_KERNELS=scalar in the environment forces the scalar path.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace qec::kernels {

using Word = std::uint64_t;
inline constexpr std::size_t kWordBits = 64;

struct KernelTable {
  std::string_view name;
  /// dst[i] ^= src[i]
  void (*xor_into)(Word* dst, const Word* src, std::size_t words);
  /// parity of popcount(a & b)
  bool (*and_parity)(const Word* a, const Word* b, std::size_t words);
  std::size_t (*popcount)(const Word* a, std::size_t words);
  /// true iff every word is zero
  bool (*is_zero)(const Word* a, std::size_t words);
};

const KernelTable& scalar_table();

/// AVX2 table, or nullptr when the variant was not compiled in or the
/// running CPU lacks AVX2.
const KernelTable* avx2_table();

/// Variant selected for this process.
const KernelTable& active();

inline void xor_into(std::span<Word> dst, std::span<const Word> src) {
  active().xor_into(dst.data(), src.data(), dst.size());
}
inline bool and_parity(std::span<const Word> a, std::span<const Word> b) {
  return active().and_parity(a.data(), b.data(), a.size());
}
inline std::size_t popcount(std::span<const Word> a) {
  return active().popcount(a.data(), a.size());
}
inline bool is_zero(std::span<const Word> a) {
  return active().is_zero(a.data(), a.size());
}

}  // namespace qec::kernels
