#include <cstdlib>
#include <string_view>

#include "qec/kernels.hpp"

namespace qec::kernels {

#if defined(QEC_HAVE_AVX2_KERNELS)
namespace detail {
const KernelTable& avx2_table_impl();
}
#endif

const KernelTable* avx2_table() {
#if defined(QEC_HAVE_AVX2_KERNELS)
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("popcnt");
  return supported ? &detail::avx2_table_impl() : nullptr;
#else
  return nullptr;
#endif
}

namespace {

const KernelTable& select() {
  if (const char* forced = std::getenv("QEC_KERNELS");
      forced != nullptr && std::string_view(forced) == "scalar") {
    return scalar_table();
  }
  if (const KernelTable* fast = avx2_table()) return *fast;
  return scalar_table();
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

}  // namespace qec::kernels
