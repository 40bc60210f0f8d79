#include <cstdlib>
#include <string_view>

#include "mdp/kernels.hpp"

namespace mdp::kernels {

#ifndef MDP_HAVE_AVX2
const KernelTable* avx2_table() { return nullptr; }
#endif

const KernelTable& active_table() {
  static const KernelTable& chosen = [] () -> const KernelTable& {
    const char* force = std::getenv("MDP_FORCE_SCALAR");
    if (force != nullptr && std::string_view(force) == "1") return scalar_table();
#if defined(MDP_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
    if (__builtin_cpu_supports("avx2") && avx2_table() != nullptr) return *avx2_table();
#endif
    return scalar_table();
  }();
  return chosen;
}

}  // namespace mdp::kernels
