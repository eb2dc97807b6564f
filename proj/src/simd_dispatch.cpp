#include "cloudlap/simd.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace cloudlap {
namespace simd {

bool avx2_available() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2") != 0;
#else
    return false;
#endif
}

bool neon_available() {
#if defined(__aarch64__)
    return true;
#else
    return false;
#endif
}

namespace {

const Ops* pick() {
    const char* req = std::getenv("CLOUDLAP_SIMD");
    if (req != nullptr && *req != '\0') {
        if (std::strcmp(req, "scalar") == 0) return &scalar_ops();
#if defined(__x86_64__) || defined(_M_X64)
        if (std::strcmp(req, "avx2") == 0) {
            if (avx2_available()) return avx2_ops_or_null();
            std::fprintf(stderr,
                         "cloudlap: CLOUDLAP_SIMD=avx2 requested but the cpu "
                         "lacks avx2, using scalar kernels\n");
            return &scalar_ops();
        }
#endif
#if defined(__aarch64__)
        if (std::strcmp(req, "neon") == 0) return neon_ops_or_null();
#endif
        std::fprintf(stderr,
                     "cloudlap: unknown CLOUDLAP_SIMD value '%s', using "
                     "auto-detection\n",
                     req);
    }
#if defined(__x86_64__) || defined(_M_X64)
    if (avx2_available()) return avx2_ops_or_null();
#endif
#if defined(__aarch64__)
    return neon_ops_or_null();
#endif
    return &scalar_ops();
}

} // namespace

const Ops& active_ops() {
    static const Ops* chosen = pick();
    return *chosen;
}

std::string active_name() { return active_ops().name; }

} // namespace simd
} // namespace cloudlap
