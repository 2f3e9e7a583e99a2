#include "ebvs/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace ebvs::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

bool avx2_compiled_in() { return avx2_ops().name != scalar_ops().name; }

const Ops* resolve(std::string_view name) {
    if (name == "scalar") return &scalar_ops();
    if (name == "avx2") {
        if (!avx2_available()) {
            throw std::runtime_error("avx2 kernels requested but not available on this CPU");
        }
        return &avx2_ops();
    }
    if (name == "auto" || name.empty()) {
        return avx2_available() ? &avx2_ops() : &scalar_ops();
    }
    throw std::runtime_error("unknown kernel variant: " + std::string(name));
}

const Ops*& active_slot() {
    static const Ops* slot = [] {
        const char* env = std::getenv("EBVS_KERNELS");
        return resolve(env ? std::string_view(env) : std::string_view("auto"));
    }();
    return slot;
}

}  // namespace

bool avx2_available() { return avx2_compiled_in() && cpu_has_avx2(); }

const Ops& active() { return *active_slot(); }

void select(std::string_view name) { active_slot() = resolve(name); }

}  // namespace ebvs::kernels
