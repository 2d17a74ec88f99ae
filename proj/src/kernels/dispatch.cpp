#include "gramml/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace gramml::kernels {

#if defined(__x86_64__) || defined(_M_X64)
const Ops& avx2_ops(); // kernels_avx2.cpp

static bool cpu_has_avx2_fma() {
#if defined(__GNUC__) || defined(__clang__)
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}
#endif

std::vector<const Ops*> available_ops() {
    std::vector<const Ops*> ops{&scalar_ops()};
#if defined(__x86_64__) || defined(_M_X64)
    if (cpu_has_avx2_fma()) ops.push_back(&avx2_ops());
#endif
    return ops;
}

namespace {

const Ops* pick_default() {
    auto ops = available_ops();
    const Ops* chosen = ops.back(); // widest supported
    if (const char* env = std::getenv("GRAMML_KERNELS")) {
        for (const Ops* candidate : ops)
            if (std::strcmp(candidate->name, env) == 0) chosen = candidate;
    }
    return chosen;
}

const Ops*& active_slot() {
    static const Ops* slot = pick_default();
    return slot;
}

} // namespace

const Ops& active() { return *active_slot(); }

bool set_active(const std::string& name) {
    for (const Ops* candidate : available_ops()) {
        if (name == candidate->name) {
            active_slot() = candidate;
            return true;
        }
    }
    return false;
}

} // namespace gramml::kernels
