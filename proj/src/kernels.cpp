#include <cstdlib>
#include <string>

#include "mfglab/errors.hpp"
#include "mfglab/kernels.hpp"

namespace mfg::kernels {
namespace {

const Ops& pick_backend() {
  const char* req = std::getenv("MFGLAB_KERNELS");
  if (req != nullptr) {
    const std::string name(req);
    if (name == "scalar") return scalar_ops();
    if (name == "avx2") {
      const Ops* ops = avx2_ops();
      if (ops == nullptr) {
        throw ConfigError(
            "MFGLAB_KERNELS=avx2 requested but AVX2 is not available on this "
            "CPU/build");
      }
      return *ops;
    }
    throw ConfigError("MFGLAB_KERNELS must be 'scalar' or 'avx2', got '" +
                      name + "'");
  }
  const Ops* ops = avx2_ops();
  return ops != nullptr ? *ops : scalar_ops();
}

}  // namespace

const Ops& active_ops() {
  static const Ops& ops = pick_backend();
  return ops;
}

}  // namespace mfg::kernels
