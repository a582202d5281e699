// Copyright 2026 The compvec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <atomic>
#include <cstdlib>
#include <string_view>

#include "compvec/simd.hpp"

namespace compvec::simd {
namespace {

bool cpu_has(Isa isa) noexcept {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(COMPVEC_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::kNeon:
#if defined(COMPVEC_HAVE_NEON)
      return true;  // mandatory on AArch64
#else
      return false;
#endif
  }
  return false;
}

Isa resolve() noexcept {
  if (const char* env = std::getenv("COMPVEC_SIMD")) {
    const std::string_view want(env);
    for (Isa isa : {Isa::kScalar, Isa::kAvx2, Isa::kNeon}) {
      if (want == isa_name(isa) && cpu_has(isa)) return isa;
    }
  }
  if (cpu_has(Isa::kAvx2)) return Isa::kAvx2;
  if (cpu_has(Isa::kNeon)) return Isa::kNeon;
  return Isa::kScalar;
}

std::atomic<const Kernels*> g_active{nullptr};
std::atomic<Isa> g_isa{Isa::kScalar};

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
    case Isa::kNeon:
      return "neon";
  }
  return "unknown";
}

const Kernels* kernels_for(Isa isa) noexcept {
  if (!cpu_has(isa)) return nullptr;
  switch (isa) {
    case Isa::kScalar:
      return &detail::kScalarKernels;
    case Isa::kAvx2:
#if defined(COMPVEC_HAVE_AVX2)
      return &detail::kAvx2Kernels;
#else
      return nullptr;
#endif
    case Isa::kNeon:
#if defined(COMPVEC_HAVE_NEON)
      return &detail::kNeonKernels;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

const Kernels& active() noexcept {
  const Kernels* k = g_active.load(std::memory_order_acquire);
  if (k == nullptr) {
    const Isa isa = resolve();
    k = kernels_for(isa);
    g_isa.store(isa, std::memory_order_relaxed);
    g_active.store(k, std::memory_order_release);
  }
  return *k;
}

Isa active_isa() noexcept {
  active();
  return g_isa.load(std::memory_order_relaxed);
}

bool set_active(Isa isa) noexcept {
  const Kernels* k = kernels_for(isa);
  if (k == nullptr) return false;
  g_isa.store(isa, std::memory_order_relaxed);
  g_active.store(k, std::memory_order_release);
  return true;
}

}  // namespace compvec::simd
