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

#pragma once

// Dense float64 vector kernels used by every trainer's inner loop.
//
// Each kernel has a scalar reference implementation plus ISA-specific
// variants (AVX2+FMA on x86-64, NEON on AArch64). The variant is chosen once
// at first use from CPU feature detection; COMPVEC_SIMD=scalar|avx2|neon in
// the environment overrides the choice. Variants agree with the scalar
// reference to rounding (the vector variants reassociate sums).

#include <cassert>
#include <cstddef>
#include <span>
#include <string_view>

namespace compvec::simd {

enum class Isa { kScalar, kAvx2, kNeon };

struct Kernels {
  double (*dot)(const double* a, const double* b, std::size_t n);
  /// y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  /// x *= alpha
  void (*scale)(double alpha, double* x, std::size_t n);
  /// out[i] = a[i] * b[i]
  void (*mul)(const double* a, const double* b, double* out, std::size_t n);
};

/// Kernel table for `isa`; nullptr when the ISA was not compiled in or the
/// running CPU lacks it.
const Kernels* kernels_for(Isa isa) noexcept;

/// The table in use. First call resolves it.
const Kernels& active() noexcept;
Isa active_isa() noexcept;

/// Force a particular ISA (tests, benchmarking). Returns false when unavailable.
bool set_active(Isa isa) noexcept;

std::string_view isa_name(Isa isa) noexcept;

inline double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return active().dot(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  active().axpy(alpha, x.data(), y.data(), x.size());
}

inline void scale(double alpha, std::span<double> x) { active().scale(alpha, x.data(), x.size()); }

inline void mul(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  assert(a.size() == b.size() && a.size() == out.size());
  active().mul(a.data(), b.data(), out.data(), a.size());
}

namespace detail {
extern const Kernels kScalarKernels;
#if defined(COMPVEC_HAVE_AVX2)
extern const Kernels kAvx2Kernels;
#endif
#if defined(COMPVEC_HAVE_NEON)
extern const Kernels kNeonKernels;
#endif
}  // namespace detail

}  // namespace compvec::simd
