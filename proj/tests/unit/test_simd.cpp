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

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "compvec/rng.hpp"
#include "compvec/simd.hpp"

using namespace compvec;

namespace {

std::vector<simd::Isa> available() {
  std::vector<simd::Isa> out;
  for (auto isa : {simd::Isa::kAvx2, simd::Isa::kNeon}) {
    if (simd::kernels_for(isa)) out.push_back(isa);
  }
  return out;
}

std::vector<double> random_vec(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-2, 2);
  return v;
}

}  // namespace

TEST(Simd, ScalarAlwaysAvailable) {
  ASSERT_NE(simd::kernels_for(simd::Isa::kScalar), nullptr);
  EXPECT_EQ(simd::isa_name(simd::Isa::kScalar), "scalar");
  const auto active = simd::active_isa();
  EXPECT_TRUE(simd::set_active(simd::Isa::kScalar));
  EXPECT_EQ(simd::active_isa(), simd::Isa::kScalar);
  EXPECT_TRUE(simd::set_active(active));
}

TEST(Simd, VariantsMatchScalarReference) {
  const auto& ref = *simd::kernels_for(simd::Isa::kScalar);
  Rng rng(5);
  for (auto isa : available()) {
    SCOPED_TRACE(std::string(simd::isa_name(isa)));
    const auto& k = *simd::kernels_for(isa);
    for (std::size_t n = 0; n <= 67; ++n) {
      // Misaligned views exercise the unaligned load paths.
      auto a = random_vec(rng, n + 1);
      auto b = random_vec(rng, n + 1);
      const double* pa = a.data() + 1;
      const double* pb = b.data() + 1;

      double mag = 0;
      for (std::size_t i = 0; i < n; ++i) mag += std::abs(pa[i] * pb[i]);
      EXPECT_NEAR(k.dot(pa, pb, n), ref.dot(pa, pb, n), 1e-14 * (mag + 1));

      auto y1 = random_vec(rng, n + 1);
      auto y2 = y1;
      ref.axpy(0.75, pa, y1.data() + 1, n);
      k.axpy(0.75, pa, y2.data() + 1, n);
      for (std::size_t i = 0; i <= n; ++i) EXPECT_NEAR(y1[i], y2[i], 1e-15 * (std::abs(y1[i]) + 1));

      auto s1 = a;
      auto s2 = a;
      ref.scale(-1.5, s1.data() + 1, n);
      k.scale(-1.5, s2.data() + 1, n);
      EXPECT_EQ(s1, s2);

      std::vector<double> m1(n + 1, 9.0), m2(n + 1, 9.0);
      ref.mul(pa, pb, m1.data() + 1, n);
      k.mul(pa, pb, m2.data() + 1, n);
      EXPECT_EQ(m1, m2);
    }
  }
}

TEST(Simd, SpanWrappersUseActiveTable) {
  const std::vector<double> a{1, 2, 3, 4, 5};
  const std::vector<double> b{5, 4, 3, 2, 1};
  EXPECT_DOUBLE_EQ(simd::dot(a, b), 35.0);
  std::vector<double> y{1, 1, 1, 1, 1};
  simd::axpy(2.0, a, y);
  EXPECT_EQ(y, (std::vector<double>{3, 5, 7, 9, 11}));
  simd::scale(0.5, y);
  EXPECT_EQ(y, (std::vector<double>{1.5, 2.5, 3.5, 4.5, 5.5}));
  std::vector<double> out(5);
  simd::mul(a, b, out);
  EXPECT_EQ(out, (std::vector<double>{5, 8, 9, 8, 5}));
}
