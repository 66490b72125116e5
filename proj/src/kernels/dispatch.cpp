// Copyright 2026 The MTAL Authors. All Rights Reserved.
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

#include <cstdlib>
#include <string_view>

#include "kernels_internal.hpp"

namespace mtal::kernels {
namespace {

bool CpuHasAvx2() {
#if MTAL_HAVE_X86
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable& SelectActive() {
  if (const char* forced = std::getenv("MTAL_ISA");
      forced != nullptr && std::string_view(forced) == "scalar") {
    return ScalarKernels();
  }
  if (const KernelTable* avx2 = KernelsFor(Isa::kAvx2)) return *avx2;
  return ScalarKernels();
}

}  // namespace

std::string_view IsaName(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
  }
  return "unknown";
}

const KernelTable* KernelsFor(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return &ScalarKernels();
    case Isa::kAvx2:
      return CpuHasAvx2() ? Avx2KernelsIfCompiled() : nullptr;
  }
  return nullptr;
}

const KernelTable& Active() {
  static const KernelTable& table = SelectActive();
  return table;
}

std::vector<Isa> AvailableIsas() {
  std::vector<Isa> out{Isa::kScalar};
  if (KernelsFor(Isa::kAvx2) != nullptr) out.push_back(Isa::kAvx2);
  return out;
}

}  // namespace mtal::kernels
