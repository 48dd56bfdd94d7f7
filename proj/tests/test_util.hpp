// tests/test_util.hpp

// Copyright 2026 The mcihn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MCIHN_TESTS_TEST_UTIL_HPP_
#define MCIHN_TESTS_TEST_UTIL_HPP_

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "mcihn/tensor.hpp"
#include "oracles.hpp"

namespace testutil {

inline oracle::Mat ToMat(const mcihn::Tensor &t) {
  return oracle::Mat(t.rows(), t.cols(),
                     std::vector<double>(t.data().begin(), t.data().end()));
}

inline mcihn::Tensor FromMat(const oracle::Mat &m, bool requires_grad = false) {
  return mcihn::Tensor({m.r, m.c}, m.v, requires_grad);
}

inline double MaxAbsDiff(const oracle::Mat &a, const oracle::Mat &b) {
  if (a.r != b.r || a.c != b.c) return 1e300;
  double m = 0.0;
  for (std::size_t i = 0; i < a.v.size(); ++i)
    m = std::max(m, std::fabs(a.v[i] - b.v[i]));
  return m;
}

inline double MaxAbsDiff(const mcihn::Tensor &a, const oracle::Mat &b) {
  return MaxAbsDiff(ToMat(a), b);
}

// Fresh scratch directory under the system temp path.
inline std::filesystem::path ScratchDir(const std::string &name) {
  auto dir = std::filesystem::temp_directory_path() /
             ("mcihn_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testutil

#endif  // MCIHN_TESTS_TEST_UTIL_HPP_
