// tests/test_cgmm.cpp

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

#include <cmath>
#include <random>

#include "doctest.h"
#include "mcihn/cgmm.hpp"
#include "test_util.hpp"

using namespace mcihn;
using oracle::Mat;
using testutil::FromMat;
using testutil::MaxAbsDiff;
using testutil::ToMat;

namespace {

CgmmParams MakeParams(std::size_t d, std::uint64_t seed,
                      MmdKernel kernel = MmdKernel::kLinear) {
  CgmmConfig c;
  c.dim = d;
  c.adapt_dim = d;
  c.kernel = kernel;
  std::mt19937_64 rng(seed);
  return CgmmParams::Init(c, rng);
}

Tensor Rand(std::size_t r, std::size_t c, std::mt19937_64 &rng) {
  return FromMat(oracle::Random(r, c, rng));
}

}  // namespace

TEST_CASE("interaction matrix examples") {
  std::mt19937_64 rng(1);
  Tensor a = Rand(3, 2, rng), b = Rand(3, 2, rng), c = Rand(3, 2, rng);
  const Tensor zero_others[] = {b, c};
  Tensor m0 = InteractionMatrix(Tensor::Zeros(2, 2), a, zero_others);
  for (double v : m0.data()) CHECK(v == 0.0);

  const Tensor one[] = {Tensor::Scalar(3.0), Tensor::Scalar(4.0)};
  CHECK(InteractionMatrix(Tensor::Scalar(1.0), Tensor::Scalar(2.0), one).item() == 14.0);

  Tensor w = Rand(2, 2, rng);
  const Tensor same[] = {b, b};
  Tensor lhs = InteractionMatrix(w, a, same);
  Tensor rhs = Affine(MatMul(MatMul(a, w), Transpose(b)), 2.0);
  CHECK(MaxAbsDiff(lhs, ToMat(rhs)) < 1e-12);

  CHECK_THROWS_AS(InteractionMatrix(w, a, std::vector<Tensor>{Rand(3, 3, rng), b}),
                  ShapeError);
}

TEST_CASE("interaction matrix matches the scalar loop on 20 instances") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 20; ++i) {
    auto w = oracle::Random(16, 16, rng), s = oracle::Random(8, 16, rng);
    auto o1 = oracle::Random(8, 16, rng), o2 = oracle::Random(8, 16, rng);
    const Tensor others[] = {FromMat(o1), FromMat(o2)};
    CHECK(MaxAbsDiff(InteractionMatrix(FromMat(w), FromMat(s), others),
                     oracle::Interaction(w, s, o1, o2)) < 1e-9);
  }
}

TEST_CASE("attention transfer examples") {
  std::mt19937_64 rng(3);
  Tensor s = Rand(3, 2, rng);
  Tensor alpha;
  Tensor out = AttentionTransfer(Tensor::Zeros(3, 3), s, &alpha);
  for (double v : alpha.data()) CHECK(std::fabs(v - 1.0 / 3.0) < 1e-15);
  for (double v : out.data()) CHECK(v == 0.0);

  Tensor s1 = Rand(1, 4, rng);
  Tensor t1 = AttentionTransfer(Tensor::Scalar(-0.7), s1);
  CHECK(MaxAbsDiff(t1, ToMat(Affine(s1, -0.7))) < 1e-15);

  for (int i = 0; i < 20; ++i) {
    auto m = oracle::Random(3, 3, rng, -3, 3), core = oracle::Random(3, 2, rng);
    Tensor a;
    CHECK(MaxAbsDiff(AttentionTransfer(FromMat(m), FromMat(core), &a),
                     oracle::Transfer(m, core)) < 1e-9);
    for (std::size_t r = 0; r < 3; ++r)
      CHECK(std::fabs(a.at(r, 0) + a.at(r, 1) + a.at(r, 2) - 1.0) < 1e-9);
  }
}

TEST_CASE("pair gate examples") {
  CgmmParams p = MakeParams(3, 4);
  Tensor z = Tensor::Zeros(2, 3);
  PairGateParams &g = p.gates[Index(Pair::kVT)];
  for (double &v : g.b.mutable_data()) v = 0.0;
  Tensor closed = PairGate(p, z, z, Pair::kVT);
  for (double v : closed.data()) CHECK(v == 0.0);

  // Zero every block except the difference block; equal inputs give relu(b).
  std::mt19937_64 rng(5);
  Tensor s = Rand(2, 3, rng);
  Mat w = ToMat(g.w);
  for (std::size_t r = 0; r < 12; ++r)
    if (r < 6 || r >= 9)
      for (std::size_t c = 0; c < 3; ++c) w(r, c) = 0.0;
  g.w = FromMat(w, true);
  g.b = Tensor::Matrix(1, 3, {0.5, -0.2, 0.0}, true);
  Tensor out = PairGate(p, s, s, Pair::kVT);
  for (std::size_t r = 0; r < 2; ++r) {
    CHECK(out.at(r, 0) == 0.5);
    CHECK(out.at(r, 1) == 0.0);
    CHECK(out.at(r, 2) == 0.0);
  }

  CHECK(ParsePair("va") == Pair::kVA);
  CHECK_THROWS_AS(ParsePair("xy"), std::invalid_argument);
}

TEST_CASE("pair gate and joint representation match scalar loops on 20 instances") {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 20; ++i) {
    CgmmParams p = MakeParams(3, 100 + i);
    const Pair pair = kAllPairs[i % 3];
    PairGateParams &g = p.gates[Index(pair)];
    g.b = FromMat(oracle::Random(1, 3, rng), true);
    auto sp = oracle::Random(2, 3, rng), sq = oracle::Random(2, 3, rng);
    CHECK(MaxAbsDiff(PairGate(p, FromMat(sp), FromMat(sq), pair),
                     oracle::PairGate(ToMat(g.w), ToMat(g.b), sp, sq)) < 1e-9);

    CgmmParams q = MakeParams(2, 200 + i);
    const PairGateParams &h = q.gates[Index(pair)];
    auto gate = oracle::Random(2, 2, rng, 0, 1);
    auto ap = oracle::Random(2, 2, rng), s2p = oracle::Random(2, 2, rng);
    auto aq = oracle::Random(2, 2, rng), s2q = oracle::Random(2, 2, rng);
    CHECK(MaxAbsDiff(JointRepresentation(q, FromMat(ap), FromMat(s2p), FromMat(aq),
                                         FromMat(s2q), FromMat(gate), pair),
                     oracle::Joint(gate, ap, s2p, aq, s2q, ToMat(h.fuse_p),
                                   ToMat(h.fuse_q))) < 1e-9);
  }
}

TEST_CASE("joint representation examples") {
  std::mt19937_64 rng(7);
  CgmmParams p = MakeParams(2, 8);
  Tensor a = Rand(2, 2, rng), s = Rand(2, 2, rng);
  Tensor shut = JointRepresentation(p, a, s, a, s, Tensor::Zeros(2, 2), Pair::kTA);
  for (double v : shut.data()) CHECK(v == 0.0);
  PairGateParams &g = p.gates[Index(Pair::kTA)];
  g.fuse_p = Tensor::Zeros(4, 2, true);
  g.fuse_q = Tensor::Zeros(4, 2, true);
  Tensor gate = Rand(2, 2, rng);
  Tensor unprojected = JointRepresentation(p, a, s, a, s, gate, Pair::kTA);
  for (double v : unprojected.data()) CHECK(v == 0.0);
}

TEST_CASE("mmd examples") {
  Tensor eye = Tensor::Identity(2), zb = Tensor::Zeros(1, 2);
  Tensor a = Tensor::Matrix(2, 2, {1, 1, 1, -1});   // mean [1, 0]
  Tensor b = Tensor::Matrix(2, 2, {1, 1, -1, 1});   // mean [0, 1]
  CHECK(std::fabs(MmdSquared(eye, zb, a, b, {}).item() - 2.0) < 1e-15);
  CHECK(MmdSquared(eye, zb, a, a, {}).item() == 0.0);
  CHECK(MmdSquared(eye, zb, a, b, {}).item() == MmdSquared(eye, zb, b, a, {}).item());
  CHECK_THROWS(MmdSquared(eye, zb, Tensor({0, 2}), b, {}));
}

TEST_CASE("mmd matches scalar loops for both kernels on 20 instances") {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 20; ++i) {
    auto w = oracle::Random(16, 16, rng), b = oracle::Random(1, 16, rng);
    auto x = oracle::Random(8, 16, rng), y = oracle::Random(16, 16, rng, -0.5, 1.5);
    Tensor tw = FromMat(w), tb = FromMat(b), tx = FromMat(x), ty = FromMat(y);
    CHECK(std::fabs(MmdSquared(tw, tb, tx, ty, {}).item() - oracle::MmdLinear(w, b, x, y)) < 1e-9);
    const double sigma = i % 2 ? 0.0 : 2.5;
    CHECK(std::fabs(MmdSquared(tw, tb, tx, ty, {MmdKernel::kRbf, sigma}).item() -
                    oracle::MmdRbf(w, b, x, y, sigma)) < 1e-9);
  }
}

TEST_CASE("linear mmd ignores a shared translation when xi has no bias") {
  std::mt19937_64 rng(10);
  Tensor w = Rand(4, 4, rng), zb = Tensor::Zeros(1, 4);
  Tensor x = Rand(5, 4, rng), y = Rand(7, 4, rng), shift = Rand(1, 4, rng);
  const double base = MmdSquared(w, zb, x, y, {}).item();
  const double moved = MmdSquared(w, zb, AddRow(x, shift), AddRow(y, shift), {}).item();
  CHECK(std::fabs(base - moved) < 1e-12);
}

TEST_CASE("adaptation loss examples") {
  std::mt19937_64 rng(11);
  CgmmParams p = MakeParams(3, 12);
  Tensor s = Rand(4, 3, rng);
  LatentTriple same;
  for (Modality m : kAllModalities) same[m] = s;
  CHECK(std::fabs(AdaptationLoss(p, same).item()) < 1e-15);

  LatentTriple zeros;
  for (Modality m : kAllModalities) zeros[m] = Tensor::Zeros(4, 3);
  CHECK(AdaptationLoss(p, zeros).item() == 0.0);

  for (int i = 0; i < 20; ++i) {
    LatentTriple l;
    std::array<Mat, 3> raw;
    for (Modality m : kAllModalities) {
      raw[Index(m)] = oracle::Random(4, 3, rng);
      l[m] = FromMat(raw[Index(m)]);
    }
    double expected = 0.0;
    for (std::size_t core = 0; core < 3; ++core) {
      Mat other(8, 3);
      std::size_t row = 0;
      for (std::size_t o = 0; o < 3; ++o) {
        if (o == core) continue;
        for (std::size_t r = 0; r < 4; ++r, ++row)
          for (std::size_t c = 0; c < 3; ++c) other(row, c) = raw[o](r, c);
      }
      expected += oracle::MmdLinear(ToMat(p.xi_w[0]), ToMat(p.xi_b[0]), raw[core], other);
    }
    CHECK(std::fabs(AdaptationLoss(p, l).item() - expected) < 1e-9);
  }
}

TEST_CASE("any assignment of latents to core and auxiliaries is accepted") {
  std::mt19937_64 rng(13);
  CgmmParams p = MakeParams(16, 14);
  std::array<Tensor, 3> s = {Rand(8, 16, rng), Rand(8, 16, rng), Rand(8, 16, rng)};
  const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (const auto &pm : perms) {
    LatentTriple l;
    l[Modality::kVisual] = s[pm[0]];
    l[Modality::kText] = s[pm[1]];
    l[Modality::kAudio] = s[pm[2]];
    JointReps j = CgmmForward(p, l, kAllModalities);
    for (Pair pair : kAllPairs) {
      CHECK(j[pair].rows() == 8);
      CHECK(j[pair].cols() == 16);
    }
  }
}

TEST_CASE("per-path interaction option keeps one matrix per core") {
  CgmmConfig c;
  c.per_path_interaction = true;
  std::mt19937_64 rng(15);
  CgmmParams p = CgmmParams::Init(c, rng);
  CHECK(p.interaction.size() == 3);
  CHECK_FALSE(p.InteractionFor(Modality::kVisual).SameStorage(p.InteractionFor(Modality::kText)));
  CgmmParams shared = MakeParams(16, 16);
  CHECK(shared.interaction.size() == 1);
  CHECK(shared.InteractionFor(Modality::kAudio).SameStorage(shared.InteractionFor(Modality::kText)));
}

TEST_CASE("gate mechanism passes the gradient check at desk scale") {
  std::mt19937_64 rng(16);
  for (MmdKernel kernel : {MmdKernel::kLinear, MmdKernel::kRbf}) {
    CgmmConfig c;
    c.kernel = kernel;
    c.rbf_bandwidth = kernel == MmdKernel::kRbf ? 3.0 : 0.0;
    std::mt19937_64 init(17);
    CgmmParams p = CgmmParams::Init(c, init);
    LatentTriple l;
    for (Modality m : kAllModalities) l[m] = Rand(8, 16, rng);
    std::vector<Tensor> params = p.All();
    auto fn = [&] {
      JointReps j = CgmmForward(p, l, kAllModalities);
      Tensor total = AdaptationLoss(p, l);
      for (Pair pair : kAllPairs) total = Add(total, Mean(Mul(j[pair], j[pair])));
      return total;
    };
    CHECK(GradCheck(fn, params, 1e-5) < 1e-4);
  }
}
