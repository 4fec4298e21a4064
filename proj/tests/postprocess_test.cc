// Copyright 2026 The Eigencontour Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "eigencontour/postprocess.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "eigencontour/errors.h"
#include "eigencontour/prediction_io.h"
#include "oracles.h"

namespace eigencontour {
namespace {

using oracle::Uniform;

constexpr int kN = 36;

// Basis spanning {1, cos t, sin t, cos 2t}: every constant profile lies in it.
EigenBasis HarmonicBasis() {
  std::mt19937_64 rng(17);
  ContourMatrix a(kN);
  for (int j = 0; j < 20; ++j) {
    const double w[4] = {Uniform(rng, 10, 20), Uniform(rng, -3, 3),
                         Uniform(rng, -3, 3), Uniform(rng, -3, 3)};
    std::vector<double> col(kN);
    for (int i = 0; i < kN; ++i) {
      const double t = SampleAngle(i, kN);
      col[i] = w[0] + w[1] * std::cos(t) + w[2] * std::sin(t) +
               w[3] * std::cos(2 * t);
    }
    a.AddColumn(col);
  }
  return BuildBasis(a, 4);
}

PredictionMaps EmptyMaps(int h, int w, int k, int m, int stride) {
  PredictionMaps maps;
  maps.height = h;
  maps.width = w;
  maps.categories = k;
  maps.coefficients = m;
  maps.stride = stride;
  maps.p.assign(static_cast<size_t>(h) * w * k, 0.0f);
  maps.o.assign(static_cast<size_t>(h) * w, 0.0f);
  maps.r.assign(static_cast<size_t>(h) * w * m, 0.0f);
  return maps;
}

void Plant(PredictionMaps& maps, int row, int col, int category, float p,
           float o, const CoeffVector& c) {
  const size_t cell = static_cast<size_t>(row) * maps.width + col;
  maps.p[cell * maps.categories + category] = p;
  maps.o[cell] = o;
  for (int k = 0; k < maps.coefficients; ++k) {
    maps.r[cell * maps.coefficients + k] = static_cast<float>(c.values[k]);
  }
}

PredictionMaps RandomMaps(std::mt19937_64& rng, int h, int w, int k, int m) {
  PredictionMaps maps = EmptyMaps(h, w, k, m, 4);
  for (float& v : maps.p) v = static_cast<float>(Uniform(rng, 0, 1));
  for (float& v : maps.o) v = static_cast<float>(Uniform(rng, 0, 1));
  for (float& v : maps.r) v = static_cast<float>(Uniform(rng, -2, 2));
  return maps;
}

Instance RectInstance(double score, int x0, int y0, int x1, int y1) {
  Instance inst;
  inst.score = score;
  inst.mask = oracle::RectMask(32, 32, x0, y0, x1, y1);
  return inst;
}

// Reference greedy suppression with an explicit "alive" array.
std::vector<int> GreedyOracle(const std::vector<Instance>& c, double thr) {
  std::vector<bool> alive(c.size(), true);
  std::vector<int> kept;
  for (size_t i = 0; i < c.size(); ++i) {
    if (!alive[i]) continue;
    kept.push_back(static_cast<int>(i));
    for (size_t j = i + 1; j < c.size(); ++j) {
      if (alive[j] && MaskIou(c[i].mask, c[j].mask) > thr) alive[j] = false;
    }
  }
  return kept;
}

TEST_CASE("confidence_scores") {
  PredictionMaps maps = EmptyMaps(2, 2, 3, 1, 1);
  Plant(maps, 0, 0, 1, 0.8f, 0.5f, CoeffVector{{0.0}});
  maps.p[1 * 3 + 0] = 0.9f;  // cell (0,1) has p but o = 0
  const ScoreGrid g = ConfidenceScores(maps);
  CHECK(g.score[0] == doctest::Approx(0.4).epsilon(1e-7));
  CHECK(g.category[0] == 1);
  CHECK(g.score[1] == 0.0);
  // All-zero p ties at class 0.
  CHECK(g.category[3] == 0);

  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const PredictionMaps r = RandomMaps(rng, 5, 7, 4, 2);
    const ScoreGrid s = ConfidenceScores(r);
    for (int cell = 0; cell < 35; ++cell) {
      int best = 0;
      for (int k = 1; k < 4; ++k)
        if (r.p[cell * 4 + k] > r.p[cell * 4 + best]) best = k;
      CHECK(s.category[cell] == best);
      CHECK(s.score[cell] == static_cast<double>(r.o[cell]) *
                                 static_cast<double>(r.p[cell * 4 + best]));
    }
  }
}

TEST_CASE("candidate_filter") {
  ScoreGrid zeros{2, 3, std::vector<double>(6, 0.0), std::vector<int>(6, 0)};
  CHECK(CandidateFilter(zeros, 0.05).empty());
  CHECK(CandidateFilter(zeros, 0.0).size() == 6);

  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    ScoreGrid g{6, 9, std::vector<double>(54), std::vector<int>(54, 0)};
    for (double& s : g.score) {
      // Coarse values force ties.
      s = std::round(Uniform(rng, 0, 1) * 10) / 10 * Uniform(rng, 0, 1) > 0.3
              ? 0.5
              : std::round(Uniform(rng, 0, 1) * 20) / 20;
    }
    std::vector<Candidate> expected;
    for (int i = 0; i < 54; ++i) expected.push_back({i / 9, i % 9, g.score[i]});
    std::stable_sort(expected.begin(), expected.end(),
                     [](const Candidate& a, const Candidate& b) {
                       return a.score > b.score;
                     });
    std::vector<Candidate> scanned;
    for (const Candidate& c : expected)
      if (c.score >= 0.05) scanned.push_back(c);
    CHECK(CandidateFilter(g, 0.05) == scanned);
  }
}

TEST_CASE("decode_instance") {
  const EigenBasis basis = HarmonicBasis();
  const CoeffVector disk = Encode(basis, std::vector<double>(kN, 10.0));

  SUBCASE("constant radii give a disk") {
    PredictionMaps maps = EmptyMaps(8, 8, 2, 4, 8);
    Plant(maps, 3, 3, 1, 0.9f, 0.9f, disk);
    const auto inst = DecodeInstance(maps, basis, 3, 3, 64, 64);
    REQUIRE(inst.has_value());
    CHECK(inst->center == Point2{28, 28});
    CHECK(inst->category == 1);
    CHECK(inst->score == doctest::Approx(0.81).epsilon(1e-6));
    const Mask ideal = oracle::DiskMask(64, 64, {28, 28}, 10.0);
    CHECK(MaskIou(inst->mask, ideal) >= 0.95);
  }
  SUBCASE("zero coefficients are discarded") {
    PredictionMaps maps = EmptyMaps(4, 4, 1, 4, 4);
    Plant(maps, 1, 1, 0, 1.0f, 1.0f, CoeffVector{{0, 0, 0, 0}});
    CHECK_FALSE(DecodeInstance(maps, basis, 1, 1, 16, 16).has_value());
  }
  SUBCASE("stride 4 maps cell (0,0) to (2,2)") {
    PredictionMaps maps = EmptyMaps(4, 4, 1, 4, 4);
    Plant(maps, 0, 0, 0, 1.0f, 1.0f, disk);
    const auto inst = DecodeInstance(maps, basis, 0, 0, 16, 16);
    REQUIRE(inst.has_value());
    CHECK(inst->center == Point2{2, 2});
  }
  SUBCASE("radius scale multiplies decoded radii") {
    PredictionMaps maps = EmptyMaps(8, 8, 1, 4, 8);
    Plant(maps, 4, 4, 0, 1.0f, 1.0f, Encode(basis, std::vector<double>(kN, 2.5)));
    const auto inst = DecodeInstance(maps, basis, 4, 4, 64, 64, 4.0);
    REQUIRE(inst.has_value());
    CHECK(MaskIou(inst->mask, oracle::DiskMask(64, 64, {36, 36}, 10.0)) >= 0.95);
  }
  SUBCASE("errors") {
    PredictionMaps maps = EmptyMaps(4, 4, 1, 3, 4);
    CHECK_THROWS_AS(DecodeInstance(maps, basis, 0, 0, 16, 16), ValidationError);
    PredictionMaps ok = EmptyMaps(4, 4, 1, 4, 4);
    CHECK_THROWS_AS(DecodeInstance(ok, basis, 4, 0, 16, 16), ValidationError);
  }
}

TEST_CASE("maps validation") {
  PredictionMaps maps = EmptyMaps(2, 2, 1, 1, 1);
  CHECK_NOTHROW(maps.Validate());
  maps.p[0] = 1.5f;
  CHECK_THROWS_AS(maps.Validate(), ValidationError);
  maps = EmptyMaps(2, 2, 1, 1, 1);
  maps.r[0] = NAN;
  CHECK_THROWS_AS(maps.Validate(), ValidationError);
  maps = EmptyMaps(2, 2, 1, 1, 0);
  CHECK_THROWS_AS(maps.Validate(), ValidationError);
  maps = EmptyMaps(2, 2, 1, 1, 1);
  maps.o.pop_back();
  CHECK_THROWS_AS(maps.Validate(), ValidationError);
}

TEST_CASE("nms") {
  CHECK(Nms({RectInstance(0.9, 0, 0, 4, 4)}).size() == 1);

  const auto dup = Nms({RectInstance(0.9, 0, 0, 8, 8), RectInstance(0.8, 0, 0, 8, 8)});
  REQUIRE(dup.size() == 1);
  CHECK(dup[0].score == 0.9);

  // A-B and B-C overlap above 0.5, A-C below: greedy keeps A and C.
  const std::vector<Instance> chain = {RectInstance(0.9, 0, 0, 10, 10),
                                       RectInstance(0.8, 2, 0, 12, 10),
                                       RectInstance(0.7, 4, 0, 14, 10)};
  const auto kept = Nms(chain);
  REQUIRE(kept.size() == 2);
  CHECK(kept[0].score == 0.9);
  CHECK(kept[1].score == 0.7);
  CHECK(GreedyOracle(chain, 0.5) == std::vector<int>{0, 2});

  CHECK_THROWS_AS(Nms({RectInstance(0.1, 0, 0, 2, 2), RectInstance(0.9, 0, 0, 2, 2)}),
                  ValidationError);
}

TEST_CASE("nms matches the greedy oracle on random boxes") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Instance> c;
    const int count = 1 + static_cast<int>(rng() % 15);
    for (int i = 0; i < count; ++i) {
      const int x0 = rng() % 20, y0 = rng() % 20;
      c.push_back(RectInstance(Uniform(rng, 0, 1), x0, y0, x0 + 4 + rng() % 10,
                               y0 + 4 + rng() % 10));
    }
    std::stable_sort(c.begin(), c.end(), [](const Instance& a, const Instance& b) {
      return a.score > b.score;
    });
    const double thr = Uniform(rng, 0.1, 1.0);
    const auto kept = Nms(c, thr);
    const auto expected = GreedyOracle(c, thr);
    REQUIRE(kept.size() == expected.size());
    for (size_t i = 0; i < kept.size(); ++i) {
      CHECK(kept[i].score == c[expected[i]].score);
    }
    for (size_t i = 0; i < kept.size(); ++i)
      for (size_t j = i + 1; j < kept.size(); ++j)
        CHECK(MaskIou(kept[i].mask, kept[j].mask) <= thr);
  }
}

TEST_CASE("run_postprocess") {
  const EigenBasis basis = HarmonicBasis();
  const CoeffVector disk = Encode(basis, std::vector<double>(kN, 9.0));

  SUBCASE("one confident pixel") {
    PredictionMaps maps = EmptyMaps(16, 16, 3, 4, 4);
    Plant(maps, 8, 5, 2, 0.9f, 0.8f, disk);
    const auto out = RunPostprocess(maps, basis);
    REQUIRE(out.size() == 1);
    const auto manual = DecodeInstance(maps, basis, 8, 5, 64, 64);
    REQUIRE(manual.has_value());
    CHECK(out[0].mask == manual->mask);
    CHECK(out[0].category == 2);
    CHECK(out[0].center == Point2{22, 34});
  }
  SUBCASE("all-zero centerness") {
    PredictionMaps maps = EmptyMaps(8, 8, 1, 4, 4);
    for (float& v : maps.p) v = 1.0f;
    CHECK(RunPostprocess(maps, basis).empty());
  }
  SUBCASE("adjacent duplicates collapse") {
    PredictionMaps maps = EmptyMaps(16, 16, 1, 4, 4);
    Plant(maps, 8, 8, 0, 0.9f, 0.9f, disk);
    Plant(maps, 8, 9, 0, 0.9f, 0.8f, disk);
    const auto out = RunPostprocess(maps, basis);
    REQUIRE(out.size() == 1);
    CHECK(out[0].center == Point2{34, 34});
  }
  SUBCASE("threshold just above a score drops it") {
    PredictionMaps maps = EmptyMaps(16, 16, 1, 4, 4);
    Plant(maps, 3, 3, 0, 1.0f, 0.06f, disk);
    CHECK(RunPostprocess(maps, basis).size() == 1);
    maps.o[3 * 16 + 3] = 0.04f;
    CHECK(RunPostprocess(maps, basis).empty());
  }
  SUBCASE("multiple levels form one pool") {
    PredictionMaps fine = EmptyMaps(16, 16, 1, 4, 4);
    PredictionMaps coarse = EmptyMaps(8, 8, 1, 4, 8);
    Plant(fine, 2, 2, 0, 0.9f, 0.9f, disk);
    Plant(coarse, 5, 5, 0, 0.9f, 0.7f, disk);
    const std::vector<PredictionMaps> levels = {fine, coarse};
    const auto out = RunPostprocess(levels, basis);
    REQUIRE(out.size() == 2);
    CHECK(out[0].score > out[1].score);
  }
}

TEST_CASE("run_postprocess invariants on random maps") {
  std::mt19937_64 rng(4);
  const EigenBasis basis = HarmonicBasis();
  for (int trial = 0; trial < 8; ++trial) {
    PredictionMaps maps = RandomMaps(rng, 12, 12, 3, 4);
    for (size_t cell = 0; cell < maps.cells(); ++cell) {
      maps.r[cell * 4] = static_cast<float>(Uniform(rng, 20, 60));
    }
    PostprocessConfig config;
    config.confidence_threshold = 0.2;
    config.threads = 1 + trial % 3;
    const auto out = RunPostprocess(maps, basis, config);
    for (size_t i = 0; i < out.size(); ++i) {
      CHECK(out[i].score >= 0.2);
      CHECK_FALSE(out[i].mask.Empty());
      if (i > 0) CHECK(out[i].score <= out[i - 1].score);
      for (size_t j = i + 1; j < out.size(); ++j)
        CHECK(MaskIou(out[i].mask, out[j].mask) <= 0.5);
    }
    const auto again = RunPostprocess(maps, basis, config);
    REQUIRE(again.size() == out.size());
    for (size_t i = 0; i < out.size(); ++i) {
      CHECK(again[i].mask == out[i].mask);
      CHECK(again[i].score == out[i].score);
    }
    // Raising the threshold can only remove instances.
    config.confidence_threshold = 0.5;
    for (const Instance& inst : RunPostprocess(maps, basis, config)) {
      const bool present = std::any_of(out.begin(), out.end(), [&](const Instance& o) {
        return o.score == inst.score && o.mask == inst.mask;
      });
      CHECK(present);
    }
  }
}

TEST_CASE("candidate cap limits decoding to the top scores") {
  const EigenBasis basis = HarmonicBasis();
  PredictionMaps maps = EmptyMaps(16, 16, 1, 4, 4);
  const CoeffVector small = Encode(basis, std::vector<double>(kN, 1.5));
  Plant(maps, 1, 1, 0, 1.0f, 0.9f, small);
  Plant(maps, 10, 10, 0, 1.0f, 0.8f, small);
  PostprocessConfig config;
  config.max_candidates = 1;
  const auto out = RunPostprocess(maps, basis, config);
  REQUIRE(out.size() == 1);
  CHECK(out[0].score == doctest::Approx(0.9));
}

TEST_CASE("prediction map files") {
  std::mt19937_64 rng(5);
  const PredictionMaps a = RandomMaps(rng, 3, 5, 2, 4);
  const PredictionMaps b = RandomMaps(rng, 2, 2, 1, 4);
  const std::string one = EncodePredictionMaps(a);
  CHECK(one.size() == 28 + 4 * (15 * 2 + 15 + 15 * 4));
  const auto decoded = DecodePredictionMaps(one + EncodePredictionMaps(b));
  REQUIRE(decoded.size() == 2);
  CHECK(decoded[0].p == a.p);
  CHECK(decoded[0].o == a.o);
  CHECK(decoded[0].r == a.r);
  CHECK(decoded[1].r == b.r);
  CHECK(decoded[1].stride == 4);

  std::string bad = one;
  bad[0] = 'Z';
  CHECK_THROWS_AS(DecodePredictionMaps(bad), ValidationError);
  CHECK_THROWS_AS(DecodePredictionMaps(one.substr(0, 40)), ValidationError);
  CHECK_THROWS_AS(DecodePredictionMaps(""), ValidationError);
}

TEST_CASE("instance json roundtrip") {
  Instance inst = RectInstance(0.75, 3, 4, 9, 12);
  inst.category = 5;
  inst.center = {6.5, 8.0};
  const auto j = InstanceToJson(inst);
  CHECK(j["category"] == 5);
  CHECK(j["mask"].is_string());
  const Instance back = InstanceFromJson(j);
  CHECK(back.category == 5);
  CHECK(back.score == 0.75);
  CHECK(back.center == inst.center);
  CHECK(back.mask == inst.mask);
}

}  // namespace
}  // namespace eigencontour
