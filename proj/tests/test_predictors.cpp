#include <doctest.h>

#include <cmath>
#include <random>

#include "clouds.hpp"
#include "oracles.hpp"
#include "vspc/errors.hpp"
#include "vspc/predictors.hpp"

using namespace vspc;

namespace {

LevelGraph graph_of(std::initializer_list<Coord> coords) {
  std::vector<MortonKey> keys;
  for (const auto& c : coords) keys.push_back(morton_encode(c));
  std::sort(keys.begin(), keys.end());
  return make_level_graph(0, keys);
}

Signal column(std::initializer_list<double> values) {
  Signal s(values.size(), 1);
  std::size_t i = 0;
  for (double v : values) s(i++, 0) = v;
  return s;
}

Signal random_signal(std::size_t n, std::size_t ch, std::uint64_t seed, double scale = 50.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  Signal s(n, ch);
  for (double& v : s.data()) v = 128 + u(rng);
  return s;
}

LlwaWeights uniform_weights() {
  LlwaWeights w;
  w.w.fill(1.0);
  return w;
}

// Dense p(f(X)) for the polynomial the codec actually evaluates, so the
// plumbing of predict can be checked exactly even where the Taylor series
// has not converged.
oracle::Mat dense_poly_inverse(const GramFunctions& f, int degree) {
  const oracle::Mat x = oracle::gram_matrix(f.graph());
  const auto n = x.rows();
  oracle::Vec d = x.diagonal();
  oracle::Mat m = d.cwiseSqrt().cwiseInverse().asDiagonal() * x * d.cwiseSqrt().cwiseInverse().asDiagonal();
  const PolySpec spec = build_polyspec(PolyTarget::kInverse, degree, f.mu());
  Eigen::SelfAdjointEigenSolver<oracle::Mat> es(m);
  oracle::Vec ev(n);
  for (Eigen::Index i = 0; i < n; ++i) ev(i) = evaluate_poly(spec, es.eigenvalues()(i));
  const oracle::Mat pm = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
  return d.cwiseSqrt().cwiseInverse().asDiagonal() * pm * d.cwiseSqrt().cwiseInverse().asDiagonal();
}

}  // namespace

TEST_CASE("predictor names") {
  for (auto k : {PredictorKind::kNone, PredictorKind::kBaselineLlwa, PredictorKind::kLlwaFull, PredictorKind::kPbf})
    CHECK(parse_predictor(predictor_name(k)) == k);
  CHECK(predictor_name(PredictorKind::kBaselineLlwa) == "baseline_llwa");
  CHECK_THROWS_AS(parse_predictor("bilateral"), ConfigError);
}

TEST_CASE("default weights and parameters") {
  const LlwaWeights g = gaussian_llwa_weights();
  CHECK(g.w[kSelfOffset] == 1.0);
  CHECK(g.w[offset_index({1, 0, 0})] == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
  CHECK(g.w[offset_index({1, -1, 1})] == doctest::Approx(std::exp(-6.0)).epsilon(1e-15));
  const PbfParams p = default_pbf_params();
  CHECK(p.stages() == 20);
  CHECK(p.r[0] == 1.0);
  CHECK(p.r[20] == 0.5);
  CHECK(p.sigma_x == 0.5);
  CHECK(p.sigma_y == 64.0);
  CHECK_THROWS_AS(gaussian_llwa_weights(0.0), std::invalid_argument);
  CHECK_THROWS_AS(default_pbf_params(-1), std::invalid_argument);
}

TEST_CASE("llwa examples") {
  const LevelGraph pair = graph_of({{0, 0, 0}, {1, 0, 0}});
  const Signal y = llwa(uniform_weights(), pair, column({1, 3}));
  CHECK(y(0, 0) == 2.0);
  CHECK(y(1, 0) == 2.0);

  const LevelGraph apart = graph_of({{0, 0, 0}, {5, 0, 0}});
  CHECK(llwa(gaussian_llwa_weights(), apart, column({7, -4})) == column({7, -4}));

  const auto cloud = testclouds::random_cloud(300, 4, 1);
  const LevelGraph g = make_level_graph(4, cloud.keys());
  Signal c(g.size(), 3);
  for (std::size_t i = 0; i < g.size(); ++i) c.row(i)[0] = 17.25, c.row(i)[1] = -3.0, c.row(i)[2] = 255.0;
  const Signal yc = llwa(gaussian_llwa_weights(), g, c);
  for (std::size_t i = 0; i < g.size(); ++i) {
    REQUIRE(yc(i, 0) == doctest::Approx(17.25).epsilon(1e-15));
    REQUIRE(yc(i, 2) == doctest::Approx(255.0).epsilon(1e-15));
  }

  LlwaWeights bad = uniform_weights();
  bad.w[kSelfOffset] = 0.0;
  CHECK_THROWS_AS(llwa(bad, pair, column({1, 3})), std::invalid_argument);
}

TEST_CASE("llwa matches the dense D^-1 W oracle") {
  const auto cloud = testclouds::blob_cloud(300, 5, 2);
  const LevelGraph g = make_level_graph(5, cloud.keys());
  const Signal x = random_signal(g.size(), 3, 3);
  CHECK(oracle::max_abs_diff(llwa(gaussian_llwa_weights(), g, x),
                             oracle::llwa_matrix(g.coords) * oracle::to_mat(x)) <= 1e-12);
}

TEST_CASE("bf_weights examples") {
  const LevelGraph pair = graph_of({{0, 0, 0}, {1, 0, 0}});
  PbfParams p = default_pbf_params(0);
  const auto same = bf_weights(p, pair, column({10, 10}));
  CHECK(same.w[kSelfOffset] == 1.0);
  const int face = offset_index({1, 0, 0});
  CHECK(same.w[static_cast<std::size_t>(face)] == doctest::Approx(0.135335283236613).epsilon(1e-12));
  CHECK(same.degree[0] == doctest::Approx(1.0 + std::exp(-2.0)).epsilon(1e-15));
  const auto diff = bf_weights(p, pair, column({10, 30}));
  CHECK(diff.w[static_cast<std::size_t>(face)] < same.w[static_cast<std::size_t>(face)]);
  CHECK(diff.w[static_cast<std::size_t>(face)] ==
        doctest::Approx(std::exp(-2.0) * std::exp(-400.0 / (2 * 64.0 * 64.0))).epsilon(1e-12));
  // Multi-channel distance is the full vector norm.
  Signal two(2, 2, 0.0);
  two(1, 0) = 3;
  two(1, 1) = 4;
  CHECK(bf_weights(p, pair, two).w[static_cast<std::size_t>(face)] ==
        doctest::Approx(std::exp(-2.0) * std::exp(-25.0 / (2 * 64.0 * 64.0))).epsilon(1e-12));
  p.sigma_y = 0;
  CHECK_THROWS_AS(bf_weights(p, pair, column({1, 2})), std::invalid_argument);
}

TEST_CASE("bf examples") {
  PbfParams p = default_pbf_params(0);
  const auto cloud = testclouds::random_cloud(200, 3, 4);
  const LevelGraph g = make_level_graph(3, cloud.keys());
  const Signal c(g.size(), 3, 42.0);
  const Signal yc = bf(p, g, c);
  for (double v : yc.data()) REQUIRE(v == doctest::Approx(42.0).epsilon(1e-15));

  // Two clusters of two nodes separated by a step; the clusters touch.
  const LevelGraph step = graph_of({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}});
  p.sigma_y = 1e-3;
  const Signal ys = bf(p, step, column({0, 0, 100, 100}));
  CHECK(ys(0, 0) == 0.0);
  CHECK(ys(1, 0) == 0.0);
  CHECK(ys(2, 0) == doctest::Approx(100.0).epsilon(1e-15));
  CHECK(ys(3, 0) == doctest::Approx(100.0).epsilon(1e-15));
  PbfParams single = p;
  single.r = {1.0, 1.0};
  for (const Signal& x : {column({0, 0, 100, 100}), column({0, 0.001, 100, 100.002})}) {
    const oracle::Mat want = oracle::pbf_matrix(step.coords, oracle::to_mat(x), single) * oracle::to_mat(x);
    CHECK(oracle::max_abs_diff(bf(p, step, x), want) <= 1e-12);
  }

  // The deviation from the spatial-only filter grows like |x_i - x_j|^2 / sy^2
  // times the signal spread, so 1e-9 at sy = 1e6 holds for unit-range data.
  p.sigma_y = 1e6;
  Signal x = random_signal(g.size(), 3, 5);
  for (double& v : x.data()) v = (v - 128.0) / 100.0;
  const Signal yb = bf(p, g, x), yl = llwa(gaussian_llwa_weights(p.sigma_x), g, x);
  for (std::size_t i = 0; i < yb.data().size(); ++i) REQUIRE(std::abs(yb.data()[i] - yl.data()[i]) <= 1e-9);
}

TEST_CASE("pbf examples") {
  const LevelGraph path = graph_of({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}});
  PbfParams p = default_pbf_params(0);
  p.r = {2.5};
  CHECK(pbf(p, path, column({1, 5, -2})) == column({2.5, 12.5, -5}));
  p.r = {1.0};
  CHECK(pbf(p, path, column({1, 5, -2})) == column({1, 5, -2}));

  p.r = {1.0, 0.5, 0.5};
  p.sigma_y = 4.0;
  const Signal x = column({1, 5, -2});
  const oracle::Mat dense = oracle::pbf_matrix(path.coords, oracle::to_mat(x), p) * oracle::to_mat(x);
  CHECK(oracle::max_abs_diff(pbf(p, path, x), dense) <= 1e-13);

  const auto cloud = testclouds::blob_cloud(400, 5, 6);
  const LevelGraph g = make_level_graph(5, cloud.keys());
  const Signal c(g.size(), 3, -7.5);
  const PbfParams p20 = default_pbf_params(20);
  for (double v : pbf(p20, g, c).data()) REQUIRE(v == doctest::Approx(-7.5).epsilon(1e-13));

  const Signal xr = random_signal(g.size(), 3, 7);
  const std::size_t before = instrument::sparse_applications();
  const Signal yr = pbf(p20, g, xr);
  CHECK(instrument::sparse_applications() - before == 20);
  CHECK(oracle::max_abs_diff(yr, oracle::pbf_matrix(g.coords, oracle::to_mat(xr), p20) * oracle::to_mat(xr)) <= 1e-10);
}

TEST_CASE("predict none copies the parent for p=1") {
  const auto cloud = testclouds::random_cloud(150, 4, 8);
  const Hierarchy h = build_hierarchy(cloud.keys(), cloud.depth, 1, 0);
  const auto fs = build_gram_functions(h, 100, Preconditioning::kJacobi);
  PredictorParams params;
  params.kind = PredictorKind::kNone;
  for (int l = 0; l < h.depth; ++l) {
    const Signal coarse = random_signal(h.graph(l).size(), 3, 9 + l);
    const Signal fine = predict(params, h, fs, l, coarse);
    const LevelGraph& child = h.graph(l + 1);
    for (std::size_t j = 0; j < child.size(); ++j) {
      const Coord c = child.coords[j];
      const auto parent = h.graph(l).find(morton_encode(c[0] >> 1, c[1] >> 1, c[2] >> 1));
      REQUIRE(parent.has_value());
      for (std::size_t ch = 0; ch < 3; ++ch) REQUIRE(fine(j, ch) == coarse(*parent, ch));
    }
  }
  CHECK_THROWS_AS(predict(params, h, fs, h.depth, Signal(1, 3)), std::out_of_range);
  CHECK_THROWS_AS(predict(params, h, {}, 0, Signal(h.graph(0).size(), 3)), std::invalid_argument);
}

TEST_CASE("predict matches dense matrix chains") {
  std::vector<testclouds::Named> clouds = {{"random200_d4", testclouds::random_cloud(200, 4, 10)},
                                           {"blob200_d5", testclouds::blob_cloud(200, 5, 11)},
                                           {"shell12", synth_cloud(SynthKind::kShell, 12)}};
  for (const auto& nc : clouds) {
    const auto keys = nc.cloud.keys();
    for (int order : {1, 2}) {
      const Hierarchy h = build_hierarchy(keys, nc.cloud.depth, order, 0);
      const auto fs = build_gram_functions(h, 100, Preconditioning::kJacobi);
      const auto d = oracle::dense_pyramid(keys, nc.cloud.depth, order, 0);
      for (auto kind : {PredictorKind::kNone, PredictorKind::kBaselineLlwa, PredictorKind::kLlwaFull, PredictorKind::kPbf}) {
        PredictorParams params;
        params.kind = kind;
        for (int l = 0; l < h.depth; ++l) {
          INFO(nc.name, " p=", order, " ", predictor_name(kind), " l=", l);
          const Signal coarse = random_signal(h.graph(l).size(), 3, 12);
          const Signal got = predict(params, h, fs, l, coarse);
          oracle::Mat want;
          if (kind == PredictorKind::kLlwaFull || kind == PredictorKind::kPbf) {
            // Same chain with the evaluated polynomial, started from the
            // upsampled coarse signal, in place of the exact inverse; the two
            // coincide for p=1.
            oracle::Mat x = oracle::to_mat(coarse);
            for (int m = l; m < d.depth; ++m) x = d.A(m).transpose() * x;
            x = kind == PredictorKind::kLlwaFull ? oracle::Mat(oracle::llwa_matrix(d.coords(d.depth)) * x)
                                                 : oracle::Mat(oracle::pbf_matrix(d.coords(d.depth), x, params.pbf) * x);
            for (int m = d.depth - 1; m > l; --m) x = d.A(m) * x;
            const oracle::Mat up = d.A(l).transpose() * oracle::to_mat(coarse);
            want = up + dense_poly_inverse(fs[static_cast<std::size_t>(l + 1)], 100) * (x - d.X(l + 1) * up);
            if (order == 1) {
              CHECK(oracle::max_abs_diff(got, oracle::dense_predict(d, kind, params, l, oracle::to_mat(coarse))) <= 1e-6);
            }
          } else {
            want = oracle::dense_predict(d, kind, params, l, oracle::to_mat(coarse));
          }
          CHECK(oracle::max_abs_diff(got, want) <= 1e-6);
        }
      }
    }
  }
}

TEST_CASE("predict preserves constants") {
  const auto cloud = testclouds::random_cloud(200, 4, 13);
  for (int order : {1, 2}) {
    const Hierarchy h = build_hierarchy(cloud.keys(), cloud.depth, order, 1);
    const auto fs = build_gram_functions(h, 100, Preconditioning::kJacobi);
    for (auto kind : {PredictorKind::kNone, PredictorKind::kBaselineLlwa, PredictorKind::kLlwaFull, PredictorKind::kPbf}) {
      PredictorParams params;
      params.kind = kind;
      for (int l = h.l0; l < h.depth; ++l) {
        INFO("p=", order, " ", predictor_name(kind), " l=", l);
        const Signal fine = predict(params, h, fs, l, Signal(h.graph(l).size(), 3, 77.0));
        double err = 0;
        for (double v : fine.data()) err = std::max(err, std::abs(v - 77.0));
        CHECK(err <= 1e-5 * 77.0);
      }
    }
  }
}
