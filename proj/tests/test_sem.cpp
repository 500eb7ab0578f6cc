#include "oracles.hpp"

#include "sparserc/sem.hpp"
#include "sparserc/solver.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace sparserc;

namespace {

WeightedDag default_dag(Index d, std::uint64_t seed) {
  GraphGenConfig g;
  g.d = d;
  g.seed = seed;
  return generate_random_dag(g);
}

}  // namespace

TEST_CASE("pollution network data from two root causes") {
  const WeightedDag g(oracle::pollution_dag());
  RootCauses rc;
  rc.c = Matrix::Zero(1, 6);
  rc.c(0, 0) = 3;
  rc.c(0, 3) = 5;
  rc.noise_c = Matrix::Zero(1, 6);
  rc.noise_x = Matrix::Zero(1, 6);
  const Dataset ds = synthesize(g, rc, false);
  Matrix expected(1, 6);
  expected << 3, 1.5, 1.5, 6.65, 4.655, 0.665;
  CHECK((ds.x - expected).cwiseAbs().maxCoeff() <= 1e-12);
  REQUIRE(ds.ground_truth);
  CHECK(*ds.ground_truth == g);
}

TEST_CASE("synthesize trivial cases") {
  const WeightedDag g = default_dag(8, 1);
  DataGenConfig cfg;
  cfg.n = 30;
  cfg.sigma = 0;
  cfg.p = 0;
  RootCauses rc = sample_root_causes(g, cfg);
  CHECK(rc.c.isZero());
  CHECK(synthesize(g, rc, false).x.isZero());

  cfg.p = 0.4;
  rc = sample_root_causes(g, cfg);
  CHECK(synthesize(WeightedDag::empty(8), rc, false).x == rc.c);
  CHECK_THROWS_AS(synthesize(WeightedDag::empty(7), rc, false), Error);
}

TEST_CASE("root causes are Bernoulli(p) times Uniform(0,1]") {
  const WeightedDag g = default_dag(100, 2);
  double mean_ratio = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    DataGenConfig cfg;
    cfg.seed = s;
    const RootCauses rc = sample_root_causes(g, cfg);
    const auto nz = (rc.c.array() != 0.0).count();
    mean_ratio += static_cast<double>(nz) / static_cast<double>(rc.c.size()) / 20.0;
    CHECK(rc.c.minCoeff() >= 0.0);
    CHECK(rc.c.maxCoeff() <= 1.0);
  }
  CHECK(std::abs(mean_ratio - 0.1) <= 0.01);
}

TEST_CASE("fixed support repeats one zero pattern") {
  const WeightedDag g = default_dag(20, 3);
  DataGenConfig cfg;
  cfg.fixed_support = true;
  cfg.p = 0.3;
  cfg.n = 100;
  const RootCauses rc = sample_root_causes(g, cfg);
  const Eigen::Array<bool, 1, Eigen::Dynamic> first = rc.c.row(0).array() != 0.0;
  for (Index r = 1; r < rc.c.rows(); ++r) CHECK(((rc.c.row(r).array() != 0.0) == first).all());
}

TEST_CASE("noise moments") {
  const WeightedDag g = default_dag(10, 4);
  DataGenConfig cfg;
  cfg.n = 20000;
  cfg.sigma = 0.5;
  const RootCauses gauss = sample_root_causes(g, cfg);
  const double folded = cfg.sigma * std::sqrt(2.0 / std::numbers::pi);
  const double mean_abs = gauss.noise_x.cwiseAbs().mean();
  CHECK(std::abs(mean_abs - folded) / folded < 0.02);
  CHECK(std::abs(gauss.noise_c.mean()) < 0.01);

  cfg.noise_dist = NoiseDist::Gumbel;
  const RootCauses gumbel = sample_root_causes(g, cfg);
  const double m = gumbel.noise_x.mean();
  const double var = (gumbel.noise_x.array() - m).square().mean();
  CHECK(std::abs(m) < 0.01);
  CHECK(std::sqrt(var) == doctest::Approx(cfg.sigma).epsilon(0.03));
  // Gumbel is right-skewed.
  CHECK((gumbel.noise_x.array() - m).cube().mean() > 0.0);
}

TEST_CASE("generation is deterministic per seed") {
  const WeightedDag g = default_dag(15, 5);
  DataGenConfig cfg;
  cfg.n = 200;
  cfg.seed = 77;
  const RootCauses a = sample_root_causes(g, cfg);
  const RootCauses b = sample_root_causes(g, cfg);
  CHECK(a.c == b.c);
  CHECK(a.noise_c == b.noise_c);
  CHECK(a.noise_x == b.noise_x);
  cfg.seed = 78;
  CHECK(sample_root_causes(g, cfg).c != a.c);
}

TEST_CASE("noise-free round trip recovers C") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Index d = 2 + static_cast<Index>(s * 7 % 49);
    const WeightedDag g(oracle::random_dag(d, 0.2, s));
    DataGenConfig cfg;
    cfg.n = 50;
    cfg.sigma = 0;
    cfg.seed = s;
    const RootCauses rc = sample_root_causes(g, cfg);
    const Matrix x = synthesize(g, rc, false).x;
    CHECK((recover_root_causes(x, g) - rc.c).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("standardization gives unit variance and flags constant columns") {
  const WeightedDag g = default_dag(12, 6);
  DataGenConfig cfg;
  cfg.n = 500;
  const RootCauses rc = sample_root_causes(g, cfg);
  const Dataset ds = synthesize(g, rc, true);
  const Vector v = column_variances(ds.x);
  CHECK((v.array() - 1.0).abs().maxCoeff() <= 1e-9);
  CHECK(ds.zero_variance_columns.empty());

  RootCauses flat = rc;
  flat.c.col(0).setZero();
  flat.noise_c.col(0).setZero();
  flat.noise_x.col(0).setZero();
  const Dataset flagged = synthesize(WeightedDag::empty(12), flat, true);
  REQUIRE(flagged.zero_variance_columns.size() == 1);
  CHECK(flagged.zero_variance_columns[0] == 0);
  CHECK(flagged.x.col(0).isZero());
}

TEST_CASE("FRC audit examples") {
  const WeightedDag g = default_dag(10, 7);
  DataGenConfig cfg;
  cfg.n = 100;
  cfg.sigma = 0;
  cfg.p = 0.05;
  const RootCauses rc = sample_root_causes(g, cfg);
  const FrcAudit a = audit_frc(rc, g, 0.1, 0.1);
  CHECK(a.noise_ratio == 0.0);
  CHECK(a.passes == (a.sparsity_ratio < 0.1));

  RootCauses dense = rc;
  dense.c.setConstant(0.5);
  const FrcAudit b = audit_frc(dense, g, 0.1, 0.1);
  CHECK(b.sparsity_ratio == 1.0);
  CHECK_FALSE(b.passes);

  RootCauses none = rc;
  none.c.setZero();
  const FrcAudit c = audit_frc(none, g, 0.1, 0.1);
  CHECK(c.degenerate);
  CHECK(std::isnan(c.noise_ratio));
  CHECK_FALSE(c.passes);
}

TEST_CASE("FRC audit noise ratio by hand") {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 1) = 0.5;
  const WeightedDag g(a);
  RootCauses rc;
  rc.c = Matrix::Zero(2, 2);
  rc.c(0, 0) = 0.8;
  rc.noise_c = Matrix::Constant(2, 2, 0.01);
  rc.noise_x = Matrix::Zero(2, 2);
  rc.noise_x(1, 0) = 0.02;
  // N_c + N_x(I - A) = [[.01, .01], [.03, .0]]: L1 0.05 over nd = 4, mean |C| 0.8.
  const FrcAudit audit = audit_frc(rc, g, 0.3, 0.1);
  CHECK(audit.sparsity_ratio == 0.25);
  CHECK(audit.noise_ratio == doctest::Approx(0.05 / 4 / 0.8));
  CHECK(audit.passes);
}

TEST_CASE("expected FRC bounds") {
  const FrcBounds b = expected_frc_bounds(100, 0.1, 0.01, 4.0);
  CHECK(b.expected_sparsity == 0.1);
  CHECK(std::abs(b.expected_noise_bound - 0.1 * 1.2 * std::sqrt(2.0 / std::numbers::pi)) <= 1e-12);
  CHECK(std::abs(b.expected_noise_bound - 0.0957) <= 1e-4);
  CHECK(expected_frc_bounds(20, 0.1, 0.0, 4.0).expected_noise_bound == 0.0);
  CHECK_THROWS_AS(expected_frc_bounds(0, 0.1, 0.01, 4.0), Error);
}

TEST_CASE("invalid data configs") {
  const WeightedDag g = default_dag(5, 8);
  DataGenConfig cfg;
  cfg.p = 1.0;
  CHECK_THROWS_AS(sample_root_causes(g, cfg), Error);
  cfg = {};
  cfg.sigma = -1;
  CHECK_THROWS_AS(sample_root_causes(g, cfg), Error);
  cfg = {};
  cfg.n = 0;
  CHECK_THROWS_AS(sample_root_causes(g, cfg), Error);
  CHECK_THROWS_AS(parse_noise_dist("laplace"), Error);
}
