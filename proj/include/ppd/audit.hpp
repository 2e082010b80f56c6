#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ppd/conjugate.hpp"
#include "ppd/loss.hpp"
#include "ppd/model.hpp"

namespace ppd {

/// Random discrete density pairs on at most 12 support points.
struct IdentityFixture {
  std::vector<double> support;
  std::vector<double> f;
  std::vector<double> g;

  DensityPair pair() const;
};

std::vector<IdentityFixture> identity_fixtures(int count, std::uint64_t seed);

struct IdentityRow {
  int fixture = 0;
  int support_size = 0;
  double tv_sup = 0.0;   // brute-force sup over events
  double half_l1 = 0.0;  // ½ ∫|f - g|
  double abs_diff = 0.0;
};

struct IdentityAudit {
  std::vector<IdentityRow> rows;
  double max_abs_diff = 0.0;
};

/// TV-as-event-sup against ½·L1 on random discrete pairs.
IdentityAudit identity_audit(int count, std::uint64_t seed);

/// A discrete conjugate pair with a sample and a probe outcome.
struct MartingaleFixture {
  ConjugatePair pair;
  SampleSequence obs;
  Observation probe;
};

/// Mixes beta-bernoulli, dirichlet-categorical, gamma-poisson and point-mass pairs,
/// samples drawn from the prior predictive with n <= 50.
std::vector<MartingaleFixture> martingale_fixtures(int count, std::uint64_t seed);

struct MartingaleRow {
  int fixture = 0;
  std::string pair;
  std::size_t n = 0;
  double probe = 0.0;
  double residual = 0.0;
};

struct MartingaleAudit {
  std::vector<MartingaleRow> rows;
  double max_residual = 0.0;
};

MartingaleAudit martingale_audit(int count, std::uint64_t seed);

}  // namespace ppd
