#include "ppd/audit.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <optional>

#include "ppd/errors.hpp"
#include "ppd/harness.hpp"
#include "ppd/rng.hpp"

namespace ppd {
namespace {

std::vector<double> random_density(std::size_t k, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> p(k);
  for (auto& v : p) v = u(rng) < 0.2 ? 0.0 : -std::log1p(-u(rng));
  if (std::all_of(p.begin(), p.end(), [](double v) { return v == 0.0; })) p[0] = 1.0;
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (auto& v : p) v /= total;
  return p;
}

Density lookup_density(const std::vector<double>& support, const std::vector<double>& values) {
  auto table = std::make_shared<std::pair<std::vector<double>, std::vector<double>>>(support, values);
  return Density(
      [table](double x) {
        const auto& [s, v] = *table;
        const auto it = std::lower_bound(s.begin(), s.end(), x);
        if (it == s.end() || *it != x) return 0.0;
        return v[static_cast<std::size_t>(it - s.begin())];
      },
      RefMeasure::counting(support));
}

}  // namespace

DensityPair IdentityFixture::pair() const { return DensityPair(lookup_density(support, f), lookup_density(support, g)); }

std::vector<IdentityFixture> identity_fixtures(int count, std::uint64_t seed) {
  std::vector<IdentityFixture> out;
  for (int i = 0; i < count; ++i) {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(i));
    const auto k = std::uniform_int_distribution<std::size_t>(1, 12)(rng);
    std::vector<double> pool(100);
    std::iota(pool.begin(), pool.end(), 0.0);
    std::shuffle(pool.begin(), pool.end(), rng);
    IdentityFixture fx;
    fx.support.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(fx.support.begin(), fx.support.end());
    fx.f = random_density(k, rng);
    switch (i % 10) {
      case 0:  // identical
        fx.g = fx.f;
        break;
      case 1: {  // disjoint where possible
        fx.g.assign(k, 0.0);
        const auto first_zero = std::find(fx.f.begin(), fx.f.end(), 0.0);
        if (first_zero != fx.f.end())
          *(fx.g.begin() + (first_zero - fx.f.begin())) = 1.0;
        else
          fx.g = random_density(k, rng);
        break;
      }
      default:
        fx.g = random_density(k, rng);
    }
    out.push_back(std::move(fx));
  }
  return out;
}

IdentityAudit identity_audit(int count, std::uint64_t seed) {
  IdentityAudit audit;
  int id = 0;
  for (const auto& fx : identity_fixtures(count, seed)) {
    const auto pair = fx.pair();
    IdentityRow row;
    row.fixture = id++;
    row.support_size = static_cast<int>(fx.support.size());
    row.tv_sup = tv_distance_by_events(pair);
    row.half_l1 = 0.5 * l1_distance(pair);
    row.abs_diff = std::abs(row.tv_sup - row.half_l1);
    audit.max_abs_diff = std::max(audit.max_abs_diff, row.abs_diff);
    audit.rows.push_back(row);
  }
  return audit;
}

std::vector<MartingaleFixture> martingale_fixtures(int count, std::uint64_t seed) {
  std::vector<MartingaleFixture> out;
  for (int i = 0; i < count; ++i) {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(i));
    std::uniform_real_distribution<double> hyper(0.5, 5.0);
    const auto n = std::uniform_int_distribution<std::size_t>(0, 50)(rng);

    std::optional<ConjugatePair> pair;
    switch (i % 4) {
      case 0:
        pair.emplace(ModelFamily::bernoulli(), PriorSpec::beta(hyper(rng), hyper(rng)));
        break;
      case 1: {
        const int k = std::uniform_int_distribution<int>(2, 6)(rng);
        Eigen::VectorXd alpha(k);
        for (int j = 0; j < k; ++j) alpha[j] = hyper(rng);
        pair.emplace(ModelFamily::categorical(k), PriorSpec::dirichlet(alpha));
        break;
      }
      case 2:
        pair.emplace(ModelFamily::poisson(), PriorSpec::gamma(hyper(rng), hyper(rng)));
        break;
      default:
        if (i % 8 == 3) {
          pair.emplace(ModelFamily::bernoulli(), PriorSpec::point_mass(std::uniform_real_distribution<double>(0, 1)(rng)));
        } else {
          std::uniform_real_distribution<double> u(0.05, 1.0);
          Eigen::VectorXd theta{{u(rng), u(rng), u(rng)}};
          pair.emplace(ModelFamily::categorical(3), PriorSpec::point_mass(ParamPoint(theta / theta.sum())));
        }
    }
    const ParamPoint theta = pair->prior().sample(rng);
    SampleSequence obs = pair->model().sample(theta, rng, n);
    const auto support = pair->model().obs_measure().support();
    const auto limit = std::min<std::size_t>(support.size(), 21);
    const Observation probe{support[std::uniform_int_distribution<std::size_t>(0, limit - 1)(rng)]};
    out.push_back(MartingaleFixture{std::move(*pair), std::move(obs), probe});
  }
  return out;
}

MartingaleAudit martingale_audit(int count, std::uint64_t seed) {
  MartingaleAudit audit;
  int id = 0;
  for (const auto& fx : martingale_fixtures(count, seed)) {
    MartingaleRow row;
    row.fixture = id++;
    row.pair = fx.pair.name();
    row.n = fx.obs.size();
    row.probe = fx.probe.value;
    row.residual = martingale_check(fx.pair, fx.obs, fx.probe);
    audit.max_residual = std::max(audit.max_residual, row.residual);
    audit.rows.push_back(std::move(row));
  }
  return audit;
}

}  // namespace ppd
