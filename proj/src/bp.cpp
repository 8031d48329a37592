#include "mtt/bp.hpp"

#include <cmath>
#include <numbers>

namespace mtt {

namespace {

// Substream tags for per-PT randomness.
constexpr std::uint64_t kPredictStream = 0x7072656443;
constexpr std::uint64_t kResampleStream = 0x7265736D70;
constexpr std::uint64_t kBirthStream = 0x6269727468;

Eigen::VectorXd particle_likelihoods(const ParticleBelief& pb,
                                     const MeasVec& z,
                                     const SensorModel& sm) {
  const double s2 = sm.sigma_v * sm.sigma_v;
  const auto dx = pb.states.row(0).array() - z.x();
  const auto dy = pb.states.row(1).array() - z.y();
  return (((dx * dx + dy * dy) * (-0.5 / s2)).exp() /
          (2.0 * std::numbers::pi * s2))
      .matrix()
      .transpose();
}

void systematic_resample(ParticleBelief& pb, RandomEngine& eng) {
  const int J = pb.count();
  const double u0 = uniform_open(eng) - 0x1.0p-53;  // in [0, 1)
  Eigen::Matrix4Xd out(4, J);
  double cum = pb.weights(0);
  int i = 0;
  for (int j = 0; j < J; ++j) {
    const double u = (j + u0) / J;
    while (u > cum && i + 1 < J) cum += pb.weights(++i);
    out.col(j) = pb.states.col(i);
  }
  pb.states = std::move(out);
  pb.weights.setConstant(1.0 / J);
}

}  // namespace

void bp_predict(std::vector<PtBelief>& pts, const MotionModel& mm, int scan_k,
                std::uint64_t seed) {
  for (PtBelief& pt : pts) {
    RandomEngine eng =
        make_engine(seed, kPredictStream + std::uint64_t(scan_k), pt.id);
    Eigen::Matrix4Xd noise(4, pt.particles.count());
    fill_standard_normal(noise, eng);
    pt.particles.states =
        mm.A * pt.particles.states + mm.noise_chol * noise;
    pt.existence *= mm.p_s;
  }
}

BpWeights compute_weights(const std::vector<PtBelief>& pts, const Scan& scan,
                          const SensorModel& sm, const BpConfig& cfg) {
  const int J = static_cast<int>(pts.size());
  const int M = scan.size();
  BpWeights bw;
  bw.w.psi = Eigen::MatrixXd::Zero(J, M + 1);
  bw.w.xi = Eigen::VectorXd::Constant(
      M, sm.p_d * sm.mu_b * (1.0 / sm.roi.area()) / sm.clutter_intensity());
  bw.gm = GateMatrix(J, M);
  bw.gated.resize(J);
  bw.particle_lik.resize(J);
  bw.mixture_lik.resize(J);

  const double ci = sm.clutter_intensity();
  for (int j = 0; j < J; ++j) {
    const PtBelief& pt = pts[j];
    const double e = pt.existence;
    bw.w.psi(j, 0) = e * (1.0 - sm.p_d) + (1.0 - e);

    // Gate on the particle cloud's predicted measurement statistics.
    const StateVec mean = pt.particles.mean();
    const auto pos = pt.particles.states.topRows<2>();
    Eigen::Matrix2Xd centered = pos.colwise() - mean.head<2>();
    Eigen::Matrix2d pos_cov =
        centered * pt.particles.weights.asDiagonal() * centered.transpose();
    const Eigen::Matrix2d S =
        pos_cov + sm.sigma_v * sm.sigma_v * Eigen::Matrix2d::Identity();

    for (int m = 0; m < M; ++m)
      if (gate(mean.head<2>(), S, scan.measurements[m], cfg.gate_gamma))
        bw.gm.at(j, m) = 1;

    const int n_gated = static_cast<int>(
        std::count(bw.gm.inside.begin() + std::size_t(j) * M,
                   bw.gm.inside.begin() + std::size_t(j + 1) * M, 1));
    bw.particle_lik[j].resize(pt.particles.count(), n_gated);
    bw.mixture_lik[j].resize(n_gated);
    int col = 0;
    for (int m = 0; m < M; ++m) {
      if (!bw.gm.at(j, m)) continue;
      bw.gated[j].push_back(m);
      bw.particle_lik[j].col(col) =
          particle_likelihoods(pt.particles, scan.measurements[m], sm);
      const double avg = pt.particles.weights.dot(bw.particle_lik[j].col(col));
      bw.mixture_lik[j](col) = avg;
      bw.w.psi(j, m + 1) = e * sm.p_d * avg / ci;
      ++col;
    }
  }
  return bw;
}

int bp_update(std::vector<PtBelief>& pts, const BpWeights& bw,
              const AssociationMarginals& marg, const Scan& scan,
              const SensorModel& sm, std::uint64_t seed) {
  int degenerate = 0;
  for (std::size_t j = 0; j < pts.size(); ++j) {
    PtBelief& pt = pts[j];
    const double e = pt.existence;
    const double miss_mass = e * (1.0 - sm.p_d) + (1.0 - e);

    // Split the miss marginal into its alive and dead parts; the posterior
    // existence is everything except the dead part.
    const double beta0 = marg.beta(j, 0);
    const double alive_miss =
        miss_mass > 0 ? beta0 * (e * (1.0 - sm.p_d)) / miss_mass : 0.0;
    double meas_mass = 0.0;
    for (std::size_t c = 0; c < bw.gated[j].size(); ++c)
      meas_mass += marg.beta(j, bw.gated[j][c] + 1);
    pt.existence = std::min(alive_miss + meas_mass, 1.0 - 1e-12);

    // No gated measurement: the update is uniform across particles, so the
    // (always uniform) weights and the cloud are unchanged.
    if (bw.gated[j].empty()) continue;

    // Particle reweighting: mixture of the prior cloud (alive miss) and the
    // likelihood-tilted clouds, one per associated measurement.
    Eigen::VectorXd fresh = alive_miss * pt.particles.weights;
    for (std::size_t c = 0; c < bw.gated[j].size(); ++c) {
      const double beta_m = marg.beta(j, bw.gated[j][c] + 1);
      const double denom = bw.mixture_lik[j](c);
      if (beta_m <= 0 || !(denom > 0)) continue;
      fresh += (beta_m / denom) *
               (pt.particles.weights.array() *
                bw.particle_lik[j].col(c).array())
                   .matrix();
    }
    const double total = fresh.sum();
    if (!(total > 0)) {
      ++degenerate;
      pt.existence = 0.0;
      continue;  // particles kept as they were
    }
    pt.particles.weights = fresh / total;
    RandomEngine eng =
        make_engine(seed, kResampleStream + std::uint64_t(scan.k), pt.id);
    systematic_resample(pt.particles, eng);
  }
  return degenerate;
}

std::vector<PtBelief> init_new_pts(const Scan& scan,
                                   const AssociationMarginals& marg,
                                   const BpWeights& bw, const SensorModel& sm,
                                   const BpConfig& cfg, int& next_id,
                                   std::uint64_t seed) {
  std::vector<PtBelief> fresh;
  fresh.reserve(scan.size());
  for (int m = 0; m < scan.size(); ++m) {
    PtBelief pt;
    pt.id = next_id++;
    const double xi = bw.w.xi(m);
    pt.existence = marg.kappa(m) * xi / (1.0 + xi);

    RandomEngine eng =
        make_engine(seed, kBirthStream + std::uint64_t(scan.k), pt.id);
    const int J = cfg.particle_count;
    Eigen::Matrix4Xd states(4, J);
    fill_standard_normal(states, eng);
    states.topRows<2>() *= sm.sigma_v;
    states.bottomRows<2>() *= cfg.birth_vel_std;
    states.row(0).array() += scan.measurements[m].x();
    states.row(1).array() += scan.measurements[m].y();
    pt.particles.states = std::move(states);
    pt.particles.weights = Eigen::VectorXd::Constant(J, 1.0 / J);
    fresh.push_back(std::move(pt));
  }
  return fresh;
}

std::vector<Estimate> extract_estimates(BpState& state, const BpConfig& cfg) {
  std::erase_if(state.pts, [&](const PtBelief& pt) {
    return pt.existence < cfg.p_pr;
  });
  std::vector<Estimate> out;
  for (const PtBelief& pt : state.pts)
    if (pt.existence > cfg.p_th) out.push_back({pt.id, pt.particles.mean()});
  return out;
}

BpStepResult bp_step(BpState& state, const Scan& scan, const MotionModel& mm,
                     const SensorModel& sm, const BpConfig& cfg) {
  bp_predict(state.pts, mm, scan.k, state.seed);
  const BpWeights bw = compute_weights(state.pts, scan, sm, cfg);
  const AssociationMarginals marg = bp_association_marginals(
      bw.w, bw.gm, cfg.bp_max_iter, cfg.bp_tol, cfg.bp_damping);

  BpStepResult result;
  result.bp_converged = marg.converged;
  result.degenerate_updates =
      bp_update(state.pts, bw, marg, scan, sm, state.seed);

  std::vector<PtBelief> born =
      init_new_pts(scan, marg, bw, sm, cfg, state.next_id, state.seed);
  for (PtBelief& pt : born) state.pts.push_back(std::move(pt));

  result.estimates = extract_estimates(state, cfg);
  return result;
}

}  // namespace mtt
