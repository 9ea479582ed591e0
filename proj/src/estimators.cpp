#include "rsloc/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <unsupported/Eigen/FFT>

namespace rsloc {

WhitenedData whiten(const ObservationSet& obs,
                    const std::vector<DisturbanceModel>& models) {
  if (obs.per_stripe.size() != models.size()) {
    throw NumericalError("whiten: observation/model count mismatch");
  }
  WhitenedData out;
  out.per_stripe.reserve(obs.per_stripe.size());
  for (size_t n = 0; n < obs.per_stripe.size(); ++n) {
    const MatrixXcd& y = obs.per_stripe[n];
    if (y.cols() != models[n].subcarrier_count() ||
        y.rows() != models[n].antenna_count()) {
      throw NumericalError("whiten: dimension mismatch");
    }
    out.per_stripe.push_back(models[n].whiten_matrix(y));
  }
  return out;
}

double amplitude_hat(double phase, const VectorXcd& signature,
                     const VectorXcd& data) {
  const double norm2 = signature.squaredNorm();
  if (norm2 <= 0.0) {
    throw NumericalError("amplitude_hat: zero signature norm");
  }
  return std::real(std::polar(1.0, -phase) * signature.dot(data)) / norm2;
}

EstimationContext::EstimationContext(const ScenarioConfig& scenario,
                                     WhitenedData data,
                                     const std::vector<DisturbanceModel>& models)
    : scenario_(&scenario), data_(std::move(data)), models_(&models) {
  data_norm2_.reserve(data_.per_stripe.size());
  for (const MatrixXcd& y : data_.per_stripe) {
    data_norm2_.push_back(y.squaredNorm());
  }
}

EstimationContext::StripeTerms EstimationContext::terms(
    int n, const Vector2d& p2d, double dtau) const {
  const ScenarioConfig& sc = *scenario_;
  const StripePose& stripe = sc.stripes[static_cast<size_t>(n)];
  UeState cand = sc.ue;
  cand.position.head<2>() = p2d;
  cand.clock_offset = dtau;
  const LinkGeometry link = link_geometry(cand, stripe, sc.ofdm.carrier_freq);

  const VectorXcd bs =
      freq_steering(link.pseudo_delay, sc.ofdm.subcarrier_count,
                    sc.ofdm.subcarrier_spacing())
          .cwiseProduct(sc.ofdm.pilots);
  const VectorXcd g = (*models_)[static_cast<size_t>(n)].whiten_freq(bs);
  const VectorXcd a = array_steering(link.aoa, stripe.antenna_count,
                                     stripe.element_spacing,
                                     sc.ofdm.wavelength());
  // z = c'^H y' with c' = g kron a and y' = vec(Y'):
  // z = a^H Y' conj(g)
  const MatrixXcd& yp = data_.per_stripe[static_cast<size_t>(n)];
  StripeTerms t;
  t.corr = (a.adjoint() * yp * g.conjugate())(0);
  t.sig_norm2 = stripe.antenna_count * g.squaredNorm();
  t.delay = link.delay;
  return t;
}

double EstimationContext::cost_cp(const Vector2d& p2d, double dtau) const {
  // Sum_n (||y_n'||^2 - |z_n|^2/(2 nu_n)) - |Sum_n e^{j 4 pi fc tau_n} z_n^2 / nu_n| / 2
  double cost = 0.0;
  cdouble cross = 0.0;
  const double fc = scenario_->ofdm.carrier_freq;
  for (int n = 0; n < scenario_->stripe_count(); ++n) {
    const StripeTerms t = terms(n, p2d, dtau);
    cost += data_norm2_[static_cast<size_t>(n)] -
            std::norm(t.corr) / (2.0 * t.sig_norm2);
    cross += std::polar(1.0, 4.0 * constants::pi * fc * t.delay) * t.corr *
             t.corr / t.sig_norm2;
  }
  return cost - 0.5 * std::abs(cross);
}

double EstimationContext::cost_ncp(const Vector2d& p2d, double dtau) const {
  double cost = 0.0;
  for (int n = 0; n < scenario_->stripe_count(); ++n) {
    const StripeTerms t = terms(n, p2d, dtau);
    cost += data_norm2_[static_cast<size_t>(n)] - std::norm(t.corr) / t.sig_norm2;
  }
  return cost;
}

PhaseEstimate EstimationContext::phase_offset(const Vector2d& p2d,
                                              double dtau) const {
  cdouble cross = 0.0;
  const double fc = scenario_->ofdm.carrier_freq;
  for (int n = 0; n < scenario_->stripe_count(); ++n) {
    const StripeTerms t = terms(n, p2d, dtau);
    cross += std::polar(1.0, 4.0 * constants::pi * fc * t.delay) * t.corr *
             t.corr / (4.0 * t.sig_norm2);
  }
  if (std::abs(cross) == 0.0) {
    throw NumericalError("phase_offset_hat: zero correlation sum");
  }
  PhaseEstimate est;
  est.value = 0.5 * std::arg(cross);
  if (est.value >= constants::pi / 2.0) est.value -= constants::pi;
  if (est.value < -constants::pi / 2.0) est.value += constants::pi;
  est.ambiguous_mod_pi = true;
  return est;
}

VectorXd EstimationContext::amplitudes(const Vector2d& p2d, double dtau,
                                       double phase) const {
  VectorXd out(scenario_->stripe_count());
  const double fc = scenario_->ofdm.carrier_freq;
  for (int n = 0; n < scenario_->stripe_count(); ++n) {
    const StripeTerms t = terms(n, p2d, dtau);
    const double phi = -2.0 * constants::pi * fc * t.delay + phase;
    out(n) = std::real(std::polar(1.0, -phi) * t.corr) / t.sig_norm2;
  }
  return out;
}

VectorXd EstimationContext::gain_magnitudes(const Vector2d& p2d,
                                            double dtau) const {
  VectorXd out(scenario_->stripe_count());
  for (int n = 0; n < scenario_->stripe_count(); ++n) {
    const StripeTerms t = terms(n, p2d, dtau);
    out(n) = std::abs(t.corr) / t.sig_norm2;
  }
  return out;
}

double ml_cost_cp(const Vector2d& p2d, double dtau, const WhitenedData& data,
                  const ScenarioConfig& scenario,
                  const std::vector<DisturbanceModel>& models) {
  return EstimationContext(scenario, data, models).cost_cp(p2d, dtau);
}

double ml_cost_ncp(const Vector2d& p2d, double dtau, const WhitenedData& data,
                   const ScenarioConfig& scenario,
                   const std::vector<DisturbanceModel>& models) {
  return EstimationContext(scenario, data, models).cost_ncp(p2d, dtau);
}

IlsResult ils_solve(const VectorXd& pseudo_delays,
                    const ScenarioConfig& scenario) {
  const int n_count = scenario.stripe_count();
  if (n_count < 3) {
    throw NumericalError("ils_solve: at least 3 stripes required");
  }
  const double c = constants::speed_of_light;
  const double pz = scenario.ue.position.z();

  // Unknowns in meters: [x, y, c * dtau]
  Vector3d u;
  Vector2d centroid = Vector2d::Zero();
  for (const StripePose& s : scenario.stripes) {
    centroid += s.position.head<2>();
  }
  centroid /= n_count;
  u << centroid, 0.0;

  IlsResult out;
  out.pseudo_delays = pseudo_delays;
  double prev_step = std::numeric_limits<double>::infinity();
  int growing = 0;
  for (int it = 0; it < 50; ++it) {
    VectorXd r(n_count);
    MatrixXd j(n_count, 3);
    for (int n = 0; n < n_count; ++n) {
      const Vector3d& ps = scenario.stripes[static_cast<size_t>(n)].position;
      const Vector3d p(u(0), u(1), pz);
      const Vector3d d = p - ps;
      const double range = d.norm();
      r(n) = c * pseudo_delays(n) - range - u(2);
      j(n, 0) = -d.x() / range;
      j(n, 1) = -d.y() / range;
      j(n, 2) = -1.0;
    }
    const Vector3d step = -j.colPivHouseholderQr().solve(r);
    u += step;
    out.iterations = it + 1;
    const double sn = step.norm();
    if (sn < 1e-9) {
      out.converged = true;
      break;
    }
    if (sn > prev_step) {
      if (++growing >= 5) break;  // diverging
    } else {
      growing = 0;
    }
    prev_step = sn;
  }
  out.position_2d = u.head<2>();
  out.clock_offset = u(2) / c;
  return out;
}

IlsResult ils_initializer(const ObservationSet& obs,
                          const ScenarioConfig& scenario, int nfft) {
  const int n_count = scenario.stripe_count();
  const double df = scenario.ofdm.subcarrier_spacing();
  VectorXd pseudo_delays(n_count);
  Eigen::FFT<double> fft;
  for (int n = 0; n < n_count; ++n) {
    const MatrixXcd& y = obs.per_stripe[static_cast<size_t>(n)];
    const int m_count = static_cast<int>(y.rows());
    const int k_count = static_cast<int>(y.cols());
    // IFFT of Y^T along the subcarrier axis, noncoherent sum over antennas
    VectorXd energy = VectorXd::Zero(nfft);
    std::vector<cdouble> in(static_cast<size_t>(nfft), cdouble(0.0, 0.0));
    std::vector<cdouble> out_bins(static_cast<size_t>(nfft));
    for (int m = 0; m < m_count; ++m) {
      for (int k = 0; k < k_count; ++k) in[static_cast<size_t>(k)] = y(m, k);
      fft.inv(out_bins, in);
      for (int q = 0; q < nfft; ++q) {
        energy(q) += std::norm(out_bins[static_cast<size_t>(q)]);
      }
    }
    int best = 0;
    for (int q = 1; q < nfft; ++q) {
      if (energy(q) > energy(best)) best = q;  // first max wins ties
    }
    pseudo_delays(n) = static_cast<double>(best) / (nfft * df);
  }
  return ils_solve(pseudo_delays, scenario);
}

namespace {

// Standard Nelder-Mead on R^dim; coordinates are all in meters.
struct SimplexResult {
  VectorXd x;
  double f = 0.0;
  int iterations = 0;
  bool converged = false;
};

SimplexResult nelder_mead(const std::function<double(const VectorXd&)>& f,
                          const VectorXd& x0, double step, double tol,
                          int max_iter) {
  const int dim = static_cast<int>(x0.size());
  std::vector<VectorXd> xs;
  std::vector<double> fs;
  for (int i = 0; i <= dim; ++i) {
    VectorXd x = x0;
    if (i > 0) x(i - 1) += step;
    xs.push_back(x);
    fs.push_back(f(x));
  }
  auto order = [&]() {
    std::vector<int> idx(xs.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
    std::sort(idx.begin(), idx.end(),
              [&](int a, int b) { return fs[static_cast<size_t>(a)] <
                                         fs[static_cast<size_t>(b)]; });
    std::vector<VectorXd> xs2;
    std::vector<double> fs2;
    for (int i : idx) {
      xs2.push_back(xs[static_cast<size_t>(i)]);
      fs2.push_back(fs[static_cast<size_t>(i)]);
    }
    xs.swap(xs2);
    fs.swap(fs2);
  };

  SimplexResult res;
  for (int it = 0; it < max_iter; ++it) {
    order();
    res.iterations = it + 1;
    double diam = 0.0;
    for (int i = 1; i <= dim; ++i) {
      diam = std::max(diam, (xs[static_cast<size_t>(i)] - xs[0]).norm());
    }
    if (diam < tol) {
      res.converged = true;
      break;
    }
    VectorXd cen = VectorXd::Zero(dim);
    for (int i = 0; i < dim; ++i) cen += xs[static_cast<size_t>(i)];
    cen /= dim;

    const VectorXd xr = cen + (cen - xs.back());
    const double fr = f(xr);
    if (fr < fs[0]) {
      const VectorXd xe = cen + 2.0 * (cen - xs.back());
      const double fe = f(xe);
      if (fe < fr) {
        xs.back() = xe;
        fs.back() = fe;
      } else {
        xs.back() = xr;
        fs.back() = fr;
      }
    } else if (fr < fs[static_cast<size_t>(dim - 1)]) {
      xs.back() = xr;
      fs.back() = fr;
    } else {
      const VectorXd xc = cen + 0.5 * (xs.back() - cen);
      const double fc = f(xc);
      if (fc < fs.back()) {
        xs.back() = xc;
        fs.back() = fc;
      } else {
        for (int i = 1; i <= dim; ++i) {
          xs[static_cast<size_t>(i)] =
              xs[0] + 0.5 * (xs[static_cast<size_t>(i)] - xs[0]);
          fs[static_cast<size_t>(i)] = f(xs[static_cast<size_t>(i)]);
        }
      }
    }
  }
  order();
  res.x = xs[0];
  res.f = fs[0];
  return res;
}

double guarded(const std::function<double(const Vector2d&, double)>& cost,
               const VectorXd& u) {
  try {
    const double v = cost(Vector2d(u(0), u(1)),
                          u(2) / constants::speed_of_light);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  } catch (const std::domain_error&) {
    return std::numeric_limits<double>::infinity();
  }
}

}  // namespace

EstimationResult refine(const EstimationContext& ctx, Mode mode,
                        const Vector2d& init_p2d, double init_dtau) {
  const double c = constants::speed_of_light;
  const double lambda = ctx.scenario().ofdm.wavelength();
  std::function<double(const Vector2d&, double)> cost =
      mode == Mode::Cp
          ? std::function<double(const Vector2d&, double)>(
                [&ctx](const Vector2d& p, double dt) { return ctx.cost_cp(p, dt); })
          : std::function<double(const Vector2d&, double)>(
                [&ctx](const Vector2d& p, double dt) { return ctx.cost_ncp(p, dt); });

  VectorXd u0(3);
  u0 << init_p2d, init_dtau * c;
  // NCP basins are delay-wide, CP basins are fractions of a wavelength.
  const double step = mode == Mode::Cp ? lambda / 16.0 : 0.3;
  const SimplexResult sr = nelder_mead(
      [&](const VectorXd& u) { return guarded(cost, u); }, u0, step, 1e-6, 500);

  EstimationResult out;
  out.position_2d = sr.x.head<2>();
  out.clock_offset = sr.x(2) / c;
  out.final_cost = sr.f;
  out.iterations = sr.iterations;
  out.converged = sr.converged;
  if (mode == Mode::Cp) {
    out.phase_offset = ctx.phase_offset(out.position_2d, out.clock_offset);
    out.gains =
        ctx.amplitudes(out.position_2d, out.clock_offset, out.phase_offset->value);
  } else {
    out.gains = ctx.gain_magnitudes(out.position_2d, out.clock_offset);
  }
  return out;
}

PipelineResult estimate(const ObservationSet& obs,
                        const ScenarioConfig& scenario,
                        const std::vector<DisturbanceModel>& models,
                        Mode mode) {
  PipelineResult out;
  WhitenedData wdata = whiten(obs, models);

  // The disturbance is colored in delay (its energy concentrates at small
  // delays), so coarse peak-picking on the raw observations is unreliable at
  // low SDNR. Initialize from the whitened observations instead; whitening is
  // the identity up to scale when the disturbance is white, so the noise-free
  // contract of the initializer is unchanged.
  ObservationSet wobs;
  wobs.per_stripe = wdata.per_stripe;
  wobs.pilots = obs.pilots;
  out.ils = ils_initializer(wobs, scenario);

  Vector2d centroid = Vector2d::Zero();
  double spread = 0.0;
  for (const StripePose& s : scenario.stripes) centroid += s.position.head<2>();
  centroid /= scenario.stripe_count();
  for (const StripePose& s : scenario.stripes) {
    spread = std::max(spread, (s.position.head<2>() - centroid).norm());
  }

  Vector2d p0 = out.ils.position_2d;
  double dt0 = out.ils.clock_offset;
  bool init_failed = !out.ils.converged;
  if (!p0.allFinite() || !std::isfinite(dt0) ||
      (p0 - centroid).norm() > 10.0 * (spread + 1.0)) {
    // divergent multilateration: restart from the array centroid with the
    // clock offset implied by the measured pseudo-delays at that point
    p0 = centroid;
    dt0 = 0.0;
    if (out.ils.pseudo_delays.size() > 0) {
      double acc = 0.0;
      for (int n = 0; n < scenario.stripe_count(); ++n) {
        const Vector3d d = Vector3d(centroid.x(), centroid.y(),
                                    scenario.ue.position.z()) -
                           scenario.stripes[static_cast<size_t>(n)].position;
        acc += out.ils.pseudo_delays(n) -
               d.norm() / constants::speed_of_light;
      }
      dt0 = acc / scenario.stripe_count();
    }
    init_failed = true;
  }

  EstimationContext ctx(scenario, std::move(wdata), models);
  out.ncp = refine(ctx, Mode::Ncp, p0, dt0);
  out.ncp.init_failed = init_failed;

  if (mode == Mode::Cp) {
    // The CP likelihood is a wavelength-scale interference pattern in the
    // position plane (the clock offset only enters at the much smoother
    // delay-resolution scale). Scan a fine 2D grid around the NCP solution,
    // then refine from several spatially distinct low-cost candidates: a
    // single grid sample of the true basin can rank below the center of a
    // false one, so taking only the best grid point is not reliable.
    const double lambda = scenario.ofdm.wavelength();
    const double span = 1.5 * lambda;
    const double dstep = lambda / 16.0;
    const double dt0 = out.ncp.clock_offset;

    struct Candidate {
      double cost;
      Vector2d p;
    };
    std::vector<Candidate> grid;
    for (double dx = -span; dx <= span + 1e-12; dx += dstep) {
      for (double dy = -span; dy <= span + 1e-12; dy += dstep) {
        const Vector2d p = out.ncp.position_2d + Vector2d(dx, dy);
        VectorXd u(3);
        u << p, dt0 * constants::speed_of_light;
        const double v = guarded(
            [&ctx](const Vector2d& pp, double tt) { return ctx.cost_cp(pp, tt); },
            u);
        if (std::isfinite(v)) grid.push_back({v, p});
      }
    }
    std::sort(grid.begin(), grid.end(),
              [](const Candidate& a, const Candidate& b) {
                return a.cost < b.cost;
              });
    // Grid samples sit up to half a grid step from their basin's minimum,
    // which perturbs the sampled cost by more than the separation between
    // competing basins; ranking alone cannot identify the global one. Refine
    // every spatially distinct candidate that is remotely competitive.
    std::vector<Vector2d> starts;
    for (const Candidate& cand : grid) {
      bool distinct = true;
      for (const Vector2d& s : starts) {
        if ((cand.p - s).norm() < lambda / 6.0) {
          distinct = false;
          break;
        }
      }
      if (distinct) starts.push_back(cand.p);
      if (starts.size() >= 24) break;
    }
    if (starts.empty()) starts.push_back(out.ncp.position_2d);

    std::optional<EstimationResult> best;
    for (const Vector2d& s : starts) {
      EstimationResult r = refine(ctx, Mode::Cp, s, dt0);
      if (!best || r.final_cost < best->final_cost) best = std::move(r);
    }
    out.cp = std::move(best);
    out.cp->init_failed = init_failed;
  }
  return out;
}

}  // namespace rsloc
