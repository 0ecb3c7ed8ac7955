#include "harmonica/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "harmonica/errors.hpp"

namespace harmonica {

namespace {

// Butcher tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
// 5th minus embedded 4th order weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense output.
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

}  // namespace

DormandPrince45::DormandPrince45(OdeRhs rhs, double t0, Eigen::VectorXd y0, OdeOptions opts)
    : rhs_(std::move(rhs)), opts_(opts), t_(t0), t_prev_(t0), y_(std::move(y0)) {
  k1_.resize(y_.size());
  rhs_(t_, y_, k1_);
  h_ = opts_.initial_step > 0.0 ? opts_.initial_step : initial_step();
  r1_ = y_;
  r2_ = r3_ = r4_ = r5_ = Eigen::VectorXd::Zero(y_.size());
}

double DormandPrince45::error_norm(const Eigen::VectorXd& err, const Eigen::VectorXd& y0,
                                   const Eigen::VectorXd& y1) const {
  const Eigen::ArrayXd sc = opts_.atol + opts_.rtol * y0.cwiseAbs().cwiseMax(y1.cwiseAbs()).array();
  return std::sqrt((err.array() / sc).square().mean());
}

double DormandPrince45::initial_step() const {
  // Hairer, Norsett & Wanner, II.4.
  const Eigen::ArrayXd sc = opts_.atol + opts_.rtol * y_.cwiseAbs().array();
  const double d0 = std::sqrt((y_.array() / sc).square().mean());
  const double d1n = std::sqrt((k1_.array() / sc).square().mean());
  double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
  Eigen::VectorXd y1 = y_ + h0 * k1_, f1(y_.size());
  rhs_(t_ + h0, y1, f1);
  const double d2 = std::sqrt(((f1 - k1_).array() / sc).square().mean()) / h0;
  const double h1 = std::max(d1n, d2) <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                                               : std::pow(0.01 / std::max(d1n, d2), 1.0 / 5.0);
  double h = std::min(100.0 * h0, h1);
  if (opts_.max_step > 0.0) h = std::min(h, opts_.max_step);
  return h;
}

void DormandPrince45::step(double t_limit) {
  const Eigen::Index n = y_.size();
  Eigen::VectorXd k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), err(n);

  for (long attempt = 0;; ++attempt) {
    if (attempt > 10000) throw StiffnessError("too many rejected steps", t_);
    double h = std::min(h_, t_limit - t_);
    if (opts_.max_step > 0.0) h = std::min(h, opts_.max_step);
    const double hmin = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t_));
    if (h < hmin && t_limit - t_ > hmin) throw StiffnessError("step size underflow", t_);

    ytmp = y_ + h * a21 * k1_;
    rhs_(t_ + c2 * h, ytmp, k2);
    ytmp = y_ + h * (a31 * k1_ + a32 * k2);
    rhs_(t_ + c3 * h, ytmp, k3);
    ytmp = y_ + h * (a41 * k1_ + a42 * k2 + a43 * k3);
    rhs_(t_ + c4 * h, ytmp, k4);
    ytmp = y_ + h * (a51 * k1_ + a52 * k2 + a53 * k3 + a54 * k4);
    rhs_(t_ + c5 * h, ytmp, k5);
    ytmp = y_ + h * (a61 * k1_ + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs_(t_ + h, ytmp, k6);
    ynew = y_ + h * (a71 * k1_ + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);

    const bool ok_domain = !admissible_ || admissible_(ynew);
    if (!ok_domain || !ynew.allFinite()) {
      h_ = 0.25 * h;
      ++rejected_;
      continue;
    }
    rhs_(t_ + h, ynew, k7);
    err = h * (e1 * k1_ + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double en = error_norm(err, y_, ynew);
    if (!std::isfinite(en)) {
      h_ = 0.25 * h;
      ++rejected_;
      continue;
    }

    const double fac = en == 0.0 ? 10.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 10.0);
    if (en <= 1.0) {
      r1_ = y_;
      r2_ = ynew - y_;
      r3_ = h * k1_ - r2_;
      r4_ = r2_ - h * k7 - r3_;
      r5_ = h * (d1 * k1_ + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
      t_prev_ = t_;
      // Land exactly on the limit to avoid round-off slivers.
      t_ = (t_limit - (t_ + h) <= hmin) ? t_limit : t_ + h;
      y_ = ynew;
      k1_ = k7;
      // A step clipped by t_limit says nothing against the proposed size.
      const bool clipped = h < h_;
      h_ = clipped ? std::max(h_, h * fac) : h * fac;
      ++accepted_;
      if (accepted_ > opts_.max_steps) throw StiffnessError("maximum number of steps exceeded", t_);
      return;
    }
    h_ = h * std::max(fac, 0.2);
    ++rejected_;
  }
}

void DormandPrince45::advance_to(double t_end) {
  while (t_ < t_end) step(t_end);
}

Eigen::VectorXd DormandPrince45::dense(double t) const {
  const double h = t_ - t_prev_;
  if (h <= 0.0) return y_;
  const double th = (t - t_prev_) / h;
  const double th1 = 1.0 - th;
  return r1_ + th * (r2_ + th1 * (r3_ + th * (r4_ + th1 * r5_)));
}

}  // namespace harmonica
