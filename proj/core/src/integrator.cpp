#include "arrayqc/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace arrayqc {

namespace {

// Dormand-Prince tableau
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
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

double scaled_norm(const CVec& v, const CVec& y0, const CVec& y1, const Tolerances& tol) {
  if (v.size() == 0) return 0.0;
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double sc = tol.atol + tol.rtol * std::max(std::abs(y0(i)), std::abs(y1(i)));
    s += std::norm(v(i)) / (sc * sc);
  }
  return std::sqrt(s / static_cast<double>(v.size()));
}

double initial_step(const RhsFn& f, const CVec& y0, const CVec& f0, double span,
                    const Tolerances& tol, RkStats& st) {
  const double dn0 = scaled_norm(y0, y0, y0, tol);
  const double dn1 = scaled_norm(f0, y0, y0, tol);
  double h0 = (dn0 < 1e-5 || dn1 < 1e-5) ? 1e-6 : 0.01 * dn0 / dn1;
  h0 = std::min(h0, span);
  CVec y1 = y0 + h0 * f0, f1(y0.size());
  f(y1, f1);
  ++st.evaluations;
  const double dn2 = scaled_norm(f1 - f0, y0, y0, tol) / h0;
  const double m = std::max(dn1, dn2);
  const double h1 = m <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / m, 0.2);
  return std::min({100.0 * h0, h1, span});
}

}  // namespace

RkStats dopri5(const RhsFn& f, CVec& y, double t0, double t1, const RkOptions& opt,
               const std::vector<double>& samples, const SampleFn& on_sample,
               const StepFn& on_step) {
  RkStats st;
  if (!(t1 >= t0)) throw std::invalid_argument("integration end precedes start");
  if (t1 == t0) return st;
  const auto n = y.size();
  CVec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), yt(n), ynew(n), err(n);
  f(y, k1);
  ++st.evaluations;

  double t = t0;
  double h = opt.h_initial > 0.0 ? opt.h_initial : initial_step(f, y, k1, t1 - t0, opt.tol, st);
  h = std::min(h, opt.h_max);
  std::size_t next_sample = 0;
  while (next_sample < samples.size() && samples[next_sample] <= t0) ++next_sample;

  const double h_floor_rel = 1e-14;
  while (t < t1) {
    if (st.accepted + st.rejected >= opt.max_steps) {
      std::ostringstream os;
      os.precision(17);
      os << "step budget exhausted at t = " << t;
      throw NumericalError(os.str());
    }
    const bool last = t + h >= t1;
    if (last) h = t1 - t;
    if (h <= h_floor_rel * std::max(1.0, std::abs(t))) {
      std::ostringstream os;
      os.precision(17);
      os << "step size underflow at t = " << t;
      throw NumericalError(os.str());
    }

    yt = y + h * (a21 * k1);
    f(yt, k2);
    yt = y + h * (a31 * k1 + a32 * k2);
    f(yt, k3);
    yt = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    f(yt, k4);
    yt = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    f(yt, k5);
    yt = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    f(yt, k6);
    ynew = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    f(ynew, k7);
    st.evaluations += 6;
    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double en = scaled_norm(err, y, ynew, opt.tol);

    if (std::isfinite(en) && en <= 1.0) {
      const double tnew = last ? t1 : t + h;
      if (on_sample && next_sample < samples.size() && samples[next_sample] <= tnew) {
        const CVec ydiff = ynew - y;
        const CVec bspl = h * k1 - ydiff;
        const CVec r4 = ydiff - h * k7 - bspl;
        const CVec r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
        while (next_sample < samples.size() && samples[next_sample] <= tnew) {
          const double th = (samples[next_sample] - t) / h, th1 = 1.0 - th;
          on_sample(samples[next_sample], y + th * (ydiff + th1 * (bspl + th * (r4 + th1 * r5))));
          ++next_sample;
        }
      }
      y = ynew;
      k1 = k7;
      t = tnew;
      ++st.accepted;
      st.last_h = h;
      if (on_step) on_step(t, y, k1);
      const double fac = en == 0.0 ? 10.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 10.0);
      h = std::min(h * fac, opt.h_max);
    } else {
      ++st.rejected;
      const double fac = std::isfinite(en) ? std::clamp(0.9 * std::pow(en, -0.2), 0.2, 1.0) : 0.2;
      h *= fac;
    }
  }
  return st;
}

}  // namespace arrayqc
