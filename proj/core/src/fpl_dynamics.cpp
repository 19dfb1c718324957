#include "fockmarket/fpl_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include "fockmarket/market_models.hpp"
#include "fockmarket/price_ladder.hpp"

namespace fockmarket {

namespace {

constexpr double kRelTol = 1e-9;
constexpr double kAbsTolPerUnit = 1e-12;
constexpr unsigned kMaxDepth = 15;
constexpr double kSimpsonPanelsPerUnit = 1e4;
const Complex kI(0.0, 1.0);

using ComplexFn = std::function<Complex(double)>;

Complex adaptive(const ComplexFn& f, double a, double b) {
  if (b <= a) return {0.0, 0.0};
  double error = 0.0;
  double l1 = 0.0;
  const Complex value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, a, b, kMaxDepth, kRelTol, &error, &l1);
  if (!std::isfinite(value.real()) || !std::isfinite(value.imag()) ||
      error > kRelTol * l1 + kAbsTolPerUnit * (b - a)) {
    throw NumericalError(fmt::format(
        "quadrature on [{}, {}] did not converge (error {:.3e}, L1 {:.3e})", a, b, error, l1));
  }
  return value;
}

// Even number of Simpson panels covering [a, b] at the oracle resolution.
std::size_t simpson_panels(double a, double b) {
  auto m = static_cast<std::size_t>(std::ceil(kSimpsonPanelsPerUnit * (b - a)));
  m = std::max<std::size_t>(m, 2);
  return m + (m % 2);
}

Complex simpson(const ComplexFn& f, double a, double b) {
  if (b <= a) return {0.0, 0.0};
  const std::size_t m = simpson_panels(a, b);
  const double h = (b - a) / static_cast<double>(m);
  Complex sum = f(a) + f(b);
  for (std::size_t j = 1; j < m; ++j) {
    sum += (j % 2 ? 4.0 : 2.0) * f(a + h * static_cast<double>(j));
  }
  return sum * (h / 3.0);
}

// The four inner integrands, without the 1 + i and i lam prefactors.
struct InnerIntegrals {
  Complex e1{0.0, 0.0};  // int (P_c omega_c - omega_a) e^{i chi}
  Complex e2{0.0, 0.0};  // int e^{i chi_tilde}
  Complex t1{0.0, 0.0};  // int (P_c Omega_C - Omega_A) e^{i chi_tilde}
  Complex t2{0.0, 0.0};  // int e^{i chi}

  InnerIntegrals& operator+=(const InnerIntegrals& o) {
    e1 += o.e1;
    e2 += o.e2;
    t1 += o.t1;
    t2 += o.t2;
    return *this;
  }
  Etas etas(double lam) const {
    return {1.0 + kI * e1, kI * lam * e2, 1.0 + kI * t1, kI * lam * t2};
  }
};

struct Integrands {
  const FplParams& p;

  InnerIntegrals at(double s) const {
    const Phases ph = phases(s, p);
    const double pc = price_at(p, s);
    const Complex u = std::polar(1.0, ph.chi);
    const Complex ut = std::polar(1.0, ph.chi_tilde);
    return {(pc * p.omega_c - p.omega_a) * u, ut, (pc * p.Omega_C - p.Omega_A) * ut, u};
  }
};

// Fixed Gauss rule for short panels; exact to roundoff there.
InnerIntegrals gauss_inner(const Integrands& in, double a, double b) {
  if (b <= a) return {};
  using Rule = boost::math::quadrature::gauss<double, 30>;
  InnerIntegrals out;
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  const auto& x = Rule::abscissa();
  const auto& w = Rule::weights();
  auto add = [&](double s, double weight) {
    const InnerIntegrals v = in.at(s);
    out.e1 += weight * v.e1;
    out.e2 += weight * v.e2;
    out.t1 += weight * v.t1;
    out.t2 += weight * v.t2;
  };
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] == 0.0) {
      add(mid, w[j] * half);
    } else {
      add(mid - half * x[j], w[j] * half);
      add(mid + half * x[j], w[j] * half);
    }
  }
  return out;
}

// Panel width keeping every phase within about half a radian per panel.
double panel_width(const FplParams& p) {
  const PhaseCoefficients c = phase_coefficients(p);
  const double rate = std::abs(c.alpha) + std::abs(c.alpha_tilde) +
                      2.0 * p.lam * (std::abs(c.beta) + std::abs(c.beta_tilde) + 1.0);
  return std::min(0.125, 0.5 / std::max(rate, 1e-12));
}

InnerIntegrals integrate_inner(const FplParams& p, double a, double b, Quadrature method) {
  const Integrands in{p};
  auto run = [&](auto member) {
    const ComplexFn f = [&](double s) { return in.at(s).*member; };
    return method == Quadrature::kAdaptive ? adaptive(f, a, b) : simpson(f, a, b);
  };
  return {run(&InnerIntegrals::e1), run(&InnerIntegrals::e2), run(&InnerIntegrals::t1),
          run(&InnerIntegrals::t2)};
}

Complex r_from(const Etas& e, const OmegaCoefficients& w) {
  return w.w1 * e.eta1 * std::conj(e.eta2_tilde) + w.w2 * e.eta2 * std::conj(e.eta1_tilde);
}

// Inner integrals over one Simpson sub-panel [x, x+h] using its midpoint.
InnerIntegrals simpson_step(const Integrands& in, double x, double h) {
  const InnerIntegrals a = in.at(x);
  const InnerIntegrals m = in.at(x + 0.5 * h);
  const InnerIntegrals b = in.at(x + h);
  const double c = h / 6.0;
  return {c * (a.e1 + 4.0 * m.e1 + b.e1), c * (a.e2 + 4.0 * m.e2 + b.e2),
          c * (a.t1 + 4.0 * m.t1 + b.t1), c * (a.t2 + 4.0 * m.t2 + b.t2)};
}

}  // namespace

void FplParams::validate() const {
  if (M < 0 || O < 0) throw Error("price and supply must be >= 0");
  if (n < 0 || k < 0 || n_res < 0 || k_res < 0) throw Error("occupations must be >= 0");
  if (!(lam >= 0.0) || !std::isfinite(lam)) throw Error("coupling lam must be >= 0");
  const double freqs[] = {omega_a, omega_c, Omega_A, Omega_C};
  for (double v : freqs) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw Error("frequencies must be finite and >= 0");
  }
}

double price_at(const FplParams& p, double t) {
  return 0.5 * ((p.M + p.O) + (p.M - p.O) * std::cos(2.0 * p.lam * t));
}

PhaseCoefficients phase_coefficients(const FplParams& p) {
  if (p.lam == 0.0) {
    throw DegenerateParameters("phase amplitudes are undefined at lam = 0");
  }
  const double sum = p.M + p.O;
  const double diff = p.M - p.O;
  return {0.5 * (sum * p.omega_c - 2.0 * p.omega_a), p.omega_c * diff / (4.0 * p.lam),
          0.5 * (sum * p.Omega_C - 2.0 * p.Omega_A), p.Omega_C * diff / (4.0 * p.lam)};
}

Phases phases(double t, const FplParams& p) {
  const PhaseCoefficients c = phase_coefficients(p);
  const double s = std::sin(2.0 * p.lam * t);
  return {c.alpha * t + c.beta * s, c.alpha_tilde * t + c.beta_tilde * s};
}

Etas eta_functions(double t, const FplParams& p, Quadrature method) {
  p.validate();
  if (t < 0.0) throw Error("eta functions need t >= 0");
  if (p.lam == 0.0) throw DegenerateParameters("eta functions need lam > 0");
  return integrate_inner(p, 0.0, t, method).etas(p.lam);
}

OmegaCoefficients omega_coefficients(const FplParams& p) {
  p.validate();
  const double f2 = std::norm(p.f);
  const double w1 = f2 * (1 + p.n) * falling_factorial(p.k, p.M) *
                    (p.n_res * rising_factorial(p.k_res, p.M) -
                     (1 + p.n_res) * falling_factorial(p.k_res, p.M));
  const double w2 = f2 * (1 + p.n_res) * falling_factorial(p.k_res, p.M) *
                    (p.n * rising_factorial(p.k, p.M) - (1 + p.n) * falling_factorial(p.k, p.M));
  return {p.w1.value_or(w1), p.w2.value_or(w2)};
}

Complex r_of_t(double t, const FplParams& p, Quadrature method) {
  return r_from(eta_functions(t, p, method), omega_coefficients(p));
}

std::string FplTrajectory::to_csv() const {
  std::string out = "t,Pc,n,k,delta_pi\n";
  for (std::size_t i = 0; i < pc.size(); ++i) {
    out += fmt::format("{},{},{},{},{}\n", format_number(pc.time(i)),
                       format_number(pc.value(i)), format_number(n.value(i)),
                       format_number(k.value(i)), format_number(delta_pi.value(i)));
  }
  return out;
}

FplTrajectory trajectory(const FplParams& p, std::span<const double> times, Quadrature method) {
  p.validate();
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < 0.0 || (i > 0 && times[i] <= times[i - 1])) {
      throw Error("trajectory times must be nonnegative and strictly increasing");
    }
  }
  const OmegaCoefficients w = omega_coefficients(p);
  const double lam = p.lam;
  const Integrands in{p};

  FplTrajectory out;
  InnerIntegrals inner;  // accumulated from 0 to tau
  Complex int_r(0.0, 0.0);
  Complex int_pc_r(0.0, 0.0);
  double tau = 0.0;

  for (double t : times) {
    if (lam != 0.0 && t > tau) {
      if (method == Quadrature::kAdaptive) {
        const double width = panel_width(p);
        const auto panels =
            static_cast<std::size_t>(std::max(1.0, std::ceil((t - tau) / width)));
        const double h = (t - tau) / static_cast<double>(panels);
        for (std::size_t j = 0; j < panels; ++j) {
          const double a = tau + h * static_cast<double>(j);
          const double b = j + 1 == panels ? t : a + h;
          const InnerIntegrals base = inner;
          // the two products of r separately; with w1 = w2 they nearly cancel
          auto term = [&](double s, int which) {
            InnerIntegrals local = base;
            local += gauss_inner(in, a, s);
            const Etas e = local.etas(lam);
            return which == 0 ? e.eta1 * std::conj(e.eta2_tilde) : e.eta2 * std::conj(e.eta1_tilde);
          };
          for (int which = 0; which < 2; ++which) {
            const Complex weight = which == 0 ? w.w1 : w.w2;
            if (weight == 0.0) continue;
            int_r += weight * adaptive([&](double s) { return term(s, which); }, a, b);
            int_pc_r +=
                weight * adaptive([&](double s) { return price_at(p, s) * term(s, which); }, a, b);
          }
          inner += gauss_inner(in, a, b);
        }
      } else {
        // Inner integrals advance panel by panel; the outer composite
        // Simpson rule uses r at the panel endpoints.
        const std::size_t m = simpson_panels(tau, t);
        const double h = (t - tau) / static_cast<double>(m);
        Complex sum_r(0.0, 0.0);
        Complex sum_pc_r(0.0, 0.0);
        for (std::size_t j = 0; j <= m; ++j) {
          const double s = tau + h * static_cast<double>(j);
          if (j > 0) inner += simpson_step(in, s - h, h);
          const Complex r = r_from(inner.etas(lam), w);
          const double weight = (j == 0 || j == m) ? 1.0 : (j % 2 ? 4.0 : 2.0);
          sum_r += weight * r;
          sum_pc_r += weight * price_at(p, s) * r;
        }
        int_r += sum_r * (h / 3.0);
        int_pc_r += sum_pc_r * (h / 3.0);
      }
      tau = t;
    }
    const double pc = lam == 0.0 ? static_cast<double>(p.M) : price_at(p, t);
    const double sin2 = std::pow(std::sin(lam * t), 2);
    const double n_t = p.n - 2.0 * lam * int_r.imag();
    const double k_t = p.k + 2.0 * lam * int_pc_r.imag();
    const double dpi = lam == 0.0
                           ? 0.0
                           : p.n * (p.O - p.M) * sin2 -
                                 2.0 * lam * int_r.imag() * (p.M + (p.O - p.M) * sin2) +
                                 2.0 * lam * int_pc_r.imag();
    out.pc.append(t, pc);
    out.n.append(t, n_t);
    out.k.append(t, k_t);
    out.delta_pi.append(t, dpi);
    out.int_r.push_back(int_r);
    out.int_pc_r.push_back(int_pc_r);
  }
  return out;
}

ZerothOrderCheck zeroth_order_check(const FplParams& p, std::span<const double> times) {
  p.validate();
  // a A | c C | o | p with just enough headroom for z^dag Z(f).
  const std::vector<int> cutoffs{p.n + 1, p.n_res, p.k, p.k_res + p.M, p.O, p.M};
  SpacePtr s = build_space(cutoffs, open_market_labels(1));
  const NumberState state{p.n, p.n_res, p.k, p.k_res, p.O, p.M};
  const std::size_t price = s->mode(ModeKind::kPrice, 0);
  const MatrixOperator z = ladder(s, s->mode(ModeKind::kShare, 0), Ladder::kLower) *
                           cash_power_op(s, s->mode(ModeKind::kCash, 0), price, Ladder::kRaise);
  const MatrixOperator zf =
      p.f * (ladder(s, s->mode(ModeKind::kShare, 1), Ladder::kLower) *
             cash_power_op(s, s->mode(ModeKind::kCash, 1), price, Ladder::kRaise));
  ZerothOrderCheck out;
  out.expectation = expectation(state, z.adjoint() * zf);

  if (p.lam != 0.0) {
    auto r0 = [&](double t) {
      const Phases ph = phases(t, p);
      return out.expectation * std::polar(1.0, -(ph.chi - ph.chi_tilde));
    };
    Complex int_r(0.0, 0.0);
    Complex int_pc_r(0.0, 0.0);
    double tau = 0.0;
    for (double t : times) {
      if (t > tau) {
        int_r += adaptive(r0, tau, t);
        int_pc_r += adaptive([&](double u) { return price_at(p, u) * r0(u); }, tau, t);
        tau = t;
      }
      const double dn = std::abs(2.0 * p.lam * int_r.imag());
      const double dk = std::abs(2.0 * p.lam * int_pc_r.imag());
      out.max_drift = std::max({out.max_drift, dn, dk});
    }
  }
  out.constant = out.max_drift < 1e-12;
  return out;
}

}  // namespace fockmarket
