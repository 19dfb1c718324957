#include "fockmarket/stochastic_limit.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include <fmt/format.h>

#include "fockmarket/price_ladder.hpp"
#include "fockmarket/time_series.hpp"

namespace fockmarket {

EpsilonProfile epsilon_profiles(const ModelParams& params, double price_mean) {
  params.validate(ModelKind::kOpenMarket, params.lambda_size());
  EpsilonProfile out;
  for (std::size_t k = 0; k < params.lambda_size(); ++k) {
    out.eps_Z.push_back(price_mean * (params.Omega_C[k] - params.omega_c) -
                        (params.Omega_A[k] - params.omega_a));
    out.eps_O.push_back(params.omega_p - params.Omega_O[k]);
  }
  return out;
}

void ReservoirState::validate(std::size_t labels) const {
  if (shares.size() != labels || cash.size() != labels || supply.size() != labels) {
    throw StateError(fmt::format("reservoir state needs {} entries per kind", labels));
  }
  for (std::size_t k = 0; k < labels; ++k) {
    if (shares[k] < 0 || cash[k] < 0 || supply[k] < 0) {
      throw StateError(fmt::format("negative reservoir occupation at label {}", k));
    }
  }
}

namespace {

double delta_mass(double eps, const DeltaOptions& delta) {
  if (delta.lorentzian_width) {
    const double w = *delta.lorentzian_width;
    return w * w / (eps * eps + w * w);
  }
  return std::abs(eps) < delta.zero_tol ? 1.0 : 0.0;
}

std::vector<std::size_t> zeros_of(const std::vector<double>& eps, double tol) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < eps.size(); ++k) {
    if (std::abs(eps[k]) < tol) out.push_back(k);
  }
  return out;
}

void require_system_space(const FockSpace& space) {
  const auto expected = system_labels();
  for (const ModeLabel& label : space.labels()) {
    if (std::find(expected.begin(), expected.end(), label) == expected.end()) {
      throw ModeError(fmt::format("observable acts on non-system mode {}", label.name()));
    }
  }
}

}  // namespace

GammaCoefficients gamma_coefficients(const ModelParams& params,
                                     const ReservoirState& reservoir, int price,
                                     const EpsilonProfile& profile,
                                     const DeltaOptions& delta) {
  const std::size_t n = params.lambda_size();
  reservoir.validate(n);
  if (price < 0) throw StateError("price must be >= 0");
  if (profile.eps_Z.size() != n || profile.eps_O.size() != n) {
    throw Error("epsilon profile does not match the reservoir label set");
  }
  if (!(delta.zero_tol > 0.0)) throw Error("zero_tol must be > 0");
  if (delta.lorentzian_width && !(*delta.lorentzian_width > 0.0)) {
    throw Error("Lorentzian width must be > 0");
  }
  double za = 0.0, zb = 0.0, oa = 0.0, ob = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double mz = delta_mass(profile.eps_Z[k], delta);
    const double mo = delta_mass(profile.eps_O[k], delta);
    const double f2 = std::norm(params.f[k]);
    const double g2 = std::norm(params.g[k]);
    if (mz != 0.0) {
      za += f2 * (reservoir.shares[k] + 1) * falling_factorial(reservoir.cash[k], price) * mz;
      zb += f2 * reservoir.shares[k] * rising_factorial(reservoir.cash[k], price) * mz;
    }
    if (mo != 0.0) {
      oa += g2 * (reservoir.supply[k] + 1) * mo;
      ob += g2 * reservoir.supply[k] * mo;
    }
  }
  const double pi = std::numbers::pi;
  return {Complex(pi * za, 0.0), Complex(pi * zb, 0.0), Complex(pi * oa, 0.0),
          Complex(pi * ob, 0.0)};
}

std::vector<ModeLabel> system_labels() {
  return {{ModeKind::kShare, 0}, {ModeKind::kCash, 0}, {ModeKind::kPrice, 0}};
}

SystemOperators system_operators(int share_cutoff, int cash_cutoff, int price_cutoff) {
  SpacePtr s = build_space({share_cutoff, cash_cutoff, price_cutoff}, system_labels());
  const MatrixOperator a = ladder(s, 0, Ladder::kLower);
  const MatrixOperator p = ladder(s, 2, Ladder::kLower);
  const MatrixOperator n = number_operator(s, 0);
  const MatrixOperator k = number_operator(s, 1);
  const MatrixOperator price = number_operator(s, 2);
  MatrixOperator z = a * cash_power_op(s, 1, 2, Ladder::kRaise);
  MatrixOperator portfolio = price * n + k;
  return {s, std::move(z), p, n, k, price, std::move(portfolio)};
}

MatrixOperator generator_apply(const MatrixOperator& x, const GammaCoefficients& g,
                               const SystemOperators& sys) {
  require_system_space(x.space());
  if (!(x.space() == *sys.space)) {
    throw SpaceMismatch("observable and system operators live on different spaces");
  }
  auto block = [&x](const MatrixOperator& b, Complex ga, Complex gb) {
    const MatrixOperator bd = b.adjoint();
    return ga * (commutator(bd, x) * b) - std::conj(ga) * (bd * commutator(b, x)) +
           gb * (commutator(b, x) * bd) - std::conj(gb) * (b * commutator(bd, x));
  };
  return block(sys.z, g.gz_a, g.gz_b) + block(sys.p, g.go_a, g.go_b);
}

std::string StationarityVerdict::to_report() const {
  auto join = [](const std::vector<std::size_t>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out += ';';
      out += std::to_string(v[i]);
    }
    return out;
  };
  auto join_d = [](const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out += ';';
      out += format_number(v[i]);
    }
    return out;
  };
  std::map<std::string, std::string> kv{
      {"eps_O", join_d(profile.eps_O)},
      {"eps_O_zeros", join(eps_O_zeros)},
      {"eps_Z", join_d(profile.eps_Z)},
      {"eps_Z_zeros", join(eps_Z_zeros)},
      {"gamma_O_a_re", format_number(gammas.go_a.real())},
      {"gamma_O_b_re", format_number(gammas.go_b.real())},
      {"gamma_Z_a_re", format_number(gammas.gz_a.real())},
      {"gamma_Z_b_re", format_number(gammas.gz_b.real())},
      {"norm_L_cash", format_number(norm_L_cash)},
      {"norm_L_portfolio", format_number(norm_L_portfolio)},
      {"norm_L_shares", format_number(norm_L_shares)},
      {"occupations_stationary", occupations_stationary ? "true" : "false"},
      {"portfolio_stationary", portfolio_stationary ? "true" : "false"},
  };
  std::string out;
  for (const auto& [key, value] : kv) out += key + "=" + value + "\n";
  return out;
}

StationarityVerdict stationarity_verdict(const ModelParams& params,
                                         const ReservoirState& reservoir, int price,
                                         const SystemOperators& sys,
                                         const DeltaOptions& delta) {
  StationarityVerdict v;
  v.profile = epsilon_profiles(params, static_cast<double>(price));
  v.gammas = gamma_coefficients(params, reservoir, price, v.profile, delta);
  v.eps_Z_zeros = zeros_of(v.profile.eps_Z, delta.zero_tol);
  v.eps_O_zeros = zeros_of(v.profile.eps_O, delta.zero_tol);
  v.portfolio_stationary = v.eps_O_zeros.empty();
  v.occupations_stationary = v.eps_Z_zeros.empty();
  v.norm_L_portfolio = generator_apply(sys.portfolio, v.gammas, sys).max_abs();
  v.norm_L_shares = generator_apply(sys.shares, v.gammas, sys).max_abs();
  v.norm_L_cash = generator_apply(sys.cash, v.gammas, sys).max_abs();
  return v;
}

Complex second_order_term(const GammaCoefficients& g, int n, int k, int M) {
  if (n < 0 || k < 0 || M < 0) throw StateError("occupations must be >= 0");
  return n * rising_factorial(k, M) * g.gz_a + (n + 1) * falling_factorial(k, M) * g.gz_b +
         static_cast<double>(M) * g.go_a + static_cast<double>(M + 1) * g.go_b;
}

Complex second_order_term(const GammaCoefficients& g, const SystemOperators& sys,
                          const NumberState& state) {
  const MatrixOperator zd = sys.z.adjoint();
  const MatrixOperator pd = sys.p.adjoint();
  return expectation(state, zd * sys.z) * g.gz_a + expectation(state, sys.z * zd) * g.gz_b +
         expectation(state, pd * sys.p) * g.go_a + expectation(state, sys.p * pd) * g.go_b;
}

}  // namespace fockmarket
