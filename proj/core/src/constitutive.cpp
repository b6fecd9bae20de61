#include "mfns/constitutive.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mfns/quadrature.hpp"

namespace mfns {

ConstitutiveLaws make_laws(const PowerlawPressure& p, const PowerlawViscosity& mu,
                           LawMode mode, double mu0) {
  ConstitutiveLaws laws;
  const double a = p.a, g = p.gamma;
  if (g == 2.0) {  // the common case, keep it off the pow() path
    laws.pressure = [a](double s) { return a * s * s; };
    laws.pressure_derivative = [a](double s) { return 2.0 * a * s; };
  } else {
    laws.pressure = [a, g](double s) { return a * std::pow(s, g); };
    laws.pressure_derivative = [a, g](double s) { return a * g * std::pow(s, g - 1.0); };
  }
  if (g == 1.0) {
    laws.energy_potential_closed = [a](double z) { return a * z * std::log(z); };
  } else {
    laws.energy_potential_closed = [a, g](double z) {
      return a * (std::pow(z, g) - z) / (g - 1.0);
    };
  }

  const double c = mu.c, d = mu.d;
  laws.viscosity = [c, d](double s) { return c + d * std::sqrt(s); };
  if (d == 0.0) {
    laws.viscosity_derivative = [](double) { return 0.0; };
  } else {
    laws.viscosity_derivative = [d](double s) { return 0.5 * d / std::sqrt(s); };
  }
  laws.bd_potential_closed = [c, d](double z) {
    return c * (1.0 - 1.0 / z) + 2.0 * d * (1.0 - 1.0 / std::sqrt(z));
  };

  laws.mu0 = mu0 >= 0.0 ? mu0 : std::min(c, d);
  laws.mode = mode;

  std::ostringstream pn, vn;
  pn << "powerlaw_pressure{a=" << a << ",gamma=" << g << "}";
  vn << "powerlaw_viscosity{c=" << c << ",d=" << d << "}";
  laws.pressure_name = pn.str();
  laws.viscosity_name = vn.str();
  return laws;
}

ConstitutiveLaws make_laws(const PowerlawPressure& p, const LinearViscosity& mu) {
  ConstitutiveLaws laws = make_laws(p, PowerlawViscosity{0.0, 0.0}, LawMode::relaxed, mu.c);
  const double c = mu.c;
  laws.viscosity = [c](double s) { return c * s; };
  laws.viscosity_derivative = [c](double) { return c; };
  laws.bd_potential_closed = [c](double z) { return c * std::log(z); };
  std::ostringstream vn;
  vn << "linear_viscosity{c=" << c << "}";
  laws.viscosity_name = vn.str();
  return laws;
}

namespace {

bool eval_finite(const std::function<double(double)>& f, double s, double& out) {
  out = f(s);
  return std::isfinite(out);
}

void check_derivative(const std::function<double(double)>& value,
                      const std::function<double(double)>& derivative, double s,
                      double rho_lo, const char* which,
                      std::vector<LawViolation>& violations) {
  const double h = std::max(1e-7, 1e-3 * std::abs(s));
  if (s - h < rho_lo) return;  // centered stencil must stay in range
  const double fp = value(s + h), fm = value(s - h), dv = derivative(s);
  if (!std::isfinite(fp) || !std::isfinite(fm) || !std::isfinite(dv)) return;  // reported elsewhere
  const double fd = (fp - fm) / (2.0 * h);
  if (std::abs(fd - dv) > 1e-6 * std::max(1.0, std::abs(dv))) {
    std::ostringstream msg;
    msg << which << "_derivative(" << s << ")=" << dv
        << " disagrees with centered difference " << fd;
    violations.push_back({"derivative_consistency", s, msg.str()});
  }
}

}  // namespace

ValidationReport validate_laws(const ConstitutiveLaws& laws, double rho_lo, double rho_hi,
                               int samples) {
  if (!(rho_lo >= 0.0) || !(rho_hi >= rho_lo)) {
    throw std::invalid_argument("validate_laws: rho range must satisfy 0 <= lo <= hi");
  }
  if (samples < 2) {
    throw std::invalid_argument("validate_laws: samples must be >= 2");
  }

  ValidationReport report;
  auto& v = report.violations;

  if (laws.mode == LawMode::strict && !(laws.mu0 > 0.0)) {
    v.push_back({"mu0_positive", laws.mu0, "mu0 must be strictly positive in strict mode"});
  }

  double damping_c = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double s = rho_lo + (rho_hi - rho_lo) * static_cast<double>(i) / (samples - 1);
    double p, dp, mu, dmu;
    bool ok = true;
    if (!eval_finite(laws.pressure, s, p)) {
      v.push_back({"finite_evaluation", s, "pressure(s) is not finite"});
      ok = false;
    }
    if (!eval_finite(laws.pressure_derivative, s, dp)) {
      // sqrt-type laws may have an infinite derivative exactly at s = 0
      if (s > 0.0) v.push_back({"finite_evaluation", s, "pressure_derivative(s) is not finite"});
      ok = false;
    }
    if (!eval_finite(laws.viscosity, s, mu)) {
      v.push_back({"finite_evaluation", s, "viscosity(s) is not finite"});
      ok = false;
    }
    if (!eval_finite(laws.viscosity_derivative, s, dmu) && s > 0.0) {
      v.push_back({"finite_evaluation", s, "viscosity_derivative(s) is not finite"});
    }
    if (!ok) continue;

    if (laws.mode == LawMode::strict) {
      if (dp < -1e-12) {
        v.push_back({"pressure_monotone", s, "p'(s) < 0"});
      }
      const double bound = laws.mu0 * (1.0 + std::sqrt(s));
      if (mu < bound * (1.0 - 1e-12) - 1e-300) {
        std::ostringstream msg;
        msg << "mu(s)=" << mu << " < mu0*(1+sqrt(s))=" << bound;
        v.push_back({"viscosity_lower_bound", s, msg.str()});
      }
    } else {
      if (s > 0.0 && !(mu > 0.0)) {
        v.push_back({"viscosity_positive", s, "mu(s) <= 0 in relaxed mode"});
      }
      damping_c = std::max(damping_c, mu / (1.0 + std::max(p, 0.0)));
    }

    check_derivative(laws.pressure, laws.pressure_derivative, s, rho_lo, "pressure", v);
    check_derivative(laws.viscosity, laws.viscosity_derivative, s, rho_lo, "viscosity", v);
  }

  if (laws.mode == LawMode::relaxed) {
    if (!std::isfinite(damping_c)) {
      v.push_back({"damping_bound", rho_hi, "no finite C with mu <= C + C*p on the sampled range"});
    } else {
      report.relaxed_damping_constant = damping_c;
    }
  }
  return report;
}

std::string ValidationReport::summary() const {
  if (violations.empty()) return "admissible";
  std::ostringstream out;
  out << violations.size() << " violation(s):";
  for (const auto& viol : violations) {
    out << "\n  [" << viol.invariant << "] at rho=" << viol.sample << ": " << viol.detail;
  }
  return out.str();
}

double energy_potential(const ConstitutiveLaws& laws, double rho) {
  if (!(rho > 0.0)) {
    throw std::domain_error("energy_potential: rho must be positive");
  }
  if (laws.energy_potential_closed) return laws.energy_potential_closed(rho);
  const auto& p = laws.pressure;
  return rho * integrate_adaptive([&p](double s) { return p(s) / (s * s); }, 1.0, rho);
}

double bd_potential(const ConstitutiveLaws& laws, double rho) {
  if (!(rho > 0.0)) {
    throw std::domain_error("bd_potential: rho must be positive");
  }
  if (laws.bd_potential_closed) return laws.bd_potential_closed(rho);
  const auto& mu = laws.viscosity;
  return integrate_adaptive([&mu](double s) { return mu(s) / (s * s); }, 1.0, rho);
}

double kappa(const ConstitutiveLaws& laws, double rho) {
  if (!(rho >= 0.0)) {
    throw std::domain_error("kappa: rho must be nonnegative");
  }
  const double mu = laws.viscosity(rho);
  if (!(mu > 0.0)) {
    throw std::domain_error("kappa: viscosity(rho) must be positive");
  }
  return laws.pressure(rho) / mu;
}

}  // namespace mfns
