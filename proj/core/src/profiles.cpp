#include "mfns/profiles.hpp"

#include <cmath>

namespace mfns {

double Profile::eval(double x, double L) const {
  switch (kind) {
    case Kind::constant:
      return value;
    case Kind::sine:
      return mean + amplitude * std::sin(2.0 * M_PI * mode * x / L + phase);
    case Kind::cosine:
      return mean + amplitude * std::cos(2.0 * M_PI * mode * x / L + phase);
    case Kind::step:
      return x < split * L ? left : right;
  }
  return 0.0;
}

Profile Profile::constant(double v) {
  Profile p;
  p.kind = Kind::constant;
  p.value = v;
  return p;
}

Profile Profile::sine(double mean, double amplitude, int mode, double phase) {
  Profile p;
  p.kind = Kind::sine;
  p.mean = mean;
  p.amplitude = amplitude;
  p.mode = mode;
  p.phase = phase;
  return p;
}

Profile Profile::cosine(double mean, double amplitude, int mode, double phase) {
  Profile p = sine(mean, amplitude, mode, phase);
  p.kind = Kind::cosine;
  return p;
}

Profile Profile::step(double left, double right, double split) {
  Profile p;
  p.kind = Kind::step;
  p.left = left;
  p.right = right;
  p.split = split;
  return p;
}

ScalarField sample_profile(const Profile& p, const PeriodicGrid& grid) {
  return ScalarField::sample(grid, [&](double x) { return p.eval(x, grid.L); });
}

}  // namespace mfns
