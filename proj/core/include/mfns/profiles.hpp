#pragma once

#include <string>

#include "mfns/grid.hpp"

namespace mfns {

/// Named analytic x-profile used for initial data and Young-measure specs.
struct Profile {
  enum class Kind { constant, sine, cosine, step };
  Kind kind = Kind::constant;

  double value = 0.0;  // constant

  // sine/cosine: mean + amplitude * trig(2*pi*mode*x/L + phase)
  double mean = 0.0;
  double amplitude = 0.0;
  int mode = 1;
  double phase = 0.0;

  // step: left for x/L < split, right otherwise
  double left = 0.0;
  double right = 0.0;
  double split = 0.5;

  double eval(double x, double L) const;

  static Profile constant(double v);
  static Profile sine(double mean, double amplitude, int mode = 1, double phase = 0.0);
  static Profile cosine(double mean, double amplitude, int mode = 1, double phase = 0.0);
  static Profile step(double left, double right, double split = 0.5);
};

ScalarField sample_profile(const Profile& p, const PeriodicGrid& grid);

}  // namespace mfns
