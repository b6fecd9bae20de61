#include "mfns/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace mfns {
namespace {

// 15-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr double kNodes[15] = {
    -0.98799251802048542848, -0.93727339240070590431, -0.84820658341042721620,
    -0.72441773136017004742, -0.57097217260853884754, -0.39415134707756336990,
    -0.20119409399743452230, 0.0,
    0.20119409399743452230,  0.39415134707756336990,  0.57097217260853884754,
    0.72441773136017004742,  0.84820658341042721620,  0.93727339240070590431,
    0.98799251802048542848};
constexpr double kWeights[15] = {
    0.030753241996117268355, 0.070366047488108124709, 0.107159220467171935012,
    0.139570677926154314447, 0.166269205816993933553, 0.186161000015562211027,
    0.198431485327111576456, 0.202578241925561272880,
    0.198431485327111576456, 0.186161000015562211027, 0.166269205816993933553,
    0.139570677926154314447, 0.107159220467171935012, 0.070366047488108124709,
    0.030753241996117268355};

double gl15(const std::function<double(double)>& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (int i = 0; i < 15; ++i) {
    sum += kWeights[i] * f(mid + half * kNodes[i]);
  }
  return half * sum;
}

double adapt(const std::function<double(double)>& f, double a, double b, double whole,
             double rel_tol, double abs_tol, int depth) {
  const double mid = 0.5 * (a + b);
  const double left = gl15(f, a, mid);
  const double right = gl15(f, mid, b);
  const double refined = left + right;
  const double err = std::abs(refined - whole);
  if (err <= abs_tol || err <= rel_tol * std::abs(refined) || depth >= 40) {
    return refined;
  }
  return adapt(f, a, mid, left, rel_tol, 0.5 * abs_tol, depth + 1) +
         adapt(f, mid, b, right, rel_tol, 0.5 * abs_tol, depth + 1);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol, double abs_tol) {
  if (a == b) return 0.0;
  if (a > b) return -integrate_adaptive(f, b, a, rel_tol, abs_tol);
  const double whole = gl15(f, a, b);
  const double result = adapt(f, a, b, whole, rel_tol, abs_tol, 0);
  if (!std::isfinite(result)) {
    throw std::domain_error("integrate_adaptive: integrand produced a non-finite value");
  }
  return result;
}

}  // namespace mfns
