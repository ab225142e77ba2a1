#pragma once

#include <cmath>
#include <complex>
#include <functional>

#include "kaczeta/errors.hpp"

namespace kaczeta {

namespace detail {

template <class T, class F>
struct SimpsonState {
  const F& f;
  double tol;
  int min_depth;
  int max_depth;
  double err = 0.0;

  T recurse(double a, double b, T fa, T fm, T fb, T whole, int depth) {
    const double m = 0.5 * (a + b);
    const double h = b - a;
    const T flm = f(0.5 * (a + m));
    const T frm = f(0.5 * (m + b));
    const T left = h / 12.0 * (fa + 4.0 * flm + fm);
    const T right = h / 12.0 * (fm + 4.0 * frm + fb);
    const T delta = left + right - whole;
    if (depth >= max_depth ||
        (depth >= min_depth && std::abs(delta) <= 15.0 * tol * (h > 0 ? h : 1.0))) {
      err += std::abs(delta) / 15.0;
      return left + right + delta / 15.0;
    }
    return recurse(a, m, fa, flm, fm, left, depth + 1) +
           recurse(m, b, fm, frm, fb, right, depth + 1);
  }
};

} // namespace detail

template <class T>
struct QuadResult {
  T value;
  double error_estimate;
};

// Adaptive Simpson on [a,b]; tol is an absolute per-unit-length target.
// min_depth forces initial subdivision so sharply concentrated integrands are
// not mistaken for zero by the first coarse probes.
template <class T, class F>
inline QuadResult<T> adaptive_simpson(const F& f, double a, double b, double tol,
                                      int min_depth = 8, int max_depth = 30) {
  detail::SimpsonState<T, F> st{f, tol / std::max(1.0, b - a), min_depth, max_depth};
  const T fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const T whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const T v = st.recurse(a, b, fa, fm, fb, whole, 0);
  return {v, st.err};
}

} // namespace kaczeta
