#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace webattn {

class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline double simpson(double a, double fa, double b, double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adapt(const std::function<double(double)>& f, double a, double fa,
                    double b, double fb, double fm, double whole, double eps,
                    int depth, double span_floor) {
    if (b - a <= span_floor)  // vanishing panel, contribution negligible
        return whole;
    if (depth <= 0)
        throw QuadratureError("adaptive Simpson: max depth exceeded on [" +
                              std::to_string(a) + "," + std::to_string(b) + "]");
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(a, fa, m, fm, flm);
    const double right = simpson(m, fm, b, fb, frm);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * eps)
        return left + right + delta / 15.0;
    return adapt(f, a, fa, m, fm, flm, left, 0.5 * eps, depth - 1, span_floor) +
           adapt(f, m, fm, b, fb, frm, right, 0.5 * eps, depth - 1, span_floor);
}

}  // namespace detail

// Adaptive Simpson quadrature to a relative tolerance.
inline double integrate(const std::function<double(double)>& f, double lo,
                        double hi, double rel_tol = 1e-8, int max_depth = 60) {
    if (hi <= lo) return 0.0;
    const double fa = f(lo), fb = f(hi), fm = f(0.5 * (lo + hi));
    if (!std::isfinite(fa) || !std::isfinite(fb) || !std::isfinite(fm))
        throw QuadratureError("integrand not finite on interval");
    const double whole = detail::simpson(lo, fa, hi, fb, fm);
    const double scale = std::max(std::abs(whole), 1e-300);
    return detail::adapt(f, lo, fa, hi, fb, fm, whole, rel_tol * scale,
                         max_depth, 1e-13 * (hi - lo));
}

}  // namespace webattn
