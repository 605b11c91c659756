#include "dyncon/fused_lasso.hpp"

#include <cmath>
#include <stdexcept>

namespace dyncon {

namespace {

double soft_threshold(double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
}

}  // namespace

// Direct non-iterative taut-string style algorithm (Condat 2013).
Vector tv_chain_prox(const Vector& y, double lambda) {
    const int n = static_cast<int>(y.size());
    if (n == 0) return y;
    if (lambda <= 0.0 || n == 1) return y;

    Vector x(n);
    int k = 0, k0 = 0, km = 0, kp = 0;
    double vmin = y[0] - lambda;
    double vmax = y[0] + lambda;
    double umin = lambda;
    double umax = -lambda;

    for (;;) {
        if (k == n - 1) {
            if (umin < 0.0) {
                for (int i = k0; i <= km; ++i) x[i] = vmin;
                k = k0 = km = km + 1;
                vmin = y[k];
                umin = lambda;
                umax = y[k] + lambda - vmax;
                continue;
            }
            if (umax > 0.0) {
                for (int i = k0; i <= kp; ++i) x[i] = vmax;
                k = k0 = kp = kp + 1;
                vmax = y[k];
                umax = -lambda;
                umin = y[k] - lambda - vmin;
                continue;
            }
            const double level = vmin + umin / (k - k0 + 1);
            for (int i = k0; i <= k; ++i) x[i] = level;
            return x;
        }
        if (y[k + 1] + umin < vmin - lambda) {  // segment ends with a negative jump
            for (int i = k0; i <= km; ++i) x[i] = vmin;
            k = k0 = km = kp = km + 1;
            vmin = y[k];
            vmax = y[k] + 2.0 * lambda;
            umin = lambda;
            umax = -lambda;
        } else if (y[k + 1] + umax > vmax + lambda) {  // positive jump
            for (int i = k0; i <= kp; ++i) x[i] = vmax;
            k = k0 = km = kp = kp + 1;
            vmin = y[k] - 2.0 * lambda;
            vmax = y[k];
            umin = lambda;
            umax = -lambda;
        } else {  // no jump yet, extend the segment
            ++k;
            umin += y[k] - vmin;
            umax += y[k] - vmax;
            if (umin >= lambda) {
                vmin += (umin - lambda) / (k - k0 + 1);
                umin = lambda;
                km = k;
            }
            if (umax <= -lambda) {
                vmax += (umax + lambda) / (k - k0 + 1);
                umax = -lambda;
                kp = k;
            }
        }
    }
}

Vector fused_lasso_chain(const Vector& y, double a, double l1, double l2) {
    if (!(a > 0.0)) throw std::invalid_argument("fused_lasso_chain: weight a must be positive");
    if (l1 < 0.0 || l2 < 0.0)
        throw std::invalid_argument("fused_lasso_chain: penalties must be nonnegative");
    Vector z = tv_chain_prox(y, l2 / a);
    if (l1 > 0.0) {
        const double t = l1 / a;
        for (int i = 0; i < z.size(); ++i) z[i] = soft_threshold(z[i], t);
    }
    return z;
}

}  // namespace dyncon
