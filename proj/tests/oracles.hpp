#pragma once

// Brute-force reference computations in plain doubles, written without the library.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

using Fn = std::function<double(double)>;

inline double ratio(double num, double den) {
    if (den == 0.0) return num > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    return num / den;
}

inline std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
    return v;
}

/// sup |Tx-Ty|/|x-y| over distinct points.
inline double lipschitz(const Fn& T, const std::vector<double>& pts) {
    double s = 0.0;
    for (double x : pts)
        for (double y : pts)
            if (x != y) s = std::max(s, std::abs(T(x) - T(y)) / std::abs(x - y));
    return s;
}

inline double kannan(const Fn& T, const std::vector<double>& pts) {
    double s = 0.0;
    for (double x : pts)
        for (double y : pts)
            if (x != y) s = std::max(s, ratio(std::abs(T(x) - T(y)), std::abs(x - T(x)) + std::abs(y - T(y))));
    return s;
}

inline double chatterjea(const Fn& T, const std::vector<double>& pts) {
    double s = 0.0;
    for (double x : pts)
        for (double y : pts)
            if (x != y) s = std::max(s, ratio(std::abs(T(x) - T(y)), std::abs(x - T(y)) + std::abs(y - T(x))));
    return s;
}

/// sup (|Tx-Ty| - L|y-Tx|)/|x-y|, clamped at 0.
inline double almost_delta(const Fn& T, const std::vector<double>& pts, double L) {
    double s = 0.0;
    for (double x : pts)
        for (double y : pts)
            if (x != y) s = std::max(s, (std::abs(T(x) - T(y)) - L * std::abs(y - T(x))) / std::abs(x - y));
    return s;
}

/// Strict pseudocontraction k for a single pair.
inline double spc_k(const Fn& T, double x, double y) {
    const double u = x - y;
    const double v = T(x) - T(y);
    return ratio(v * v - u * u, (u - v) * (u - v));
}

/// Demicontractive k for (x, p) with p fixed.
inline double demi_k(const Fn& T, double x, double p) {
    const double tx = T(x);
    return ratio((tx - p) * (tx - p) - (x - p) * (x - p), (x - tx) * (x - tx));
}

inline Fn averaged(const Fn& T, double lambda) {
    return [T, lambda](double x) { return (1.0 - lambda) * x + lambda * T(x); };
}

/// Sign-change roots of Tx - x on a fine grid, each refined by bisection.
inline std::vector<double> fixed_points(const Fn& T, double lo, double hi, int n = 20001) {
    std::vector<double> roots;
    auto r = [&](double x) { return T(x) - x; };
    double xp = lo;
    double rp = r(lo);
    if (rp == 0.0) roots.push_back(lo);
    for (int i = 1; i < n; ++i) {
        const double x = lo + (hi - lo) * i / (n - 1);
        const double rx = r(x);
        if (rx == 0.0) {
            roots.push_back(x);
        } else if (rp != 0.0 && (rp < 0) != (rx < 0)) {
            double a = xp, b = x;
            for (int k = 0; k < 200; ++k) {
                const double m = 0.5 * (a + b);
                if ((r(m) < 0) == (r(a) < 0)) a = m;
                else b = m;
            }
            const double m = 0.5 * (a + b);
            if (std::abs(r(m)) < 1e-9) roots.push_back(m);
        }
        xp = x;
        rp = rx;
    }
    return roots;
}

}  // namespace oracle
