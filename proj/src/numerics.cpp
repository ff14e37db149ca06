// SPDX-License-Identifier: Apache-2.0
//
// nfsec - near-field secure hybrid precoding simulator
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include "nfsec/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <string>
#include <vector>

namespace nfsec
{
    double log_gamma(double x)
    {
        if (!(x > 0.0) || !std::isfinite(x))
            throw DomainError("log_gamma requires a finite positive argument");
        return std::lgamma(x);
    }

    double beta_fn(double a, double b)
    {
        if (!(a > 0.0) || !(b > 0.0))
            throw DomainError("beta_fn requires positive arguments");
        return std::exp(log_gamma(a) + log_gamma(b) - log_gamma(a + b));
    }

    double q_function(double x)
    {
        return 0.5 * std::erfc(x / std::numbers::sqrt2);
    }

    namespace
    {
        // log(n!) with a lazily built table for the common range.
        double log_factorial(long n)
        {
            static const std::vector<double> table = []
            {
                std::vector<double> t(1 << 20);
                t[0] = 0.0;
                for (std::size_t i = 1; i < t.size(); ++i)
                    t[i] = t[i - 1] + std::log(double(i));
                return t;
            }();
            return std::size_t(n) < table.size() ? table[std::size_t(n)] : std::lgamma(double(n) + 1.0);
        }

        constexpr double neg_inf = -std::numeric_limits<double>::infinity();
    }

    double dncf_scaled_pdf(double s, double lambda1, double lambda2, int M, const SeriesControl &ctrl)
    {
        if (!(s >= 0.0) || !std::isfinite(s))
            throw DomainError("dncf_scaled_pdf requires s >= 0");
        if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0) || !std::isfinite(lambda1) || !std::isfinite(lambda2))
            throw DomainError("non-centralities must be finite and non-negative");
        if (M < 2)
            throw DomainError("dncf_scaled_pdf requires M >= 2");
        if (!(ctrl.tolerance > 0.0) || ctrl.max_index < 1)
            throw DomainError("invalid series control");

        const double m1 = double(M - 1);
        const double log_ms = std::log(m1 + s);
        // per-index slopes of the log term in a and b
        const double slope_a = (lambda1 > 0.0 && s > 0.0) ? std::log(0.5 * lambda1) + std::log(s) - log_ms : neg_inf;
        const double slope_b = lambda2 > 0.0 ? std::log(0.5 * lambda2) + std::log(m1) - log_ms : neg_inf;
        const double base = -0.5 * (lambda1 + lambda2) + m1 * std::log(m1) - double(M) * log_ms;
        const long a_max = slope_a == neg_inf ? 0 : ctrl.max_index;
        const long b_max = slope_b == neg_inf ? 0 : ctrl.max_index;

        auto log_term = [&](long a, long b)
        {
            double v = base - 2.0 * log_factorial(a) - log_factorial(b) - log_factorial(b + M - 2) + log_factorial(a + b + M - 1);
            if (a > 0)
                v += double(a) * slope_a;
            if (b > 0)
                v += double(b) * slope_b;
            return v;
        };

        auto fail = [&]
        {
            throw SeriesNotConverged("doubly non-central F series did not converge within index cap " +
                                     std::to_string(ctrl.max_index) + " (lambda1=" + std::to_string(lambda1) +
                                     ", lambda2=" + std::to_string(lambda2) + ")");
        };

        // Integer argmax of a concave f on [lo, hi], galloping out from x0.
        auto climb = [](auto &&f, long x0, long lo, long hi)
        {
            long x = std::clamp(x0, lo, hi);
            double fx = f(x);
            for (const long dir : {1L, -1L})
            {
                long step = 1;
                while (step > 0)
                {
                    const long y = x + dir * step;
                    if (y < lo || y > hi)
                    {
                        step /= 2;
                        continue;
                    }
                    const double fy = f(y);
                    if (fy > fx)
                    {
                        x = y;
                        fx = fy;
                        step *= 2;
                    }
                    else
                        step /= 2;
                }
            }
            return std::pair{x, fx};
        };

        long b_hint = 0;
        auto row_peak = [&](long a)
        {
            const auto peak = climb([&](long b) { return log_term(a, b); }, b_hint, 0, b_max);
            b_hint = peak.first;
            return peak;
        };
        // rows stay log-concave after maximising over b, so the lattice has one peak
        const auto [a_star, top] = climb([&](long a) { return row_peak(a).second; }, 0, 0, a_max);
        const double cut = top + std::log(ctrl.tolerance) - std::log(1e4);

        double sum = 0.0;
        auto sweep_row = [&](long a)
        {
            const auto [b0, l0] = row_peak(a);
            if (l0 < cut)
                return false;
            if (a + b0 > ctrl.max_index)
                fail();
            sum += std::exp(l0 - top);
            for (long b = b0 + 1; b <= b_max; ++b)
            {
                const double l = log_term(a, b);
                if (l < cut)
                    break;
                if (a + b > ctrl.max_index || b == b_max)
                    fail();
                sum += std::exp(l - top);
            }
            for (long b = b0 - 1; b >= 0; --b)
            {
                const double l = log_term(a, b);
                if (l < cut)
                    break;
                sum += std::exp(l - top);
            }
            return true;
        };

        for (long a = a_star; sweep_row(a); ++a)
            if (a == a_max && a_max > 0)
                fail();
        for (long a = a_star - 1; a >= 0 && sweep_row(a); --a)
        {
        }
        return sum * std::exp(top);
    }

    std::vector<double> dncf_breakpoints(double lambda1, double lambda2, int M)
    {
        if (M < 2 || !(lambda1 >= 0.0) || !(lambda2 >= 0.0))
            throw DomainError("invalid doubly non-central F parameters");
        const double k2 = 2.0 * double(M - 1);
        const double centre = double(M - 1) * (2.0 + lambda1) / (k2 + lambda2);
        const double r1 = std::sqrt(4.0 + 4.0 * lambda1) / (2.0 + lambda1);
        const double r2 = std::sqrt(2.0 * k2 + 4.0 * lambda2) / (k2 + lambda2);
        // log-scale spread: symmetric for narrow peaks, still reaches the lower tail of wide ones
        const double spread = std::log1p(std::hypot(r1, r2));
        std::vector<double> out;
        for (double k : {-8.0, -4.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 4.0, 8.0})
            out.push_back(centre * std::exp(k * spread));
        return out;
    }

    double sample_ncx2(int dof, double lambda, Rng &rng)
    {
        if (dof < 1 || !(lambda >= 0.0))
            throw DomainError("sample_ncx2 requires dof >= 1 and lambda >= 0");
        std::normal_distribution<double> n(0.0, 1.0);
        const double z0 = n(rng) + std::sqrt(lambda);
        double acc = z0 * z0;
        for (int i = 1; i < dof; ++i)
        {
            const double z = n(rng);
            acc += z * z;
        }
        return acc;
    }

    namespace
    {
        constexpr std::array<double, 8> kronrod_x = {
            0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
        constexpr std::array<double, 8> kronrod_w = {
            0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
        constexpr std::array<double, 4> gauss_w = {
            0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
            0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

        struct Interval
        {
            double lo, hi, value, error;
            bool operator<(const Interval &o) const { return error < o.error; }
        };

        template <typename G>
        Interval gk15(const G &g, double lo, double hi)
        {
            const double c = 0.5 * (lo + hi);
            const double h = 0.5 * (hi - lo);
            const double fc = g(c);
            double k = fc * kronrod_w[7];
            double gs = fc * gauss_w[3];
            for (int i = 0; i < 7; ++i)
            {
                const double dx = h * kronrod_x[std::size_t(i)];
                const double f = g(c - dx) + g(c + dx);
                k += kronrod_w[std::size_t(i)] * f;
                if (i % 2 == 1)
                    gs += gauss_w[std::size_t(i / 2)] * f;
            }
            return {lo, hi, k * h, std::abs((k - gs) * h)};
        }
    }

    double integrate_semi_infinite(const std::function<double(double)> &f, const QuadratureOptions &opt)
    {
        if (!(opt.tolerance > 0.0))
            throw DomainError("quadrature tolerance must be positive");
        auto g = [&f](double t)
        {
            const double u = 1.0 - t;
            const double s = t / u;
            if (!std::isfinite(s))
                return 0.0;
            const double v = f(s) / (u * u);
            return std::isfinite(v) ? v : 0.0;
        };

        constexpr int initial = 16;
        std::vector<double> cuts;
        for (int i = 0; i <= initial; ++i)
            cuts.push_back(double(i) / initial);
        for (double s : opt.breakpoints)
            if (s > 0.0 && std::isfinite(s))
                cuts.push_back(s / (1.0 + s));
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

        std::priority_queue<Interval> heap;
        double total = 0.0, err = 0.0;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        {
            const Interval iv = gk15(g, cuts[i], cuts[i + 1]);
            total += iv.value;
            err += iv.error;
            heap.push(iv);
        }
        int splits = 0;
        while (err > std::max(opt.tolerance * std::abs(total), opt.abs_tolerance))
        {
            if (splits++ >= opt.max_subdivisions)
                throw QuadratureFailure("adaptive quadrature exhausted its subdivision budget (estimate " +
                                        std::to_string(total) + " +/- " + std::to_string(err) + ")");
            const Interval worst = heap.top();
            heap.pop();
            const double mid = 0.5 * (worst.lo + worst.hi);
            const Interval left = gk15(g, worst.lo, mid);
            const Interval right = gk15(g, mid, worst.hi);
            total += left.value + right.value - worst.value;
            err += left.error + right.error - worst.error;
            heap.push(left);
            heap.push(right);
        }
        // re-sum to shed the drift of incremental updates
        total = 0.0;
        while (!heap.empty())
        {
            total += heap.top().value;
            heap.pop();
        }
        return total;
    }
}
