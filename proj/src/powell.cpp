#include "qmoo/powell.hpp"

#include <algorithm>
#include <cmath>

namespace qmoo {

namespace {

constexpr double kGolden = 1.618034;
constexpr double kGoldenSection = 0.3819660;
constexpr double kBracketLimit = 100.0;
constexpr double kTiny = 1e-20;
constexpr double kZeps = 1e-12;
constexpr int kBrentMaxIter = 100;
constexpr int kBracketMaxSteps = 60;

struct Probe {
    double t;
    double f;
};

double sign_of(double magnitude, double sign) {
    return sign >= 0.0 ? std::abs(magnitude) : -std::abs(magnitude);
}

// Expands (0, 1) downhill until g(a) > g(b) < g(c), with parabolic jumps.
struct Bracket {
    Probe a, b, c;
};

Bracket bracket_minimum(const std::function<double(double)>& g) {
    Probe a{0.0, g(0.0)};
    Probe b{1.0, g(1.0)};
    if (b.f > a.f) std::swap(a, b);
    Probe c{b.t + kGolden * (b.t - a.t), 0.0};
    c.f = g(c.t);
    int steps = 0;
    while (b.f > c.f && steps++ < kBracketMaxSteps) {
        const double r = (b.t - a.t) * (b.f - c.f);
        const double q = (b.t - c.t) * (b.f - a.f);
        const double denom = 2.0 * sign_of(std::max(std::abs(q - r), kTiny), q - r);
        double u = b.t - ((b.t - c.t) * q - (b.t - a.t) * r) / denom;
        const double ulim = b.t + kBracketLimit * (c.t - b.t);
        double fu;
        if ((b.t - u) * (u - c.t) > 0.0) {  // u between b and c
            fu = g(u);
            if (fu < c.f) {
                a = b;
                b = {u, fu};
                break;
            }
            if (fu > b.f) {
                c = {u, fu};
                break;
            }
            u = c.t + kGolden * (c.t - b.t);
            fu = g(u);
        } else if ((c.t - u) * (u - ulim) > 0.0) {  // u beyond c, within limit
            fu = g(u);
            if (fu < c.f) {
                b = c;
                c = {u, fu};
                u = c.t + kGolden * (c.t - b.t);
                fu = g(u);
            }
        } else if ((u - ulim) * (ulim - c.t) >= 0.0) {  // clamp to limit
            u = ulim;
            fu = g(u);
        } else {  // reject parabolic step
            u = c.t + kGolden * (c.t - b.t);
            fu = g(u);
        }
        a = b;
        b = c;
        c = {u, fu};
    }
    return {a, b, c};
}

// Brent's parabolic-interpolation / golden-section minimization inside a
// bracket. Returns the best probe found.
Probe brent_minimize(const std::function<double(double)>& g, const Bracket& br, double tol) {
    double lo = std::min(br.a.t, br.c.t);
    double hi = std::max(br.a.t, br.c.t);
    Probe best = br.b;
    if (br.a.f < best.f) best = br.a;
    if (br.c.f < best.f) best = br.c;

    double x = best.t, w = best.t, v = best.t;
    double fx = best.f, fw = best.f, fv = best.f;
    double d = 0.0, e = 0.0;
    for (int iter = 0; iter < kBrentMaxIter; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double tol1 = tol * std::abs(x) + kZeps;
        const double tol2 = 2.0 * tol1;
        if (std::abs(x - mid) <= tol2 - 0.5 * (hi - lo)) break;
        bool golden = true;
        if (std::abs(e) > tol1) {
            const double r = (x - w) * (fx - fv);
            double q = (x - v) * (fx - fw);
            double p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if (q > 0.0) p = -p;
            q = std::abs(q);
            const double etemp = e;
            e = d;
            if (std::abs(p) < std::abs(0.5 * q * etemp) && p > q * (lo - x) && p < q * (hi - x)) {
                d = p / q;
                const double u = x + d;
                if (u - lo < tol2 || hi - u < tol2) d = sign_of(tol1, mid - x);
                golden = false;
            }
        }
        if (golden) {
            e = (x >= mid) ? lo - x : hi - x;
            d = kGoldenSection * e;
        }
        const double u = (std::abs(d) >= tol1) ? x + d : x + sign_of(tol1, d);
        const double fu = g(u);
        if (fu <= fx) {
            if (u >= x) lo = x; else hi = x;
            v = w; fv = fw;
            w = x; fw = fx;
            x = u; fx = fu;
        } else {
            if (u < x) lo = u; else hi = u;
            if (fu <= fw || w == x) {
                v = w; fv = fw;
                w = u; fw = fu;
            } else if (fu <= fv || v == x || v == w) {
                v = u; fv = fu;
            }
        }
    }
    return {x, fx};
}

}  // namespace

PowellResult powell_minimize(const ObjectiveFn& objective, std::vector<double> x0,
                             const PowellOptions& options) {
    const std::size_t n = x0.size();
    if (n == 0) throw InputError("powell_minimize needs at least one variable");

    PowellResult result;
    result.x = x0;
    result.fx = 0.0;

    long calls = 0;
    bool have_best = false;
    auto eval = [&](std::span<const double> p) -> double {
        if (options.max_fcalls > 0 && calls >= options.max_fcalls) throw BudgetExhausted{};
        ++calls;
        const double f = objective(p);
        if (!have_best || f < result.fx) {
            result.x.assign(p.begin(), p.end());
            result.fx = f;
            have_best = true;
        }
        return f;
    };

    std::vector<double> point = x0;
    std::vector<double> scratch(n);
    auto line_function = [&](const std::vector<double>& origin, const std::vector<double>& dir) {
        return [&, origin, dir](double t) {
            for (std::size_t i = 0; i < n; ++i) scratch[i] = origin[i] + t * dir[i];
            return eval(scratch);
        };
    };

    // Minimizes along dir from point; moves point and rescales dir by the step.
    auto line_minimize = [&](std::vector<double>& dir, double fcur) -> double {
        auto g = line_function(point, dir);
        const Probe at = brent_minimize(g, bracket_minimum(g), options.xtol);
        if (at.f <= fcur) {
            for (std::size_t i = 0; i < n; ++i) {
                dir[i] *= at.t;
                point[i] += dir[i];
            }
            return at.f;
        }
        return fcur;
    };

    try {
        std::vector<std::vector<double>> dirs(n, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i) dirs[i][i] = 1.0;

        double fval = eval(point);
        for (int iter = 0; iter < options.max_iterations; ++iter) {
            const double f_start = fval;
            const std::vector<double> p_start = point;
            double biggest_drop = 0.0;
            std::size_t ibig = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const double f_before = fval;
                fval = line_minimize(dirs[i], fval);
                if (f_before - fval > biggest_drop) {
                    biggest_drop = f_before - fval;
                    ibig = i;
                }
            }
            if (2.0 * (f_start - fval) <=
                options.ftol * (std::abs(f_start) + std::abs(fval)) + kTiny) {
                result.converged = true;
                break;
            }
            // Powell's test on the extrapolated point decides whether the net
            // sweep displacement should replace the direction of largest drop.
            std::vector<double> extrapolated(n), net_dir(n);
            for (std::size_t i = 0; i < n; ++i) {
                extrapolated[i] = 2.0 * point[i] - p_start[i];
                net_dir[i] = point[i] - p_start[i];
            }
            const double f_ext = eval(extrapolated);
            if (f_ext < f_start) {
                const double df1 = f_start - fval - biggest_drop;
                const double df2 = f_start - f_ext;
                const double t = 2.0 * (f_start - 2.0 * fval + f_ext) * df1 * df1 -
                                 biggest_drop * df2 * df2;
                if (t < 0.0) {
                    fval = line_minimize(net_dir, fval);
                    dirs[ibig] = dirs[n - 1];
                    dirs[n - 1] = net_dir;
                }
            }
        }
    } catch (const BudgetExhausted&) {
        result.budget_exhausted = true;
    }
    result.n_calls = calls;
    if (!have_best) {
        result.x = std::move(x0);
        result.fx = std::numeric_limits<double>::quiet_NaN();
    }
    return result;
}

}  // namespace qmoo
