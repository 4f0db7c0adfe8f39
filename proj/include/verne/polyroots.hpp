#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "params.hpp"

namespace verne {

struct ZeroPolynomial : Error {
    ZeroPolynomial() : Error("ZeroPolynomial", "all coefficients vanish") {}
};
struct NonFinite : Error {
    NonFinite() : Error("NonFinite", "non-finite coefficient or sample") {}
};
struct DuplicateNodes : Error {
    DuplicateNodes() : Error("DuplicateNodes", "interpolation nodes repeat") {}
};
struct IllConditioned : Error {
    IllConditioned()
        : Error("IllConditioned", "interpolation system is ill-conditioned") {}
};

// Coefficients ascending: c[0] + c[1] x + ... Leading entries whose magnitude
// falls below kDegreeDropTol * max|c| are treated as absent.
using Poly = std::vector<double>;

inline constexpr double kDegreeDropTol = 1e-11;

inline double poly_eval(const Poly& c, double x) {
    double v = 0;
    for (size_t i = c.size(); i-- > 0;) v = v * x + c[i];
    return v;
}

inline Poly poly_derivative(const Poly& c) {
    Poly d;
    for (size_t i = 1; i < c.size(); ++i) d.push_back(c[i] * double(i));
    return d;
}

inline double max_abs_coeff(const Poly& c) {
    double m = 0;
    for (double v : c) m = std::max(m, std::fabs(v));
    return m;
}

// Index of the highest coefficient that survives the degree-drop threshold,
// or -1 for the (numerically) zero polynomial.
inline int effective_degree(const Poly& c) {
    const double cut = kDegreeDropTol * max_abs_coeff(c);
    for (size_t i = c.size(); i-- > 0;)
        if (std::fabs(c[i]) > cut) return int(i);
    return -1;
}

struct RootEstimate {
    double x = 0;
    int multiplicity = 1;
};

struct RealRootResult {
    std::vector<RootEstimate> roots;  // ascending in x
    int degree = 0;                   // effective degree actually solved
    int sturm_distinct = 0;           // distinct real roots per Sturm count
    bool certified = false;           // sturm_distinct == roots found
};

namespace polydetail {

inline Poly trimmed_unit(const Poly& c) {
    const int d = effective_degree(c);
    Poly t(c.begin(), c.begin() + (d + 1));
    const double m = max_abs_coeff(t);
    for (double& v : t) v /= m;
    return t;
}

// Remainder of a / b; b's leading coefficient must be significant.
inline Poly poly_rem(Poly a, const Poly& b) {
    const int db = int(b.size()) - 1;
    while (int(a.size()) - 1 >= db) {
        const int da = int(a.size()) - 1;
        const double q = a[da] / b[db];
        for (int i = 0; i <= db; ++i) a[da - db + i] -= q * b[i];
        a.pop_back();
    }
    return a;
}

inline Poly poly_div(const Poly& a, const Poly& b) {
    Poly rem = a, q(std::max<size_t>(1, a.size() - b.size() + 1), 0.0);
    const int db = int(b.size()) - 1;
    while (int(rem.size()) - 1 >= db) {
        const int da = int(rem.size()) - 1;
        const double f = rem[da] / b[db];
        q[da - db] = f;
        for (int i = 0; i <= db; ++i) rem[da - db + i] -= f * b[i];
        rem.pop_back();
    }
    return q;
}

// Sturm chain of a squarefree polynomial. Members are rescaled to unit
// max-coefficient; positive scaling preserves sign variations.
inline std::vector<Poly> sturm_chain(const Poly& p) {
    std::vector<Poly> chain;
    chain.push_back(p);
    Poly d = poly_derivative(p);
    if (effective_degree(d) < 0) return chain;
    const double md = max_abs_coeff(d);
    for (double& v : d) v /= md;
    chain.push_back(d);
    while (int(chain.back().size()) - 1 > 0) {
        Poly r = poly_rem(chain[chain.size() - 2], chain.back());
        const double m = max_abs_coeff(r);
        if (m < 1e-12) break;  // common factor reached
        const int dr = effective_degree(r);
        if (dr < 0) break;
        r.resize(dr + 1);
        for (double& v : r) v = -v / m;
        chain.push_back(std::move(r));
    }
    return chain;
}

inline int sign_variations(const std::vector<Poly>& chain, double x) {
    int var = 0, prev = 0;
    for (const Poly& q : chain) {
        const double v = poly_eval(q, x);
        const int s = v > 0 ? 1 : (v < 0 ? -1 : 0);
        if (s == 0) continue;
        if (prev != 0 && s != prev) ++var;
        prev = s;
    }
    return var;
}

// gcd(p, p') up to scale; empty result means p is squarefree.
inline Poly gcd_with_derivative(const Poly& p) {
    Poly a = p, b = poly_derivative(p);
    const double mb = max_abs_coeff(b);
    if (mb == 0) return {};
    for (double& v : b) v /= mb;
    while (true) {
        Poly r = poly_rem(a, b);
        const double m = max_abs_coeff(r);
        const int dr = effective_degree(r);
        if (m < 1e-10 || dr < 0) break;
        if (dr == 0) return {};
        r.resize(dr + 1);
        for (double& v : r) v /= m;
        a = std::move(b);
        b = std::move(r);
    }
    if (int(b.size()) - 1 <= 0) return {};
    return b;
}

// Newton polish with bisection fallback inside a bracketing interval.
inline double refine_root(const Poly& p, const Poly& dp, double lo, double hi,
                          double flo) {
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double f = poly_eval(p, x);
        if (f == 0) return x;
        if ((f > 0) == (flo > 0))
            lo = x;
        else
            hi = x;
        const double d = poly_eval(dp, x);
        double nx = d != 0 ? x - f / d : 0.5 * (lo + hi);
        if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
        if (std::fabs(nx - x) <= 1e-16 * (1 + std::fabs(nx))) return nx;
        x = nx;
    }
    return x;
}

}  // namespace polydetail

// All real roots, ascending, with multiplicity estimates. Isolation uses
// Sturm sign-variation counts on the squarefree part plus bisection, so no
// real root is skipped silently; the result carries the Sturm count for
// certification against the returned set.
inline RealRootResult real_roots(const Poly& coeffs) {
    for (double v : coeffs)
        if (!std::isfinite(v)) throw NonFinite();
    if (effective_degree(coeffs) < 0) throw ZeroPolynomial();

    using namespace polydetail;
    const Poly p = trimmed_unit(coeffs);
    RealRootResult out;
    out.degree = int(p.size()) - 1;
    if (out.degree == 0) {
        out.certified = true;
        return out;
    }

    // Peel repeated factors so every root of `sf` is simple.
    Poly sf = p;
    const Poly g = gcd_with_derivative(p);
    if (!g.empty()) {
        sf = poly_div(p, g);
        const int dsf = effective_degree(sf);
        sf.resize(dsf + 1);
        const double m = max_abs_coeff(sf);
        for (double& v : sf) v /= m;
    }
    if (int(sf.size()) - 1 == 0) {
        out.certified = true;
        return out;
    }

    const auto chain = sturm_chain(sf);
    const int dsf = int(sf.size()) - 1;
    double bound = 0;
    for (int i = 0; i < dsf; ++i)
        bound = std::max(bound, std::fabs(sf[i] / sf[dsf]));
    bound += 1;

    out.sturm_distinct =
        sign_variations(chain, -bound) - sign_variations(chain, bound);

    struct Iv {
        double lo, hi;
        int count;
    };
    std::vector<Iv> work{{-bound, bound, out.sturm_distinct}};
    std::vector<std::pair<double, double>> isolated;
    const Poly sfd = poly_derivative(sf);
    while (!work.empty()) {
        const Iv iv = work.back();
        work.pop_back();
        if (iv.count <= 0) continue;
        if (iv.count == 1 &&
            poly_eval(sf, iv.lo) * poly_eval(sf, iv.hi) < 0) {
            isolated.push_back({iv.lo, iv.hi});
            continue;
        }
        const double mid = 0.5 * (iv.lo + iv.hi);
        if (iv.hi - iv.lo < 1e-14 * (1 + std::fabs(mid))) {
            isolated.push_back({iv.lo, iv.hi});  // unresolvable cluster
            continue;
        }
        if (poly_eval(sf, mid) == 0) {
            isolated.push_back({mid, mid});
            const double nudge = 1e-12 * (1 + std::fabs(mid));
            work.push_back({iv.lo, mid - nudge,
                            sign_variations(chain, iv.lo) -
                                sign_variations(chain, mid - nudge)});
            work.push_back({mid + nudge, iv.hi,
                            sign_variations(chain, mid + nudge) -
                                sign_variations(chain, iv.hi)});
            continue;
        }
        const int left =
            sign_variations(chain, iv.lo) - sign_variations(chain, mid);
        work.push_back({iv.lo, mid, left});
        work.push_back({mid, iv.hi, iv.count - left});
    }

    for (auto [lo, hi] : isolated) {
        const double r = lo == hi ? lo
                                  : refine_root(sf, sfd, lo, hi,
                                                poly_eval(sf, lo));
        out.roots.push_back({r, 1});
    }
    std::sort(out.roots.begin(), out.roots.end(),
              [](const RootEstimate& a, const RootEstimate& b) {
                  return a.x < b.x;
              });

    // Multiplicity: smallest derivative order with a significant value there.
    if (!g.empty()) {
        for (auto& re : out.roots) {
            Poly d = p;
            const double xs = std::max(1.0, std::fabs(re.x));
            int m = 0;
            while (!d.empty()) {
                double scale = 0, xp = 1;
                for (double cv : d) {
                    scale = std::max(scale, std::fabs(cv) * xp);
                    xp *= xs;
                }
                if (scale == 0 ||
                    std::fabs(poly_eval(d, re.x)) > 1e-7 * scale)
                    break;
                ++m;
                d = poly_derivative(d);
            }
            re.multiplicity = std::max(1, m);
        }
    }

    out.certified = int(out.roots.size()) == out.sturm_distinct;
    return out;
}

// Coefficients (ascending, length degree+1) of the unique polynomial through
// the samples; exactly degree+1 samples with distinct nodes are required.
// Newton divided differences expanded to monomial form, audited at the nodes.
inline Poly interpolate_coeffs(
    const std::vector<std::pair<double, double>>& samples, int degree) {
    const size_t n = size_t(degree) + 1;
    if (samples.size() != n)
        throw InvalidValue("samples", "need exactly degree+1 nodes");
    double span = 0;
    for (const auto& [x, y] : samples) {
        if (!std::isfinite(x) || !std::isfinite(y)) throw NonFinite();
        span = std::max(span, std::fabs(x));
    }
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j)
            if (std::fabs(samples[i].first - samples[j].first) <=
                1e-14 * (1 + span))
                throw DuplicateNodes();

    std::vector<double> xs(n), dd(n);
    for (size_t i = 0; i < n; ++i) {
        xs[i] = samples[i].first;
        dd[i] = samples[i].second;
    }
    for (size_t k = 1; k < n; ++k)
        for (size_t i = n - 1; i >= k; --i)
            dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - k]);

    // Accumulate dd[k] * prod_{j<k} (x - xs[j]) in monomial coefficients.
    Poly acc(n, 0.0);
    std::vector<double> basis{1.0};
    for (size_t k = 0; k < n; ++k) {
        for (size_t i = 0; i < basis.size(); ++i) acc[i] += dd[k] * basis[i];
        if (k + 1 < n) {
            basis.push_back(0.0);
            for (size_t i = basis.size(); i-- > 1;)
                basis[i] = basis[i - 1] - xs[k] * basis[i];
            basis[0] = -xs[k] * basis[0];
        }
    }

    double yscale = 1;
    for (const auto& [x, y] : samples) yscale = std::max(yscale, std::fabs(y));
    for (const auto& [x, y] : samples)
        if (std::fabs(poly_eval(acc, x) - y) > 1e-8 * yscale)
            throw IllConditioned();
    return acc;
}

struct DegreeOverflow : Error {
    DegreeOverflow()
        : Error("DegreeOverflow",
                "sampled function exceeds the claimed polynomial degree") {}
};

// Chebyshev-distributed nodes on [lo, hi].
inline std::vector<double> chebyshev_nodes(int n, double lo, double hi) {
    std::vector<double> xs(n);
    for (int k = 0; k < n; ++k) {
        const double t =
            std::cos(3.141592653589793238462643383279502884 * (2.0 * k + 1) /
                     (2.0 * n));
        xs[k] = 0.5 * (lo + hi) + 0.5 * (hi - lo) * t;
    }
    return xs;
}

// Fits `f` (assumed polynomial of the given degree) from degree+1 Chebyshev
// samples on [lo, hi], then audits the fit at `audit` additional uniformly
// spaced out-of-sample points. A residual above rel_tol * max|sample| means
// the degree claim is wrong and raises DegreeOverflow.
template <typename F>
Poly audited_interpolation(F&& f, int degree, double lo, double hi,
                           int audit = 50, double rel_tol = 1e-9) {
    std::vector<std::pair<double, double>> samples;
    double yscale = 0;
    for (double x : chebyshev_nodes(degree + 1, lo, hi)) {
        const double y = f(x);
        yscale = std::max(yscale, std::fabs(y));
        samples.push_back({x, y});
    }
    const Poly c = interpolate_coeffs(samples, degree);
    yscale = std::max(yscale, 1e-300);
    for (int k = 1; k <= audit; ++k) {
        const double x = lo + (hi - lo) * k / (audit + 1.0);
        if (std::fabs(poly_eval(c, x) - f(x)) > rel_tol * yscale)
            throw DegreeOverflow();
    }
    return c;
}

}  // namespace verne
