#pragma once

#include <cmath>
#include <cstdlib>
#include <optional>
#include <thread>
#include <vector>

#include "bigmath.hpp"
#include "core.hpp"

namespace dqca {

// ---------------------------------------------------------------------------
// Channel index algebra
// ---------------------------------------------------------------------------

/// Label (a, b) of one of the four matrix units the transition matrices
/// decompose into. `a` is the input mode, `b` the output mode (R = 0, L = 1);
/// the unit matrix carries its single entry at row b, column a. Under that
/// placement the channel parity a^b matches the flip-count parity of the
/// paths feeding the channel.
struct Channel {
    int a = 0;
    int b = 0;

    int parity() const { return a ^ b; }
    bool operator==(const Channel&) const = default;
};

inline constexpr Channel kChannels[4] = {{0, 0}, {1, 1}, {1, 0}, {0, 1}};

/// Index composition A_ab . A_cd = A_ad when b = c, zero otherwise.
/// Note the matrix units realize this rule with the factors exchanged:
/// unit(p) * unit(q) = unit(compose(q, p)); the algebra composes along the
/// application order of a path while the matrix product is written
/// latest-step first.
inline std::optional<Channel> compose(Channel p, Channel q) {
    if (p.b != q.a) return std::nullopt;
    return Channel{p.a, q.b};
}

/// The matrix unit for a channel: entry 1 at row b, column a.
inline Mat2 channel_unit(Channel ch) {
    Mat2 r;
    r(ch.b, ch.a) = 1.0;
    return r;
}

// ---------------------------------------------------------------------------
// Path bookkeeping
// ---------------------------------------------------------------------------

/// Shift counts of a path: r rights, l lefts, f flips, with
/// r + l + f = t and r - l = d.
struct PathTally {
    int r = 0;
    int l = 0;
    int f = 0;
    int t = 0;
    int d = 0;

    bool operator==(const PathTally&) const = default;

    /// Tally determined by (t, d, f); empty when no path realizes it
    /// (wrong parity or counts out of range).
    static std::optional<PathTally> from(int t, int d, int f) {
        if (t < 0 || f < 0 || f > t) return std::nullopt;
        if ((t - f + d) % 2 != 0) return std::nullopt;
        int r = (t - f + d) / 2;
        int l = (t - f - d) / 2;
        if (r < 0 || l < 0) return std::nullopt;
        return PathTally{r, l, f, t, d};
    }
};

/// Scalar amplitude shared by every surviving path with f flips:
/// (i m)^f n^(t-f).
inline Cplx alpha(int f, int t, const Mass& mass) {
    if (f < 0 || f > t) throw std::domain_error("alpha: need 0 <= f <= t");
    static constexpr Cplx kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    double mf = 1.0, nf = 1.0;
    for (int i = 0; i < f; ++i) mf *= mass.m;
    for (int i = 0; i < t - f; ++i) nf *= mass.n;
    return kIPow[f % 4] * mf * nf;
}

namespace pathsum {

// ---------------------------------------------------------------------------
// Exact path counts
// ---------------------------------------------------------------------------

/// Number of surviving paths with f flips contributing to a channel, for
/// fixed total time t and displacement d. Counts the arrangements of the r
/// R-runs and l L-runs into the odd/even slots between flips:
///
///   c_00(f) = C(f/2 + r, r) * C(f/2 + l - 1, l)        (f even)
///   c_11(f) = C(f/2 + l, l) * C(f/2 + r - 1, r)        (f even)
///   c_10(f) = c_01(f) = C((f-1)/2 + r, r) * C((f-1)/2 + l, l)   (f odd)
///
/// evaluated with the conventions of binom_count (so the unique straight
/// path at f = 0 comes out as 1). Zero whenever f has the wrong parity for
/// the channel or (t, d, f) admits no tally.
inline BigInt coefficient(Channel ch, int f, int t, int d, const PascalTable* table = nullptr) {
    if (ch.parity() != (f & 1)) return 0;
    auto tally = PathTally::from(t, d, f);
    if (!tally) return 0;
    const long long r = tally->r, l = tally->l;
    const long long h = f / 2;  // floor; for odd f this is (f-1)/2
    if (ch.a == 0 && ch.b == 0) return binom_count(h + r, r, table) * binom_count(h + l - 1, l, table);
    if (ch.a == 1 && ch.b == 1) return binom_count(h + l, l, table) * binom_count(h + r - 1, r, table);
    return binom_count(h + r, r, table) * binom_count(h + l, l, table);
}

// ---------------------------------------------------------------------------
// Channel sums over a generic scalar type
// ---------------------------------------------------------------------------

/// Mass data lifted to a scalar type T. For T = BigRat this only exists for
/// Pythagorean masses (m = 3/5, 5/13, ...) or for formal (m, n) pairs used in
/// algebraic identity checks.
template <class T>
struct ScalarMass {
    T m, n, m2, n2;
};

inline ScalarMass<BigFloat> big_mass(double m) {
    BigFloat mm(m);
    BigFloat m2 = mm * mm;
    BigFloat n2 = BigFloat(1) - m2;
    return ScalarMass<BigFloat>{mm, sqrt(n2), m2, n2};
}

inline ScalarMass<BigRat> rational_mass(long long m_num, long long m_den, long long n_num,
                                        long long n_den) {
    BigRat m(m_num, m_den), n(n_num, n_den);
    return ScalarMass<BigRat>{m, n, m * m, n * n};
}

/// Real part of the f-sum for one channel and displacement:
///   sum over admissible f of  c_ab(f) * (-1)^((f - p)/2) * m^f * n^(t-f),
/// where p = a^b. The full kernel entry is i^p times this value; the i^p
/// phase and the sign alternation together are (i m)^f.
template <class T>
T channel_fsum(Channel ch, int d, int t, const ScalarMass<T>& sm,
               const PascalTable* table = nullptr) {
    const int p = ch.parity();
    if (t < 0 || std::abs(d) > t) return T(0);
    if (((t + d) % 2 + 2) % 2 != p) return T(0);

    if (sm.n == T(0)) {
        // pure-flip limit: only the f = t all-flip term survives
        if (d != 0) return T(0);
        T value = pow_t(sm.m, t);
        return ((t - p) / 2) % 2 ? -value : value;
    }

    T sum(0);
    T mf = (p == 1) ? sm.m : T(1);     // m^f
    T nf = pow_t(sm.n, t - p);         // n^(t-f)
    bool negate = false;
    for (int f = p; f <= t - std::abs(d); f += 2) {
        BigInt c = coefficient(ch, f, t, d, table);
        if (c != 0) {
            T term = T(c) * mf * nf;
            sum += negate ? -term : term;
        }
        mf *= sm.m2;
        nf /= sm.n2;
        negate = !negate;
    }
    return sum;
}

// ---------------------------------------------------------------------------
// Propagator kernel
// ---------------------------------------------------------------------------

/// K(d, t) for d in [-t, t]: the 2x2 matrix summing the amplitudes of all
/// t-step paths with displacement d. Entries outside the causal cone are
/// zero by construction.
struct PropagatorKernel {
    int t = 0;
    std::vector<Mat2> entries;  // index d + t

    PropagatorKernel() = default;
    explicit PropagatorKernel(int time)
        : t(time), entries(static_cast<std::size_t>(2 * time + 1)) {}

    Mat2& at(int d) { return entries[static_cast<std::size_t>(d + t)]; }
    const Mat2& at(int d) const { return entries[static_cast<std::size_t>(d + t)]; }

    /// sum over d of K(d)^dagger K(d); identity for a unitary evolution.
    Mat2 unitarity_sum() const {
        Mat2 s;
        for (const auto& k : entries) s += k.adjoint() * k;
        return s;
    }
};

namespace detail {

/// Runs fn(d) for d in [-t, t]. Entries are independent, so the result is
/// identical for any thread count.
template <class Fn>
void for_each_displacement(int t, int threads, Fn&& fn) {
    const int total = 2 * t + 1;
    if (threads <= 1 || total < 4) {
        for (int d = -t; d <= t; ++d) fn(d);
        return;
    }
    threads = std::min(threads, total);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([=, &fn] {
            for (int i = w; i < total; i += threads) fn(i - t);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace detail

/// Kernel from the analytical path sum: per displacement, the two
/// parity-allowed channel sums assembled into a 2x2 matrix. Sums are
/// accumulated in wide floats (the terms alternate and can exceed the result
/// by dozens of orders of magnitude) and rounded once at the end, so the
/// result is reproducible bit-for-bit regardless of `threads`.
inline PropagatorKernel kernel(int t, const Mass& mass, int threads = 1) {
    if (t < 0) throw std::domain_error("kernel: negative time");
    const auto sm = big_mass(mass.m);
    const PascalTable table(t);
    PropagatorKernel out(t);
    detail::for_each_displacement(t, threads, [&](int d) {
        Mat2& k = out.at(d);
        if (((t + d) % 2 + 2) % 2 == 0) {
            k(0, 0) = static_cast<double>(channel_fsum<BigFloat>({0, 0}, d, t, sm, &table));
            k(1, 1) = static_cast<double>(channel_fsum<BigFloat>({1, 1}, d, t, sm, &table));
        } else {
            // channel (1,0) sits at row 0, col 1; (0,1) mirrors it
            k(0, 1) = Cplx(0.0, static_cast<double>(channel_fsum<BigFloat>({1, 0}, d, t, sm, &table)));
            k(1, 0) = Cplx(0.0, static_cast<double>(channel_fsum<BigFloat>({0, 1}, d, t, sm, &table)));
        }
    });
    return out;
}

/// psi_out(x) = sum_y K(x - y) psi_in(y).
inline FieldState convolve(const PropagatorKernel& k, const FieldState& state) {
    FieldState out;
    out.time = state.time + k.t;
    if (state.empty()) return out;
    out.offset = state.min_x() - k.t;
    out.amps.assign(state.amps.size() + static_cast<std::size_t>(2 * k.t), Spinor{});
    for (int y = state.min_x(); y <= state.max_x(); ++y) {
        const Spinor& src = state.amps[static_cast<std::size_t>(y - state.offset)];
        if (src.is_zero()) continue;
        for (int d = -k.t; d <= k.t; ++d)
            out.amps[static_cast<std::size_t>(y + d - out.offset)] += k.at(d) * src;
    }
    out.trim();
    return out;
}

/// Evolution by kernel convolution; agrees with dqca::evolve.
inline FieldState evolve_via_kernel(const FieldState& state, const Mass& mass, int t,
                                    int threads = 1) {
    return convolve(kernel(t, mass, threads), state);
}

}  // namespace pathsum
}  // namespace dqca
