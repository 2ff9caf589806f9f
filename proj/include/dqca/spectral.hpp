#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "core.hpp"

namespace dqca {
namespace spectral {

/// Per-wavenumber phase advance: omega(k) = arccos(n cos k), in [0, pi].
/// Close to sqrt(m^2 + k^2) for small m and k.
inline double dispersion(double k, const Mass& mass) {
    double c = mass.n * std::cos(k);
    return std::acos(std::clamp(c, -1.0, 1.0));
}

/// One-step operator at wavenumber k. The right mover picks up e^{-ik}
/// (a right shift multiplies by e^{-ik} under psi_hat(k) = sum_x e^{-ikx} psi(x)).
inline Mat2 momentum_matrix(double k, const Mass& mass) {
    Mat2 a;
    a(0, 0) = mass.n * std::polar(1.0, -k);
    a(1, 1) = mass.n * std::polar(1.0, k);
    a(0, 1) = Cplx(0.0, mass.m);
    a(1, 0) = Cplx(0.0, mass.m);
    return a;
}

namespace detail {

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

/// In-place iterative radix-2 transform; `inverse` flips the exponent sign
/// and applies the 1/N normalization.
inline void fft(std::vector<Cplx>& a, bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * std::numbers::pi / static_cast<double>(len);
        const Cplx wlen = std::polar(1.0, ang);
        for (std::size_t i = 0; i < n; i += len) {
            Cplx w = 1.0;
            for (std::size_t j = 0; j < len / 2; ++j) {
                Cplx u = a[i + j];
                Cplx v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse)
        for (auto& x : a) x /= static_cast<double>(n);
}

/// A(k)^t via the spectral projectors of the two eigenvalues e^{-i omega}
/// and e^{+i omega}. Only used for m > 0, where the eigenvalue gap
/// |2 sin omega| >= 2m keeps the projectors well conditioned.
inline Mat2 momentum_power(double k, const Mass& mass, int t) {
    const Mat2 a = momentum_matrix(k, mass);
    const double omega = dispersion(k, mass);
    const Cplx lam_minus = std::polar(1.0, -omega);  // e^{-i omega}
    const Cplx lam_plus = std::polar(1.0, omega);
    const Cplx gap = lam_minus - lam_plus;
    // P_- = (A - lam_plus I) / (lam_minus - lam_plus), P_+ complements it
    Mat2 p_minus = a;
    p_minus(0, 0) -= lam_plus;
    p_minus(1, 1) -= lam_plus;
    p_minus = (1.0 / gap) * p_minus;
    Mat2 p_plus = Mat2::identity();
    p_plus(0, 0) -= p_minus(0, 0);
    p_plus(0, 1) -= p_minus(0, 1);
    p_plus(1, 0) -= p_minus(1, 0);
    p_plus(1, 1) -= p_minus(1, 1);
    const Cplx phase_minus = std::polar(1.0, -omega * t);
    const Cplx phase_plus = std::polar(1.0, omega * t);
    Mat2 out = phase_minus * p_minus;
    out += phase_plus * p_plus;
    return out;
}

}  // namespace detail

/// Momentum-space evolution: embeds the state in a periodic ring large
/// enough that wrap-around images stay outside the causal cone
/// (L >= support + 2t + 1, rounded up to a power of two), diagonalizes the
/// step per wavenumber, and transforms back.
inline FieldState evolve_spectral(const FieldState& state, const Mass& mass, int t) {
    if (t < 0) throw std::domain_error("evolve_spectral: negative time");
    FieldState out;
    out.time = state.time + t;
    if (state.empty()) return out;

    if (mass.m == 0.0) {
        // free transport decouples exactly; keep it exact rather than
        // pushing the degenerate spectrum through the projector formula
        out.offset = state.offset - t;
        out.amps.assign(state.amps.size() + static_cast<std::size_t>(2 * t), Spinor{});
        for (int x = state.min_x(); x <= state.max_x(); ++x) {
            out.amps[static_cast<std::size_t>(x + t - out.offset)].up = state.at(x).up;
            out.amps[static_cast<std::size_t>(x - t - out.offset)].lo = state.at(x).lo;
        }
        out.trim();
        return out;
    }

    const int support = static_cast<int>(state.amps.size());
    const std::size_t ring = detail::next_pow2(static_cast<std::size_t>(support + 2 * t + 1));
    const int origin = state.min_x() - t;

    std::vector<Cplx> up(ring, Cplx{}), lo(ring, Cplx{});
    for (int x = state.min_x(); x <= state.max_x(); ++x) {
        const auto& s = state.amps[static_cast<std::size_t>(x - state.offset)];
        up[static_cast<std::size_t>(x - origin)] = s.up;
        lo[static_cast<std::size_t>(x - origin)] = s.lo;
    }
    detail::fft(up, false);
    detail::fft(lo, false);
    const double dk = 2.0 * std::numbers::pi / static_cast<double>(ring);
    for (std::size_t j = 0; j < ring; ++j) {
        const Mat2 a_t = detail::momentum_power(dk * static_cast<double>(j), mass, t);
        const Cplx u = up[j], l = lo[j];
        up[j] = a_t(0, 0) * u + a_t(0, 1) * l;
        lo[j] = a_t(1, 0) * u + a_t(1, 1) * l;
    }
    detail::fft(up, true);
    detail::fft(lo, true);

    out.offset = origin;
    out.amps.resize(static_cast<std::size_t>(support + 2 * t));
    for (std::size_t i = 0; i < out.amps.size(); ++i) {
        out.amps[i].up = up[i];
        out.amps[i].lo = lo[i];
    }
    out.trim();
    return out;
}

}  // namespace spectral
}  // namespace dqca
