#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace dqca {

using Cplx = std::complex<double>;

/// Thrown when an exhaustive routine is asked for more work than its guard
/// allows (e.g. brute-force enumeration beyond 3^16 words).
struct resource_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Mass parameter
// ---------------------------------------------------------------------------

/// The pair (m, n) with n = sqrt(1 - m^2) that weights the stay/shift
/// amplitudes of the automaton. m = 0 is free transport, m = 1 pure flipping.
struct Mass {
    double m = 0.0;
    double n = 1.0;
};

inline Mass make_mass(double m) {
    if (!(m >= 0.0 && m <= 1.0))
        throw std::domain_error("make_mass: m must lie in [0, 1]");
    return Mass{m, std::sqrt(1.0 - m * m)};
}

// ---------------------------------------------------------------------------
// 2x2 complex matrices
// ---------------------------------------------------------------------------

/// Row-major 2x2 complex matrix; the value type for transition matrices and
/// propagator kernel entries.
struct Mat2 {
    std::array<Cplx, 4> e{};

    Cplx& operator()(int row, int col) { return e[static_cast<std::size_t>(2 * row + col)]; }
    const Cplx& operator()(int row, int col) const {
        return e[static_cast<std::size_t>(2 * row + col)];
    }

    static Mat2 zero() { return Mat2{}; }
    static Mat2 identity() {
        Mat2 r;
        r(0, 0) = 1.0;
        r(1, 1) = 1.0;
        return r;
    }

    Mat2 adjoint() const {
        Mat2 r;
        r(0, 0) = std::conj((*this)(0, 0));
        r(0, 1) = std::conj((*this)(1, 0));
        r(1, 0) = std::conj((*this)(0, 1));
        r(1, 1) = std::conj((*this)(1, 1));
        return r;
    }

    double max_abs() const {
        double v = 0.0;
        for (const auto& x : e) v = std::max(v, std::abs(x));
        return v;
    }

    Mat2& operator+=(const Mat2& o) {
        for (std::size_t i = 0; i < 4; ++i) e[i] += o.e[i];
        return *this;
    }
};

inline Mat2 operator+(Mat2 a, const Mat2& b) { return a += b; }

inline Mat2 operator*(const Mat2& a, const Mat2& b) {
    Mat2 r;
    r(0, 0) = a(0, 0) * b(0, 0) + a(0, 1) * b(1, 0);
    r(0, 1) = a(0, 0) * b(0, 1) + a(0, 1) * b(1, 1);
    r(1, 0) = a(1, 0) * b(0, 0) + a(1, 1) * b(1, 0);
    r(1, 1) = a(1, 0) * b(0, 1) + a(1, 1) * b(1, 1);
    return r;
}

inline Mat2 operator*(Cplx s, Mat2 a) {
    for (auto& x : a.e) x *= s;
    return a;
}

inline double max_abs_diff(const Mat2& a, const Mat2& b) {
    double v = 0.0;
    for (std::size_t i = 0; i < 4; ++i) v = std::max(v, std::abs(a.e[i] - b.e[i]));
    return v;
}

/// Transition matrix applied when the particle shifts right: n on the
/// right-mode diagonal entry.
inline Mat2 a_right(const Mass& mass) {
    Mat2 r;
    r(0, 0) = mass.n;
    return r;
}

/// Transition matrix for a left shift: n on the left-mode diagonal entry.
inline Mat2 a_left(const Mass& mass) {
    Mat2 r;
    r(1, 1) = mass.n;
    return r;
}

/// Transition matrix for staying put: i*m exchanging the two modes.
inline Mat2 a_flip(const Mass& mass) {
    Mat2 r;
    r(0, 1) = Cplx(0.0, mass.m);
    r(1, 0) = Cplx(0.0, mass.m);
    return r;
}

// ---------------------------------------------------------------------------
// Field state
// ---------------------------------------------------------------------------

/// Two-component amplitude at one lattice site. `up` is the right mode,
/// `lo` the left mode.
struct Spinor {
    Cplx up{};
    Cplx lo{};

    double norm_sq() const { return std::norm(up) + std::norm(lo); }
    bool is_zero() const { return up == Cplx{} && lo == Cplx{}; }

    Spinor& operator+=(const Spinor& o) {
        up += o.up;
        lo += o.lo;
        return *this;
    }
};

inline Spinor operator*(const Mat2& m, const Spinor& s) {
    return Spinor{m(0, 0) * s.up + m(0, 1) * s.lo, m(1, 0) * s.up + m(1, 1) * s.lo};
}

/// Finite-support two-component field over the integer lattice at a fixed
/// time. Stored as a dense window starting at `offset`; everything outside
/// the window is implicitly zero.
struct FieldState {
    int offset = 0;
    std::vector<Spinor> amps;
    int time = 0;

    bool empty() const { return amps.empty(); }
    int min_x() const { return offset; }
    int max_x() const { return offset + static_cast<int>(amps.size()) - 1; }

    /// Amplitude at site x (zero outside the stored window).
    Spinor at(int x) const {
        if (x < offset || x >= offset + static_cast<int>(amps.size())) return Spinor{};
        return amps[static_cast<std::size_t>(x - offset)];
    }

    double norm_sq() const {
        double s = 0.0;
        for (const auto& a : amps) s += a.norm_sq();
        return s;
    }

    /// Drop exactly-zero spinors at both edges of the window.
    void trim() {
        std::size_t lead = 0;
        while (lead < amps.size() && amps[lead].is_zero()) ++lead;
        if (lead == amps.size()) {
            amps.clear();
            offset = 0;
            return;
        }
        std::size_t tail = amps.size();
        while (tail > lead && amps[tail - 1].is_zero()) --tail;
        if (lead > 0 || tail < amps.size()) {
            amps = std::vector<Spinor>(amps.begin() + static_cast<std::ptrdiff_t>(lead),
                                       amps.begin() + static_cast<std::ptrdiff_t>(tail));
            offset += static_cast<int>(lead);
        }
    }

    FieldState shifted(int dx) const {
        FieldState s = *this;
        s.offset += dx;
        return s;
    }

    static FieldState delta(int x, Spinor value, int time = 0) {
        FieldState s;
        s.offset = x;
        s.amps = {value};
        s.time = time;
        return s;
    }
};

/// Largest per-component amplitude difference between two states, compared
/// over the union of their supports.
inline double max_abs_diff(const FieldState& a, const FieldState& b) {
    if (a.empty() && b.empty()) return 0.0;
    int lo = std::min(a.empty() ? b.min_x() : a.min_x(), b.empty() ? a.min_x() : b.min_x());
    int hi = std::max(a.empty() ? b.max_x() : a.max_x(), b.empty() ? a.max_x() : b.max_x());
    double v = 0.0;
    for (int x = lo; x <= hi; ++x) {
        Spinor sa = a.at(x), sb = b.at(x);
        v = std::max(v, std::abs(sa.up - sb.up));
        v = std::max(v, std::abs(sa.lo - sb.lo));
    }
    return v;
}

// ---------------------------------------------------------------------------
// Direct evolution
// ---------------------------------------------------------------------------

/// One unitary step:
///   psi_R(x, t+1) = n * psi_R(x-1, t) + i m * psi_L(x, t)
///   psi_L(x, t+1) = n * psi_L(x+1, t) + i m * psi_R(x, t)
inline FieldState step(const FieldState& state, const Mass& mass) {
    FieldState out;
    out.time = state.time + 1;
    if (state.empty()) return out;

    const Cplx im(0.0, mass.m);
    out.offset = state.offset - 1;
    out.amps.assign(state.amps.size() + 2, Spinor{});
    for (int x = out.min_x(); x <= out.max_x(); ++x) {
        Spinor prev = state.at(x);
        Spinor& dst = out.amps[static_cast<std::size_t>(x - out.offset)];
        dst.up = mass.n * state.at(x - 1).up + im * prev.lo;
        dst.lo = mass.n * state.at(x + 1).lo + im * prev.up;
    }
    out.trim();
    return out;
}

/// t-fold composition of `step`; t = 0 returns the input unchanged.
inline FieldState evolve(FieldState state, const Mass& mass, int t) {
    if (t < 0) throw std::domain_error("evolve: negative time");
    for (int i = 0; i < t; ++i) state = step(state, mass);
    return state;
}

}  // namespace dqca
