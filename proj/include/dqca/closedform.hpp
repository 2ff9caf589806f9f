#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "bigmath.hpp"
#include "core.hpp"
#include "pathsum.hpp"

namespace dqca {
namespace closedform {

// ---------------------------------------------------------------------------
// Jacobi polynomials
// ---------------------------------------------------------------------------

/// P_k^{(alpha,beta)} evaluated at `argument`. Here beta is tied to -t and
/// the argument 1 + 2(m/n)^2 lies outside [-1, 1], where the three-term
/// recurrence amplifies quickly, so the polynomial is evaluated as its
/// terminating hypergeometric sum of k + 1 terms instead.
struct JacobiSpec {
    int degree = 0;  // k >= 0
    int alpha = 0;
    int beta = 0;
    double argument = 0.0;
};

namespace detail {

/// ((alpha+1)_k / k!) * sum_{i<=k} [(-k)_i (1+alpha+beta+k)_i / ((alpha+1)_i i!)] zeta^i
/// with zeta = (1 - x)/2; terminating series, any scalar type.
template <class T>
T jacobi_sum(int k, int alpha, int beta, const T& x) {
    const T zeta = (T(1) - x) / T(2);
    T term(1), sum(0);
    for (int i = 0; i <= k; ++i) {
        sum += term;
        term *= T((-k + i)) * T(1 + alpha + beta + k + i) * zeta;
        term /= T((alpha + 1 + i)) * T(i + 1);
    }
    T prefactor(binom_count(k + alpha, k));
    return prefactor * sum;
}

}  // namespace detail

inline double jacobi_eval(const JacobiSpec& spec) {
    if (spec.degree < 0) throw std::domain_error("jacobi_eval: degree must be >= 0");
    if (spec.alpha < 0) throw std::domain_error("jacobi_eval: alpha must be >= 0 here");
    return static_cast<double>(
        detail::jacobi_sum<BigFloat>(spec.degree, spec.alpha, spec.beta, BigFloat(spec.argument)));
}

// ---------------------------------------------------------------------------
// Resummed channel values
// ---------------------------------------------------------------------------

/// The f-sum of one channel resummed as a terminating Gauss series in
/// z = -m^2/n^2 (real part; the kernel entry is i^(a^b) times this).
///
/// Off-diagonal channels, mu± = (t ± d - 1)/2:
///   m n^(t-1) * sum_{j<=min(mu+,mu-)} C(mu+,j) C(mu-,j) z^j
///     = m n^(t-1) * 2F1(-mu+, -mu-; 1; z)
/// Diagonal channel 00, R0 = (t+d)/2, L0 = (t-d)/2 (11 swaps R0 and L0):
///   [d = +-t] n^t  -  m^2 n^(t-2) R0 * 2F1(1-R0, 1-L0; 2; z)
/// where the diagonal series must stop at i = min(R0, L0) - 1: past that
/// index the terms no longer correspond to realizable paths even when the
/// Pochhammer factors stay nonzero (they do when one of R0, L0 is 0).
template <class T>
T channel_resummed(Channel ch, int d, int t, const pathsum::ScalarMass<T>& sm) {
    const int p = ch.parity();
    if (t < 0 || std::abs(d) > t) return T(0);
    if (((t + d) % 2 + 2) % 2 != p) return T(0);

    if (sm.n == T(0)) {  // pure-flip limit
        if (d != 0) return T(0);
        T value = pow_t(sm.m, t);
        return ((t - p) / 2) % 2 ? -value : value;
    }

    const T z = -sm.m2 / sm.n2;
    if (p == 1) {
        const int mu_p = (t + d - 1) / 2;
        const int mu_m = (t - d - 1) / 2;
        if (mu_p < 0 || mu_m < 0) return T(0);
        const int jmax = std::min(mu_p, mu_m);
        T term(1), sum(0);
        for (int j = 0; j <= jmax; ++j) {
            sum += term;
            if (j < jmax) {
                term *= T((mu_p - j)) * T(mu_m - j) * z;
                term /= T((j + 1)) * T(j + 1);
            }
        }
        return sm.m * pow_t(sm.n, t - 1) * sum;
    }

    int r0 = (t + d) / 2;
    int l0 = (t - d) / 2;
    if (ch.a == 1) std::swap(r0, l0);
    T value(0);
    if (l0 == 0) value += pow_t(sm.n, t);  // the straight path
    const int imax = std::min(r0, l0) - 1;
    if (imax >= 0) {
        T term(1), hyp(0);
        for (int i = 0; i <= imax; ++i) {
            hyp += term;
            if (i < imax) {
                term *= T((i + 1 - r0)) * T(i + 1 - l0) * z;
                term /= T((i + 2)) * T(i + 1);
            }
        }
        value -= sm.m2 * pow_t(sm.n, t - 2) * T(r0) * hyp;
    }
    return value;
}

// ---------------------------------------------------------------------------
// Kernel in closed form
// ---------------------------------------------------------------------------

struct KernelOptions {
    bool high_precision = true;
    int threads = 1;
};

/// Largest t for which plain double accumulation of the resummed series
/// keeps roughly 1e-10 relative accuracy; beyond it the terms out-size the
/// result enough to wipe the mantissa.
inline constexpr int kDoublePathMaxTime = 48;

inline pathsum::PropagatorKernel kernel_closedform(int t, const Mass& mass,
                                                   const KernelOptions& opts = {}) {
    if (t < 0) throw std::domain_error("kernel_closedform: negative time");
    if (!opts.high_precision && t > kDoublePathMaxTime)
        throw std::domain_error(
            "kernel_closedform: double-precision path loses the result to cancellation for t > " +
            std::to_string(kDoublePathMaxTime) + "; enable high_precision");

    pathsum::PropagatorKernel out(t);
    if (mass.m == 1.0) {
        // i^t X^t: identity for even t, mode exchange for odd t, at d = 0
        static constexpr Cplx kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        Cplx phase = kIPow[t % 4];
        Mat2& k = out.at(0);
        if (t % 2 == 0) {
            k(0, 0) = phase;
            k(1, 1) = phase;
        } else {
            k(0, 1) = phase;
            k(1, 0) = phase;
        }
        return out;
    }
    if (mass.m == 0.0) {  // pure transport
        out.at(t)(0, 0) = 1.0;
        out.at(-t)(1, 1) = 1.0;
        return out;
    }

    auto fill = [&](auto sm) {
        pathsum::detail::for_each_displacement(t, opts.threads, [&](int d) {
            Mat2& k = out.at(d);
            if (((t + d) % 2 + 2) % 2 == 0) {
                k(0, 0) = static_cast<double>(channel_resummed({0, 0}, d, t, sm));
                k(1, 1) = static_cast<double>(channel_resummed({1, 1}, d, t, sm));
            } else {
                k(0, 1) = Cplx(0.0, static_cast<double>(channel_resummed({1, 0}, d, t, sm)));
                k(1, 0) = Cplx(0.0, static_cast<double>(channel_resummed({0, 1}, d, t, sm)));
            }
        });
    };
    if (opts.high_precision) {
        fill(pathsum::big_mass(mass.m));
    } else {
        fill(pathsum::ScalarMass<double>{mass.m, mass.n, mass.m * mass.m, mass.n * mass.n});
    }
    return out;
}

inline FieldState evolve_via_kernel(const FieldState& state, const Mass& mass, int t,
                                    const KernelOptions& opts = {}) {
    return pathsum::convolve(kernel_closedform(t, mass, opts), state);
}

// ---------------------------------------------------------------------------
// Reconciliation against the published prefactor
// ---------------------------------------------------------------------------

enum class PrefactorFlag { Agree, BothZero, ConstantMismatch, StructuralMismatch };

inline const char* to_string(PrefactorFlag f) {
    switch (f) {
        case PrefactorFlag::Agree: return "agree";
        case PrefactorFlag::BothZero: return "both-zero";
        case PrefactorFlag::ConstantMismatch: return "constant-mismatch";
        default: return "structural-mismatch";
    }
}

struct PrefactorFinding {
    int t = 0;
    int d = 0;
    double m = 0.0;
    Channel channel;
    Cplx normative;  // f-sum kernel entry (the ground truth)
    Cplx published;  // the printed gamma_ab * P_k^{(1,-t)} expression, read literally
    Cplx ratio;      // published / normative when both are nonzero
    PrefactorFlag flag = PrefactorFlag::Agree;
};

namespace detail {

/// The printed closed form read literally, with the prefactor
/// k! (mu_s + (1 - (a^b))/2) / (2)_k taken as a scalar product:
///   gamma_ab * P_k^{(1,-t)}(1 + 2 (m/n)^2),
///   k  = mu_+ - (a^b + 1)/2,  mu_s = mu_+ for ab = 0, mu_- for ab = 1,
///   gamma_ab = -(i^(a^b)) n^t (m/n)^(2+a^b) * k! (mu_s + (1-(a^b))/2) / (2)_k
/// Returns the real part (the i^(a^b) phase is applied by the caller).
inline BigFloat published_channel_value(Channel ch, int d, int t,
                                        const pathsum::ScalarMass<BigFloat>& sm) {
    const int p = ch.parity();
    if (((t + d) % 2 + 2) % 2 != p) return BigFloat(0);  // stated parity rule
    // k = mu_+ - (p+1)/2 is an integer for parity-allowed channels
    const int k = (p == 0) ? (t + d) / 2 - 1 : (t + d - 1) / 2 - 1;
    if (k < 0) return BigFloat(0);
    const BigFloat mu_s = (ch.a * ch.b == 0) ? BigFloat(t + d - 1) / 2 : BigFloat(t - d - 1) / 2;
    const BigFloat slot_factor = mu_s + BigFloat(1 - p) / 2;
    // k! / (2)_k = k! / (k+1)! = 1 / (k+1)
    const BigFloat prefactor = slot_factor / BigFloat(k + 1);
    const BigFloat mn = sm.m / sm.n;
    const BigFloat gamma_real = -pow_t(sm.n, t) * pow_t(mn, 2 + p) * prefactor;
    const BigFloat x = BigFloat(1) + 2 * mn * mn;
    return gamma_real * jacobi_sum<BigFloat>(k, 1, -t, x);
}

}  // namespace detail

/// Evaluates the published gamma_ab * P_k expression per channel at (t, d)
/// and compares it with the normative f-sum value. A mismatching ratio is
/// probed at two nearby masses: if it moves, the mismatch is structural,
/// otherwise it is a constant factor.
inline std::vector<PrefactorFinding> reconcile_paper_prefactors(int t, int d, const Mass& mass) {
    if (t < 1 || std::abs(d) > t)
        throw std::domain_error("reconcile_paper_prefactors: need t >= 1 and |d| <= t");
    static constexpr Cplx kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

    auto real_pair = [&](Channel ch, double m) -> std::pair<double, double> {
        auto sm = pathsum::big_mass(m);
        double normative = static_cast<double>(pathsum::channel_fsum<BigFloat>(ch, d, t, sm));
        double published = static_cast<double>(detail::published_channel_value(ch, d, t, sm));
        return {normative, published};
    };

    std::vector<PrefactorFinding> findings;
    for (Channel ch : kChannels) {
        PrefactorFinding f;
        f.t = t;
        f.d = d;
        f.m = mass.m;
        f.channel = ch;
        auto [norm_r, pub_r] = real_pair(ch, mass.m);
        const Cplx phase = kIPow[ch.parity()];
        f.normative = phase * norm_r;
        f.published = phase * pub_r;

        const double scale = std::max({std::abs(norm_r), std::abs(pub_r), 1e-300});
        if (std::abs(norm_r) < 1e-14 * scale && std::abs(pub_r) < 1e-14 * scale) {
            f.flag = PrefactorFlag::BothZero;
        } else if (std::abs(norm_r) < 1e-14 * scale || std::abs(pub_r) < 1e-14 * scale) {
            f.flag = PrefactorFlag::StructuralMismatch;
        } else {
            double ratio = pub_r / norm_r;
            f.ratio = ratio;
            if (std::abs(ratio - 1.0) <= 1e-9) {
                f.flag = PrefactorFlag::Agree;
            } else {
                // same ratio at probe masses => pure constant mismatch
                bool constant = true;
                for (double probe : {0.9 * mass.m, 0.8 * mass.m}) {
                    auto [nr, pr] = real_pair(ch, probe);
                    if (std::abs(nr) < 1e-300 || std::abs(pr / nr - ratio) > 1e-9 * std::abs(ratio))
                        constant = false;
                }
                f.flag = constant ? PrefactorFlag::ConstantMismatch
                                  : PrefactorFlag::StructuralMismatch;
            }
        }
        findings.push_back(f);
    }
    return findings;
}

}  // namespace closedform
}  // namespace dqca
