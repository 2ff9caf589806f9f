#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "core.hpp"
#include "pathsum.hpp"

namespace dqca {
namespace oracle {

// ---------------------------------------------------------------------------
// Path strings
// ---------------------------------------------------------------------------

enum class Step : std::uint8_t { R = 0, L = 1, F = 2 };

/// A t-step transition word. Stored in application order (h_1 first); the
/// conventional written form h_t ... h_1 puts the latest step first.
struct PathString {
    std::vector<Step> steps;  // steps[i] = h_{i+1}

    int length() const { return static_cast<int>(steps.size()); }

    static PathString from_written(std::string_view written) {
        PathString p;
        p.steps.reserve(written.size());
        for (auto it = written.rbegin(); it != written.rend(); ++it) {
            switch (*it) {
                case 'R': p.steps.push_back(Step::R); break;
                case 'L': p.steps.push_back(Step::L); break;
                case 'F': p.steps.push_back(Step::F); break;
                default: throw std::domain_error("PathString: letters must be R, L or F");
            }
        }
        return p;
    }

    std::string written() const {
        std::string s;
        s.reserve(steps.size());
        for (auto it = steps.rbegin(); it != steps.rend(); ++it)
            s.push_back("RLF"[static_cast<int>(*it)]);
        return s;
    }

    PathTally tally() const {
        PathTally t;
        t.t = length();
        for (Step s : steps) {
            if (s == Step::R) ++t.r;
            else if (s == Step::L) ++t.l;
            else ++t.f;
        }
        t.d = t.r - t.l;
        return t;
    }

    /// Word number `index` of length t in the fixed enumeration order:
    /// base-3 counter with h_1 as the least significant digit
    /// (digit 0 = R, 1 = L, 2 = F).
    static PathString from_index(std::uint64_t index, int t) {
        PathString p;
        p.steps.resize(static_cast<std::size_t>(t));
        for (int i = 0; i < t; ++i) {
            p.steps[static_cast<std::size_t>(i)] = static_cast<Step>(index % 3);
            index /= 3;
        }
        return p;
    }
};

/// Ordered product A_{h_t} ... A_{h_1} of the word's transition matrices.
inline Mat2 product(const PathString& path, const Mass& mass) {
    const Mat2 gen[3] = {a_right(mass), a_left(mass), a_flip(mass)};
    Mat2 acc = Mat2::identity();
    for (Step s : path.steps) acc = gen[static_cast<int>(s)] * acc;  // apply h_1 first
    return acc;
}

// ---------------------------------------------------------------------------
// Exact symbolic products
// ---------------------------------------------------------------------------

/// Matrix entry of a word product in exact form: i^phase * m^mdeg * n^ndeg,
/// or zero. Products of the generators never produce sums within an entry,
/// so this closed form is exact for every word.
struct Mono {
    std::int8_t phase = -1;  // power of i in 0..3; -1 encodes zero
    std::int16_t mdeg = 0;
    std::int16_t ndeg = 0;

    bool is_zero() const { return phase < 0; }
    bool operator==(const Mono&) const = default;
};

struct MonoMat {
    std::array<Mono, 4> e{};

    Mono& operator()(int row, int col) { return e[static_cast<std::size_t>(2 * row + col)]; }
    const Mono& operator()(int row, int col) const {
        return e[static_cast<std::size_t>(2 * row + col)];
    }

    bool is_zero() const {
        for (const auto& m : e)
            if (!m.is_zero()) return false;
        return true;
    }

    static MonoMat identity() {
        MonoMat r;
        r(0, 0) = Mono{0, 0, 0};
        r(1, 1) = Mono{0, 0, 0};
        return r;
    }
};

/// Exact product of a word; left-multiplies one generator at a time.
inline MonoMat product_exact(const PathString& path) {
    MonoMat acc = MonoMat::identity();
    for (Step s : path.steps) {
        MonoMat next;
        switch (s) {
            case Step::R:  // row 0 scaled by n, row 1 annihilated
                for (int c = 0; c < 2; ++c) {
                    Mono m = acc(0, c);
                    if (!m.is_zero()) ++m.ndeg;
                    next(0, c) = m;
                }
                break;
            case Step::L:
                for (int c = 0; c < 2; ++c) {
                    Mono m = acc(1, c);
                    if (!m.is_zero()) ++m.ndeg;
                    next(1, c) = m;
                }
                break;
            case Step::F:  // rows exchanged, each entry times i*m
                for (int r = 0; r < 2; ++r)
                    for (int c = 0; c < 2; ++c) {
                        Mono m = acc(1 - r, c);
                        if (!m.is_zero()) {
                            m.phase = static_cast<std::int8_t>((m.phase + 1) & 3);
                            ++m.mdeg;
                        }
                        next(r, c) = m;
                    }
                break;
        }
        acc = next;
    }
    return acc;
}

inline Cplx mono_value(const Mono& m, const Mass& mass) {
    if (m.is_zero()) return {};
    static constexpr Cplx kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    double v = 1.0;
    for (int i = 0; i < m.mdeg; ++i) v *= mass.m;
    for (int i = 0; i < m.ndeg; ++i) v *= mass.n;
    return kIPow[m.phase] * v;
}

// ---------------------------------------------------------------------------
// Word structure
// ---------------------------------------------------------------------------

/// Literal forbidden-substring test: true iff the written word contains
/// RL, LR, RFR or LFL as a contiguous subword. Any such word has zero
/// amplitude; the converse fails from t = 4 on (e.g. RFFL, where the two
/// flips cancel into a scalar and leave an effective RL).
inline bool is_forbidden(const PathString& path) {
    const auto& st = path.steps;
    const int t = path.length();
    // adjacent application-order pairs (earlier, later): RL/LR either way
    for (int i = 0; i + 1 < t; ++i) {
        bool a_shift = st[static_cast<std::size_t>(i)] != Step::F;
        bool b_shift = st[static_cast<std::size_t>(i + 1)] != Step::F;
        if (a_shift && b_shift && st[static_cast<std::size_t>(i)] != st[static_cast<std::size_t>(i + 1)])
            return true;
    }
    for (int i = 0; i + 2 < t; ++i) {
        Step a = st[static_cast<std::size_t>(i)];
        Step b = st[static_cast<std::size_t>(i + 1)];
        Step c = st[static_cast<std::size_t>(i + 2)];
        if (b == Step::F && a == c && a != Step::F) return true;
    }
    return false;
}

/// Exact zero test from the slot structure: split the written word at the
/// flips into slots, count slots from the h_t end; the product is nonzero
/// iff every R sits in slots of one parity and every L in the other.
inline bool structurally_null(const PathString& path) {
    int slot_from_end = 1 + path.tally().f;  // slot index of h_1's slot, counted from h_t
    // walk in application order, tracking written slot parity
    int slot = slot_from_end;
    int r_parity = -1, l_parity = -1;
    for (Step s : path.steps) {
        if (s == Step::F) {
            --slot;
            continue;
        }
        int par = slot & 1;
        int& have = (s == Step::R) ? r_parity : l_parity;
        if (have == -1) have = par;
        else if (have != par) return true;
    }
    return r_parity != -1 && r_parity == l_parity;
}

enum class PathClass { OmegaR, OmegaL, AllFlips, Null };

inline const char* to_string(PathClass c) {
    switch (c) {
        case PathClass::OmegaR: return "OmegaR";
        case PathClass::OmegaL: return "OmegaL";
        case PathClass::AllFlips: return "AllFlips";
        default: return "Null";
    }
}

/// Surviving words fall into OmegaR (R's in the odd slots of the written
/// form) or OmegaL (L's there); all-flip words are their own class.
inline PathClass classify(const PathString& path) {
    if (structurally_null(path)) return PathClass::Null;
    PathTally tl = path.tally();
    if (tl.f == tl.t) return PathClass::AllFlips;
    int slot = 1 + tl.f;
    for (Step s : path.steps) {
        if (s == Step::F) {
            --slot;
            continue;
        }
        bool odd = (slot & 1) != 0;
        return ((s == Step::R) == odd) ? PathClass::OmegaR : PathClass::OmegaL;
    }
    return PathClass::Null;  // unreachable
}

// ---------------------------------------------------------------------------
// Exhaustive kernels and checks
// ---------------------------------------------------------------------------

inline constexpr int kMaxBruteTime = 16;

inline std::uint64_t pow3(int t) {
    std::uint64_t v = 1;
    for (int i = 0; i < t; ++i) v *= 3;
    return v;
}

inline void check_brute_guard(int t) {
    if (t < 0) throw std::domain_error("brute force: negative time");
    if (t > kMaxBruteTime)
        throw resource_error("brute force enumeration limited to t <= 16 (3^t words)");
}

/// Ground-truth kernel: sums the matrix product of every one of the 3^t
/// words into its displacement bucket, in the fixed enumeration order.
inline pathsum::PropagatorKernel kernel_bruteforce(int t, const Mass& mass) {
    check_brute_guard(t);
    pathsum::PropagatorKernel out(t);
    const std::uint64_t total = pow3(t);
    for (std::uint64_t w = 0; w < total; ++w) {
        PathString path = PathString::from_index(w, t);
        PathTally tl = path.tally();
        out.at(tl.d) += product(path, mass);
    }
    return out;
}

/// Per-channel counts of words with nonzero amplitude, by displacement and
/// flip count. counts[d + t][f][channel index in kChannels order].
struct ChannelCounts {
    int t = 0;
    std::vector<std::vector<std::array<std::uint64_t, 4>>> data;  // [d + t][f][ch]

    std::uint64_t count(int d, int f, int ch_index) const {
        return data[static_cast<std::size_t>(d + t)][static_cast<std::size_t>(f)]
                   [static_cast<std::size_t>(ch_index)];
    }
};

inline ChannelCounts channel_counts(int t) {
    check_brute_guard(t);
    ChannelCounts cc;
    cc.t = t;
    cc.data.assign(static_cast<std::size_t>(2 * t + 1),
                   std::vector<std::array<std::uint64_t, 4>>(static_cast<std::size_t>(t + 1),
                                                             {0, 0, 0, 0}));
    const std::uint64_t total = pow3(t);
    for (std::uint64_t w = 0; w < total; ++w) {
        PathString path = PathString::from_index(w, t);
        PathTally tl = path.tally();
        MonoMat p = product_exact(path);
        for (int i = 0; i < 4; ++i) {
            Channel ch = kChannels[i];
            if (!p(ch.b, ch.a).is_zero())
                ++cc.data[static_cast<std::size_t>(tl.d + t)][static_cast<std::size_t>(tl.f)]
                         [static_cast<std::size_t>(i)];
        }
    }
    return cc;
}

/// Exhaustive validation of the path-structure laws at time t.
///
/// Checked for every word:
///  - forbidden substring implies zero amplitude            (holds)
///  - zero amplitude implies forbidden substring            (fails from t = 4:
///    an even run of flips acts as a scalar, so e.g. RFFL is null without
///    containing any of the four literal substrings; gaps are reported)
///  - zero amplitude iff the slot-parity structure is violated (holds)
///  - every nonzero product is exactly (i m)^f n^(t-f) times the matrix
///    unit(s) selected by the word's class and flip parity    (holds)
struct StructureReport {
    int t = 0;
    std::uint64_t words = 0;
    std::uint64_t forbidden_necessity_violations = 0;  // forbidden but nonzero
    std::uint64_t forbidden_converse_gaps = 0;         // zero but not literally forbidden
    std::uint64_t structural_law_violations = 0;       // zero test vs slot rule
    std::uint64_t channel_law_violations = 0;
    std::vector<std::string> first_converse_gaps;      // up to 4 written words
    std::vector<std::string> first_violations;         // up to 4 written words

    /// Violations of the laws that actually hold (the converse gaps are a
    /// documented property of the literal substring test, not a defect of
    /// the implementation).
    std::uint64_t hard_violations() const {
        return forbidden_necessity_violations + structural_law_violations +
               channel_law_violations;
    }
};

inline StructureReport structure_check(int t) {
    check_brute_guard(t);
    StructureReport rep;
    rep.t = t;
    rep.words = pow3(t);
    for (std::uint64_t w = 0; w < rep.words; ++w) {
        PathString path = PathString::from_index(w, t);
        PathTally tl = path.tally();
        MonoMat p = product_exact(path);
        const bool zero = p.is_zero();
        const bool forbidden = is_forbidden(path);
        const bool structural = structurally_null(path);

        if (forbidden && !zero) {
            ++rep.forbidden_necessity_violations;
            if (rep.first_violations.size() < 4) rep.first_violations.push_back(path.written());
        }
        if (zero && !forbidden) {
            ++rep.forbidden_converse_gaps;
            if (rep.first_converse_gaps.size() < 4)
                rep.first_converse_gaps.push_back(path.written());
        }
        if (zero != structural) {
            ++rep.structural_law_violations;
            if (rep.first_violations.size() < 4) rep.first_violations.push_back(path.written());
        }
        if (zero) continue;

        // channel law: expected nonzero positions and the exact monomial
        const Mono expect{static_cast<std::int8_t>(tl.f & 3), static_cast<std::int16_t>(tl.f),
                          static_cast<std::int16_t>(tl.t - tl.f)};
        PathClass cls = classify(path);
        bool ok = true;
        std::array<bool, 4> want{};  // indexed like kChannels
        if (cls == PathClass::AllFlips) {
            want = (tl.f % 2 == 0) ? std::array<bool, 4>{true, true, false, false}
                                   : std::array<bool, 4>{false, false, true, true};
        } else if (cls == PathClass::OmegaR) {
            want[(tl.f % 2 == 0) ? 0 : 2] = true;  // channel 00 or 10
        } else if (cls == PathClass::OmegaL) {
            want[(tl.f % 2 == 0) ? 1 : 3] = true;  // channel 11 or 01
        } else {
            ok = false;  // classified Null but product nonzero
        }
        for (int i = 0; ok && i < 4; ++i) {
            Channel ch = kChannels[i];
            const Mono& got = p(ch.b, ch.a);
            ok = want[static_cast<std::size_t>(i)] ? (got == expect) : got.is_zero();
        }
        if (!ok) {
            ++rep.channel_law_violations;
            if (rep.first_violations.size() < 4) rep.first_violations.push_back(path.written());
        }
    }
    return rep;
}

}  // namespace oracle
}  // namespace dqca
