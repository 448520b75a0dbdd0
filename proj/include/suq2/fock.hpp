#pragma once

// Spinor Hilbert-space bookkeeping: the (j, mu, n, up/down) basis, the
// (x, y) relabelling, and dense truncated indexing.

#include <complex>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "suq2/qnum.hpp"

namespace suq2 {

enum class Spin : int { up = 0, dn = 1 };

inline Spin other(Spin s) { return s == Spin::up ? Spin::dn : Spin::up; }

struct SpinKet {
    HalfInt j, mu, n;
    Spin spin = Spin::up;

    auto operator<=>(const SpinKet&) const = default;
};

// Validity of the label combination.  Up kets exist for |n| <= j+1/2, down
// kets need j >= 1/2 and |n| <= j-1/2; mu always ranges over -j..j.
inline bool valid_ket(const SpinKet& k) {
    if (k.j.twice < 0) return false;
    if (k.mu.abs() > k.j || (k.j - k.mu).twice % 2 != 0) return false;
    HalfInt bound = k.spin == Spin::up ? k.j + half_one : k.j - half_one;
    if (k.spin == Spin::dn && k.j.twice < 1) return false;
    return k.n.abs() <= bound && (bound - k.n).twice % 2 == 0;
}

struct XYKet {
    HalfInt j;
    int x = 0, y = 0;
    Spin spin = Spin::up;

    auto operator<=>(const XYKet&) const = default;
};

// x = mu + j;  y = n + j + 1/2 (up) or n + j - 1/2 (down).
inline XYKet to_xy(const SpinKet& k) {
    if (!valid_ket(k)) throw std::invalid_argument("to_xy: invalid ket labels");
    XYKet r;
    r.j = k.j;
    r.spin = k.spin;
    r.x = (k.mu + k.j).twice / 2;
    HalfInt y = k.spin == Spin::up ? k.n + k.j + half_one : k.n + k.j - half_one;
    r.y = y.twice / 2;
    return r;
}

inline SpinKet from_xy(const XYKet& v) {
    SpinKet k;
    k.j = v.j;
    k.spin = v.spin;
    k.mu = HalfInt::from_twice(2 * v.x) - v.j;
    k.n = v.spin == Spin::up ? HalfInt::from_twice(2 * v.y) - v.j - half_one
                             : HalfInt::from_twice(2 * v.y) - v.j + half_one;
    if (!valid_ket(k)) throw std::invalid_argument("from_xy: invalid ket labels");
    return k;
}

// ---------------------------------------------------------------------------
// Dense contiguous indexing of all valid kets with 2j <= max2j.  Ordering is
// (j asc, up before down, mu asc, n asc), and the offset inside a level is
// arithmetic, so lookups never hash.
class TruncatedSpace {
  public:
    explicit TruncatedSpace(int max2j) : max2j_(max2j) {
        if (max2j < 0) throw std::invalid_argument("TruncatedSpace: max2j must be >= 0");
        level_begin_.resize(max2j + 2);
        std::size_t acc = 0;
        for (int k = 0; k <= max2j; ++k) {
            level_begin_[k] = acc;
            acc += level_dimension(k);
        }
        level_begin_[max2j + 1] = acc;
        dim_ = acc;
    }

    static std::size_t level_dimension(int k) {
        return std::size_t(k + 1) * (k + 2) + std::size_t(k) * (k + 1);
    }

    int max2j() const { return max2j_; }
    std::size_t dimension() const { return dim_; }

    std::size_t level_begin(int k) const { return level_begin_[k]; }
    std::size_t level_end(int k) const { return level_begin_[k + 1]; }

    // Dense index of a valid ket, or nullopt when it falls outside the cut.
    std::optional<std::size_t> index_of(const SpinKet& ket) const {
        if (!valid_ket(ket)) return std::nullopt;
        int k = ket.j.twice;
        if (k > max2j_) return std::nullopt;
        std::size_t base = level_begin_[k];
        std::size_t row = std::size_t((ket.mu + ket.j).twice / 2);
        if (ket.spin == Spin::up) {
            std::size_t col = std::size_t((ket.n + ket.j + half_one).twice / 2);
            return base + row * std::size_t(k + 2) + col;
        }
        std::size_t up_block = std::size_t(k + 1) * (k + 2);
        std::size_t col = std::size_t((ket.n + ket.j - half_one).twice / 2);
        return base + up_block + row * std::size_t(k) + col;
    }

    SpinKet ket_at(std::size_t idx) const {
        if (idx >= dim_) throw std::out_of_range("TruncatedSpace::ket_at");
        int k = 0;
        while (level_begin_[k + 1] <= idx) ++k;
        std::size_t off = idx - level_begin_[k];
        HalfInt j = HalfInt::from_twice(k);
        SpinKet ket;
        ket.j = j;
        std::size_t up_block = std::size_t(k + 1) * (k + 2);
        if (off < up_block) {
            ket.spin = Spin::up;
            ket.mu = HalfInt(int(off / (k + 2))) - j;
            ket.n = HalfInt(int(off % (k + 2))) - j - half_one;
        } else {
            off -= up_block;
            ket.spin = Spin::dn;
            ket.mu = HalfInt(int(off / k)) - j;
            ket.n = HalfInt(int(off % k)) - j + half_one;
        }
        return ket;
    }

  private:
    int max2j_;
    std::size_t dim_ = 0;
    std::vector<std::size_t> level_begin_;
};

inline TruncatedSpace enumerate_basis(int max2j) { return TruncatedSpace(max2j); }

// ---------------------------------------------------------------------------
// Sparse amplitude vector over dense indices.
struct SparseVector {
    std::map<std::size_t, std::complex<double>> entries;

    void add(std::size_t idx, std::complex<double> amp) {
        if (amp == std::complex<double>(0.0)) return;
        entries[idx] += amp;
    }

    void prune(double eps = 1e-15) {
        for (auto it = entries.begin(); it != entries.end();) {
            if (std::abs(it->second) < eps)
                it = entries.erase(it);
            else
                ++it;
        }
    }

    double norm() const {
        double acc = 0;
        for (auto& [idx, amp] : entries) acc += std::norm(amp);
        return std::sqrt(acc);
    }
};

}  // namespace suq2
