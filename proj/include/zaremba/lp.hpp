#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "zaremba/errors.hpp"

namespace zaremba::detail {

struct LpResult {
    double value = 0;
    std::vector<double> x;
    std::size_t iterations = 0;
};

/// Dense tableau simplex for  max c.x  s.t.  A x <= b,  x >= 0  with b >= 0
/// (the all-slack basis is feasible). Dantzig pricing with lowest-index tie
/// breaks; switches to Bland's rule after a stall to stay finite. Throws
/// CapacityError("unbounded") when a column has no positive entry.
///
/// Rows are scaled to unit max once up front; the returned solution is exact
/// at the final vertex up to floating-point rounding.
class Simplex {
  public:
    Simplex(std::vector<std::vector<double>> A, std::vector<double> b, std::vector<double> c)
        : m_(A.size()), n_(c.size()) {
        if (b.size() != m_) throw CapacityError("simplex: row count mismatch");
        width_ = n_ + m_ + 1;
        t_.assign((m_ + 1) * width_, 0.0);
        basis_.resize(m_);
        for (std::size_t i = 0; i < m_; ++i) {
            if (A[i].size() != n_) throw CapacityError("simplex: column count mismatch");
            if (b[i] < 0) throw CapacityError("simplex: needs b >= 0");
            double sc = 1e-300;
            for (double v : A[i]) sc = std::max(sc, std::abs(v));
            sc = 1.0 / sc;
            double* row = t(i + 1);
            for (std::size_t j = 0; j < n_; ++j) row[j] = A[i][j] * sc;
            row[n_ + i] = 1.0;
            row[width_ - 1] = b[i] * sc;
            basis_[i] = n_ + i;
        }
        double* obj = t(0);
        for (std::size_t j = 0; j < n_; ++j) obj[j] = -c[j];
    }

    LpResult solve(std::size_t max_iter = 0) {
        if (max_iter == 0) max_iter = 200 * (m_ + n_) + 20000;
        const double eps_cost = 1e-11, eps_piv = 1e-11;
        std::size_t it = 0;
        std::size_t stall = 0;
        double last_obj = obj_value();
        bool bland = false;
        for (; it < max_iter; ++it) {
            // entering column
            std::size_t q = width_;
            const double* obj = t(0);
            if (!bland) {
                double best = -eps_cost;
                for (std::size_t j = 0; j + 1 < width_; ++j)
                    if (obj[j] < best) { best = obj[j]; q = j; }
            } else {
                for (std::size_t j = 0; j + 1 < width_; ++j)
                    if (obj[j] < -eps_cost) { q = j; break; }
            }
            if (q == width_) break;  // optimal

            // ratio test
            std::size_t r = 0;
            double best_ratio = std::numeric_limits<double>::infinity();
            bool found = false;
            for (std::size_t i = 1; i <= m_; ++i) {
                double a = t(i)[q];
                if (a > eps_piv) {
                    double ratio = t(i)[width_ - 1] / a;
                    if (!found || ratio < best_ratio - 1e-14 ||
                        (ratio < best_ratio + 1e-14 && basis_[i - 1] < basis_[r - 1])) {
                        best_ratio = ratio;
                        r = i;
                        found = true;
                    }
                }
            }
            if (!found) throw CapacityError("simplex: unbounded (constraint set too sparse)");

            pivot(r, q);

            double now = obj_value();
            if (now <= last_obj + 1e-13) {
                if (++stall > 64) bland = true;
            } else {
                stall = 0;
                bland = false;
            }
            last_obj = now;
        }
        if (it >= max_iter) throw CapacityError("simplex: iteration limit reached");

        LpResult res;
        res.x.assign(n_, 0.0);
        for (std::size_t i = 0; i < m_; ++i)
            if (basis_[i] < n_) res.x[basis_[i]] = t(i + 1)[width_ - 1];
        res.value = obj_value();
        res.iterations = it;
        return res;
    }

  private:
    double* t(std::size_t i) { return t_.data() + i * width_; }
    const double* t(std::size_t i) const { return t_.data() + i * width_; }
    double obj_value() const { return t(0)[width_ - 1]; }

    void pivot(std::size_t r, std::size_t q) {
        double* prow = t(r);
        double inv = 1.0 / prow[q];
        for (std::size_t j = 0; j < width_; ++j) prow[j] *= inv;
        prow[q] = 1.0;
        for (std::size_t i = 0; i <= m_; ++i) {
            if (i == r) continue;
            double* row = t(i);
            double f = row[q];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < width_; ++j) row[j] -= f * prow[j];
            row[q] = 0.0;
        }
        basis_[r - 1] = q;
    }

    std::size_t m_, n_, width_ = 0;
    std::vector<double> t_;
    std::vector<std::size_t> basis_;
};

inline LpResult lp_max(std::vector<std::vector<double>> A, std::vector<double> b,
                       std::vector<double> c, std::size_t max_iter = 0) {
    Simplex s(std::move(A), std::move(b), std::move(c));
    return s.solve(max_iter);
}

}  // namespace zaremba::detail
