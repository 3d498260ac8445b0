#include "hsf/lp.hpp"

namespace hsf {

namespace {

// Dictionary simplex over the nonbasic columns only, with an auxiliary column
// for phase one. Bland's rule both ways, so no cycling.
class Tableau {
public:
    explicit Tableau(const LpProblem& p)
        : m_(static_cast<int>(p.b.size())), n_(p.num_vars), B_(m_), N_(n_ + 1),
          D_(m_ + 2, std::vector<Rational>(n_ + 2)) {
        for (int i = 0; i < m_; ++i)
            for (int j = 0; j < n_; ++j) D_[i][j] = p.A[i][j];
        for (int i = 0; i < m_; ++i) {
            B_[i] = n_ + i;
            D_[i][n_] = -1;
            D_[i][n_ + 1] = p.b[i];
        }
        for (int j = 0; j < n_; ++j) {
            N_[j] = j;
            D_[m_][j] = -p.c[j];
        }
        N_[n_] = -1;
        D_[m_ + 1][n_] = 1;
    }

    LpResult solve() {
        LpResult res;
        int r = 0;
        for (int i = 1; i < m_; ++i)
            if (D_[i][n_ + 1] < D_[r][n_ + 1]) r = i;
        if (m_ > 0 && D_[r][n_ + 1] < 0) {
            pivot(r, n_);
            if (!run(2) || D_[m_ + 1][n_ + 1] < 0) {
                res.status = LpStatus::infeasible;
                res.pivots = pivots_;
                return res;
            }
            for (int i = 0; i < m_; ++i) {
                if (B_[i] != -1) continue;
                int s = -1;
                for (int j = 0; j <= n_; ++j)
                    if (D_[i][j] != 0 && (s == -1 || N_[j] < N_[s])) s = j;
                if (s != -1) pivot(i, s);
            }
        }
        bool bounded = run(1);
        res.pivots = pivots_;
        if (!bounded) {
            res.status = LpStatus::unbounded;
            return res;
        }
        res.status = LpStatus::optimal;
        res.x.assign(n_, Rational(0));
        for (int i = 0; i < m_; ++i)
            if (B_[i] >= 0 && B_[i] < n_) res.x[B_[i]] = D_[i][n_ + 1];
        res.value = D_[m_][n_ + 1];
        return res;
    }

private:
    void pivot(int r, int s) {
        ++pivots_;
        Rational inv = 1 / D_[r][s];
        const auto& row = D_[r];
        Rational f;
        for (int i = 0; i < m_ + 2; ++i) {
            if (i == r || D_[i][s] == 0) continue;
            auto& b = D_[i];
            f = b[s] * inv;
            for (int j = 0; j < n_ + 2; ++j)
                if (row[j] != 0) b[j] -= row[j] * f;
            b[s] = row[s] * f;
        }
        for (int j = 0; j < n_ + 2; ++j)
            if (j != s) D_[r][j] *= inv;
        for (int i = 0; i < m_ + 2; ++i)
            if (i != r) D_[i][s] *= -inv;
        D_[r][s] = inv;
        std::swap(B_[r], N_[s]);
    }

    bool run(int phase) {
        int x = m_ + phase - 1;
        for (;;) {
            int s = -1;
            for (int j = 0; j <= n_; ++j) {
                if (N_[j] == -phase) continue;
                if (D_[x][j] < 0 && (s == -1 || N_[j] < N_[s])) s = j;
            }
            if (s == -1) return true;
            int r = -1;
            Rational best, ratio;
            for (int i = 0; i < m_; ++i) {
                if (D_[i][s] <= 0) continue;
                ratio = D_[i][n_ + 1] / D_[i][s];
                if (r == -1 || ratio < best || (ratio == best && B_[i] < B_[r])) {
                    r = i;
                    best = ratio;
                }
            }
            if (r == -1) return false;
            pivot(r, s);
        }
    }

    int m_, n_;
    std::vector<int> B_, N_;
    std::vector<std::vector<Rational>> D_;
    long pivots_ = 0;
};

}  // namespace

LpResult solve_exact(const LpProblem& p) {
    if (static_cast<int>(p.c.size()) != p.num_vars || p.A.size() != p.b.size())
        throw DomainError("solve_exact: inconsistent problem dimensions");
    for (const auto& row : p.A)
        if (static_cast<int>(row.size()) != p.num_vars) throw DomainError("solve_exact: ragged constraint matrix");
    Tableau t(p);
    return t.solve();
}

}  // namespace hsf
