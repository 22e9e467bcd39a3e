#include "kdual/exactlin.hpp"

#include <stdexcept>
#include <utility>

namespace kdual {

Rational make_rational(long num, long den)
{
        if (den == 0)
                throw std::domain_error("zero denominator");
        Rational q(num, den);
        q.canonicalize();
        return q;
}

Rational parse_rational(const std::string &text)
{
        Rational q;
        if (q.set_str(text, 10) != 0)
                throw std::invalid_argument("not a rational number: " + text);
        if (q.get_den() == 0)
                throw std::domain_error("zero denominator: " + text);
        q.canonicalize();
        return q;
}

std::string to_string(const Rational &q)
{
        return q.get_str();
}

QMatrix::QMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

QMatrix QMatrix::identity(std::size_t n)
{
        QMatrix m(n, n);
        for (std::size_t i = 0; i < n; i++)
                m(i, i) = 1;
        return m;
}

QMatrix QMatrix::from_rows(const std::vector<QVector> &rows, std::size_t cols)
{
        QMatrix m(rows.size(), cols);
        for (std::size_t r = 0; r < rows.size(); r++) {
                if (rows[r].size() != cols)
                        throw std::invalid_argument("row length mismatch");
                for (std::size_t c = 0; c < cols; c++)
                        m(r, c) = rows[r][c];
        }
        return m;
}

QVector QMatrix::row(std::size_t r) const
{
        return QVector(a_.begin() + r * cols_, a_.begin() + (r + 1) * cols_);
}

QVector QMatrix::column(std::size_t c) const
{
        QVector v(rows_);
        for (std::size_t r = 0; r < rows_; r++)
                v[r] = (*this)(r, c);
        return v;
}

QMatrix QMatrix::transpose() const
{
        QMatrix t(cols_, rows_);
        for (std::size_t r = 0; r < rows_; r++)
                for (std::size_t c = 0; c < cols_; c++)
                        t(c, r) = (*this)(r, c);
        return t;
}

QMatrix QMatrix::operator*(const QMatrix &o) const
{
        if (cols_ != o.rows_)
                throw std::invalid_argument("matrix product dimension mismatch");
        QMatrix p(rows_, o.cols_);
        for (std::size_t r = 0; r < rows_; r++)
                for (std::size_t k = 0; k < cols_; k++) {
                        const Rational &x = (*this)(r, k);
                        if (sgn(x) == 0)
                                continue;
                        for (std::size_t c = 0; c < o.cols_; c++)
                                if (sgn(o(k, c)) != 0)
                                        p(r, c) += x * o(k, c);
                }
        return p;
}

QVector QMatrix::operator*(const QVector &v) const
{
        if (cols_ != v.size())
                throw std::invalid_argument("matrix-vector dimension mismatch");
        QVector out(rows_);
        for (std::size_t r = 0; r < rows_; r++)
                for (std::size_t c = 0; c < cols_; c++)
                        if (sgn(v[c]) != 0 && sgn((*this)(r, c)) != 0)
                                out[r] += (*this)(r, c) * v[c];
        return out;
}

bool QMatrix::operator==(const QMatrix &o) const
{
        return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
}

bool QMatrix::is_zero() const
{
        for (const auto &x : a_)
                if (sgn(x) != 0)
                        return false;
        return true;
}

Echelon rref(const QMatrix &a)
{
        QMatrix m = a;
        std::vector<std::size_t> pivots;
        std::size_t r = 0;
        for (std::size_t c = 0; c < m.cols() && r < m.rows(); c++) {
                std::size_t p = r;
                while (p < m.rows() && sgn(m(p, c)) == 0)
                        p++;
                if (p == m.rows())
                        continue;
                if (p != r)
                        for (std::size_t k = 0; k < m.cols(); k++)
                                std::swap(m(p, k), m(r, k));
                Rational inv = 1 / m(r, c);
                for (std::size_t k = c; k < m.cols(); k++)
                        m(r, k) *= inv;
                for (std::size_t i = 0; i < m.rows(); i++) {
                        if (i == r || sgn(m(i, c)) == 0)
                                continue;
                        Rational f = m(i, c);
                        for (std::size_t k = c; k < m.cols(); k++)
                                if (sgn(m(r, k)) != 0)
                                        m(i, k) -= f * m(r, k);
                }
                pivots.push_back(c);
                r++;
        }
        QMatrix reduced(r, m.cols());
        for (std::size_t i = 0; i < r; i++)
                for (std::size_t k = 0; k < m.cols(); k++)
                        reduced(i, k) = m(i, k);
        return {reduced, pivots};
}

/*
 * Bareiss elimination on integer rows.  Each row of the input is first
 * multiplied by the lcm of its denominators, so every intermediate value
 * is an exact integer and divisions are exact.
 */
std::size_t rank(const QMatrix &a)
{
        std::size_t rows = a.rows(), cols = a.cols();
        if (rows == 0 || cols == 0)
                return 0;
        std::vector<std::vector<Integer>> m(rows, std::vector<Integer>(cols));
        for (std::size_t r = 0; r < rows; r++) {
                Integer l = 1;
                for (std::size_t c = 0; c < cols; c++)
                        if (sgn(a(r, c)) != 0)
                                mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), a(r, c).get_den_mpz_t());
                for (std::size_t c = 0; c < cols; c++)
                        if (sgn(a(r, c)) != 0)
                                m[r][c] = a(r, c).get_num() * (l / a(r, c).get_den());
        }
        Integer prev = 1;
        std::size_t rk = 0;
        for (std::size_t c = 0; c < cols && rk < rows; c++) {
                std::size_t p = rk;
                while (p < rows && sgn(m[p][c]) == 0)
                        p++;
                if (p == rows)
                        continue;
                std::swap(m[p], m[rk]);
                for (std::size_t i = rk + 1; i < rows; i++) {
                        for (std::size_t k = c + 1; k < cols; k++) {
                                m[i][k] = m[rk][c] * m[i][k] - m[i][c] * m[rk][k];
                                mpz_divexact(m[i][k].get_mpz_t(), m[i][k].get_mpz_t(), prev.get_mpz_t());
                        }
                        m[i][c] = 0;
                }
                prev = m[rk][c];
                rk++;
        }
        return rk;
}

QMatrix kernel_basis(const QMatrix &a)
{
        Echelon e = rref(a);
        std::vector<bool> is_pivot(a.cols(), false);
        for (auto p : e.pivots)
                is_pivot[p] = true;
        std::vector<std::size_t> free_cols;
        for (std::size_t c = 0; c < a.cols(); c++)
                if (!is_pivot[c])
                        free_cols.push_back(c);
        QMatrix k(a.cols(), free_cols.size());
        for (std::size_t j = 0; j < free_cols.size(); j++) {
                std::size_t f = free_cols[j];
                k(f, j) = 1;
                for (std::size_t i = 0; i < e.pivots.size(); i++)
                        k(e.pivots[i], j) = -e.reduced(i, f);
        }
        return k;
}

QVector primitive_integer(const QVector &v)
{
        Integer l = 1, g = 0;
        for (const auto &x : v)
                if (sgn(x) != 0)
                        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
        QVector out(v.size());
        for (std::size_t i = 0; i < v.size(); i++) {
                out[i] = v[i] * l;
                if (sgn(out[i]) != 0)
                        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), out[i].get_num_mpz_t());
        }
        if (g != 0 && g != 1)
                for (auto &x : out)
                        x /= Rational(g);
        return out;
}

QMatrix canonical_subspace_basis(const QMatrix &rows)
{
        Echelon e = rref(rows);
        QMatrix out(e.reduced.rows(), rows.cols());
        for (std::size_t r = 0; r < e.reduced.rows(); r++) {
                QVector p = primitive_integer(e.reduced.row(r));
                for (std::size_t c = 0; c < rows.cols(); c++)
                        out(r, c) = p[c];
        }
        return out;
}

QMatrix canonical_subspace_basis(const std::vector<QVector> &vectors, std::size_t ambient)
{
        return canonical_subspace_basis(QMatrix::from_rows(vectors, ambient));
}

std::optional<QVector> solve(const QMatrix &a, const QVector &b)
{
        if (b.size() != a.rows())
                throw std::invalid_argument("solve: dimension mismatch");
        QMatrix aug(a.rows(), a.cols() + 1);
        for (std::size_t r = 0; r < a.rows(); r++) {
                for (std::size_t c = 0; c < a.cols(); c++)
                        aug(r, c) = a(r, c);
                aug(r, a.cols()) = b[r];
        }
        Echelon e = rref(aug);
        QVector x(a.cols());
        for (std::size_t i = 0; i < e.pivots.size(); i++) {
                if (e.pivots[i] == a.cols())
                        return std::nullopt;
                x[e.pivots[i]] = e.reduced(i, a.cols());
        }
        return x;
}

std::optional<QMatrix> inverse(const QMatrix &a)
{
        if (a.rows() != a.cols())
                throw std::invalid_argument("inverse: not square");
        std::size_t n = a.rows();
        QMatrix aug(n, 2 * n);
        for (std::size_t r = 0; r < n; r++) {
                for (std::size_t c = 0; c < n; c++)
                        aug(r, c) = a(r, c);
                aug(r, n + r) = 1;
        }
        Echelon e = rref(aug);
        if (e.pivots.size() < n || (n > 0 && e.pivots[n - 1] != n - 1))
                return std::nullopt;
        QMatrix inv(n, n);
        for (std::size_t r = 0; r < n; r++)
                for (std::size_t c = 0; c < n; c++)
                        inv(r, c) = e.reduced(r, n + c);
        return inv;
}

Rational determinant(const QMatrix &a)
{
        if (a.rows() != a.cols())
                throw std::invalid_argument("determinant: not square");
        QMatrix m = a;
        std::size_t n = m.rows();
        Rational det = 1;
        for (std::size_t c = 0; c < n; c++) {
                std::size_t p = c;
                while (p < n && sgn(m(p, c)) == 0)
                        p++;
                if (p == n)
                        return 0;
                if (p != c) {
                        for (std::size_t k = 0; k < n; k++)
                                std::swap(m(p, k), m(c, k));
                        det = -det;
                }
                det *= m(c, c);
                for (std::size_t i = c + 1; i < n; i++) {
                        if (sgn(m(i, c)) == 0)
                                continue;
                        Rational f = m(i, c) / m(c, c);
                        for (std::size_t k = c; k < n; k++)
                                m(i, k) -= f * m(c, k);
                }
        }
        return det;
}

Rational dot(const QVector &a, const QVector &b)
{
        if (a.size() != b.size())
                throw std::invalid_argument("dot: length mismatch");
        Rational s = 0;
        for (std::size_t i = 0; i < a.size(); i++)
                s += a[i] * b[i];
        return s;
}

bool is_zero(const QVector &v)
{
        for (const auto &x : v)
                if (sgn(x) != 0)
                        return false;
        return true;
}

} // namespace kdual
