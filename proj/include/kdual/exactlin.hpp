#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace kdual {

using Integer = mpz_class;
using Rational = mpq_class;
using QVector = std::vector<Rational>;

Rational make_rational(long num, long den = 1);
Rational parse_rational(const std::string &text);
std::string to_string(const Rational &q);

/* Dense row-major matrix over Q. */
class QMatrix {
public:
        QMatrix() = default;
        QMatrix(std::size_t rows, std::size_t cols);
        static QMatrix identity(std::size_t n);
        static QMatrix from_rows(const std::vector<QVector> &rows, std::size_t cols);

        std::size_t rows() const { return rows_; }
        std::size_t cols() const { return cols_; }
        Rational &operator()(std::size_t r, std::size_t c) { return a_[r * cols_ + c]; }
        const Rational &operator()(std::size_t r, std::size_t c) const { return a_[r * cols_ + c]; }

        QVector row(std::size_t r) const;
        QVector column(std::size_t c) const;
        QMatrix transpose() const;
        QMatrix operator*(const QMatrix &o) const;
        QVector operator*(const QVector &v) const;
        bool operator==(const QMatrix &o) const;
        bool is_zero() const;

private:
        std::size_t rows_ = 0, cols_ = 0;
        std::vector<Rational> a_;
};

struct Echelon {
        QMatrix reduced;                 /* reduced row echelon form, zero rows dropped */
        std::vector<std::size_t> pivots; /* pivot column of each row */
};

Echelon rref(const QMatrix &a);
std::size_t rank(const QMatrix &a);

/* Columns form the canonical basis of {x : A x = 0}: one vector per free column. */
QMatrix kernel_basis(const QMatrix &a);

/* Rows: reduced echelon basis of the span, each row scaled to a primitive integer vector. */
QMatrix canonical_subspace_basis(const std::vector<QVector> &vectors, std::size_t ambient);
QMatrix canonical_subspace_basis(const QMatrix &rows);

/* Some x with A x = b (free variables zero), or nothing when inconsistent. */
std::optional<QVector> solve(const QMatrix &a, const QVector &b);
std::optional<QMatrix> inverse(const QMatrix &a);
Rational determinant(const QMatrix &a);

QVector primitive_integer(const QVector &v);
Rational dot(const QVector &a, const QVector &b);
bool is_zero(const QVector &v);

} // namespace kdual
