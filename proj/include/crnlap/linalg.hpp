#pragma once

// Dense elimination kernels shared by every module. Rationals are handled
// exactly (pivot = first nonzero); doubles use partial pivoting with an
// absolute threshold.

#include <algorithm>
#include <cmath>
#include <vector>

#include "crnlap/error.hpp"
#include "crnlap/scalar.hpp"

namespace crnlap::linalg {

template <class T>
double default_tolerance(const Matrix<T>& m)
{
    if constexpr (is_exact_v<T>) {
        return 0.0;
    } else {
        double size = static_cast<double>(std::max<Index>({Index(1), m.rows(), m.cols()}));
        return 1e-12 * size * max_abs(m);
    }
}

template <class T>
struct Echelon {
    Matrix<T> reduced;
    std::vector<Index> pivots; // pivot column of each nonzero row
};

template <class T>
Echelon<T> rref(Matrix<T> m, double tol)
{
    const Index rows = m.rows();
    const Index cols = m.cols();
    std::vector<Index> pivots;
    Index r = 0;
    for (Index c = 0; c < cols && r < rows; ++c) {
        Index pivot = -1;
        if constexpr (is_exact_v<T>) {
            for (Index i = r; i < rows; ++i)
                if (m(i, c) != 0) {
                    pivot = i;
                    break;
                }
        } else {
            double best = tol;
            for (Index i = r; i < rows; ++i)
                if (std::abs(m(i, c)) > best) {
                    best = std::abs(m(i, c));
                    pivot = i;
                }
        }
        if (pivot < 0) continue;
        if (pivot != r) m.row(pivot).swap(m.row(r));
        const T inv = T(1) / m(r, c);
        for (Index j = c; j < cols; ++j) m(r, j) *= inv;
        for (Index i = 0; i < rows; ++i) {
            if (i == r || is_zero(m(i, c))) continue;
            const T factor = m(i, c);
            for (Index j = c; j < cols; ++j) m(i, j) -= factor * m(r, j);
            if constexpr (!is_exact_v<T>) m(i, c) = 0.0;
        }
        pivots.push_back(c);
        ++r;
    }
    return {std::move(m), std::move(pivots)};
}

template <class T>
Echelon<T> rref(const Matrix<T>& m)
{
    return rref(m, default_tolerance(m));
}

template <class T>
Index rank(const Matrix<T>& m)
{
    return static_cast<Index>(rref(m).pivots.size());
}

/// Columns form a basis of ker(m).
template <class T>
Matrix<T> nullspace(const Matrix<T>& m)
{
    const auto ech = rref(m);
    const Index cols = m.cols();
    std::vector<bool> is_pivot(static_cast<std::size_t>(cols), false);
    for (Index p : ech.pivots) is_pivot[static_cast<std::size_t>(p)] = true;

    Matrix<T> basis = Matrix<T>::Zero(cols, cols - static_cast<Index>(ech.pivots.size()));
    Index k = 0;
    for (Index free = 0; free < cols; ++free) {
        if (is_pivot[static_cast<std::size_t>(free)]) continue;
        basis(free, k) = T(1);
        for (std::size_t r = 0; r < ech.pivots.size(); ++r)
            basis(ech.pivots[r], k) = -ech.reduced(static_cast<Index>(r), free);
        ++k;
    }
    return basis;
}

/// The pivot columns of m: a basis of im(m) made of original columns.
template <class T>
Matrix<T> column_basis(const Matrix<T>& m)
{
    const auto ech = rref(m);
    Matrix<T> basis(m.rows(), static_cast<Index>(ech.pivots.size()));
    for (std::size_t k = 0; k < ech.pivots.size(); ++k)
        basis.col(static_cast<Index>(k)) = m.col(ech.pivots[k]);
    return basis;
}

template <class T>
T determinant(Matrix<T> m)
{
    if (m.rows() != m.cols())
        throw Error(Errc::invalid_argument, "determinant of a non-square matrix");
    const Index n = m.rows();
    const double tol = default_tolerance(m);
    T det(1);
    for (Index c = 0; c < n; ++c) {
        Index pivot = -1;
        if constexpr (is_exact_v<T>) {
            for (Index i = c; i < n; ++i)
                if (m(i, c) != 0) {
                    pivot = i;
                    break;
                }
        } else {
            double best = tol;
            for (Index i = c; i < n; ++i)
                if (std::abs(m(i, c)) > best) {
                    best = std::abs(m(i, c));
                    pivot = i;
                }
        }
        if (pivot < 0) return T(0);
        if (pivot != c) {
            m.row(pivot).swap(m.row(c));
            det = -det;
        }
        det *= m(c, c);
        for (Index i = c + 1; i < n; ++i) {
            if (is_zero(m(i, c))) continue;
            const T factor = m(i, c) / m(c, c);
            for (Index j = c; j < n; ++j) m(i, j) -= factor * m(c, j);
        }
    }
    return det;
}

template <class T>
Matrix<T> inverse(const Matrix<T>& m)
{
    if (m.rows() != m.cols())
        throw Error(Errc::invalid_argument, "inverse of a non-square matrix");
    const Index n = m.rows();
    Matrix<T> aug(n, 2 * n);
    aug << m, Matrix<T>::Identity(n, n);
    const auto ech = rref(aug, default_tolerance(m));
    if (static_cast<Index>(ech.pivots.size()) < n || (n > 0 && ech.pivots[n - 1] != n - 1))
        throw Error(Errc::invalid_argument, "matrix is singular");
    return ech.reduced.rightCols(n);
}

/// L with L * m = I for a matrix of full column rank.
template <class T>
Matrix<T> left_inverse(const Matrix<T>& m)
{
    Matrix<T> gram = m.transpose() * m;
    return inverse(gram) * m.transpose();
}

/// Decides whether A y = b has a solution with y >= 0 (phase-one simplex,
/// Bland's rule).
template <class T>
bool has_nonnegative_solution(const Matrix<T>& a, const Vector<T>& b, double tol = 0.0)
{
    const Index m = a.rows();
    const Index n = a.cols();
    if (b.size() != m) throw Error(Errc::shape_mismatch, "rhs length differs from row count");
    if (m == 0) return true;

    // Columns: y (n), artificials (m), rhs. Last row: reduced costs, -objective.
    Matrix<T> tab = Matrix<T>::Zero(m + 1, n + m + 1);
    std::vector<Index> basis(static_cast<std::size_t>(m));
    for (Index i = 0; i < m; ++i) {
        const bool flip = b(i) < T(0);
        for (Index j = 0; j < n; ++j) tab(i, j) = flip ? T(-a(i, j)) : a(i, j);
        tab(i, n + i) = T(1);
        tab(i, n + m) = flip ? T(-b(i)) : b(i);
        basis[static_cast<std::size_t>(i)] = n + i;
        for (Index j = 0; j < n; ++j) tab(m, j) -= tab(i, j);
        tab(m, n + m) -= tab(i, n + m);
    }

    const Index max_iterations = 50 * (n + m + 1);
    for (Index iter = 0; iter < max_iterations; ++iter) {
        Index entering = -1;
        for (Index j = 0; j < n + m; ++j) {
            bool negative;
            if constexpr (is_exact_v<T>)
                negative = tab(m, j) < T(0);
            else
                negative = tab(m, j) < -tol;
            if (negative) {
                entering = j;
                break;
            }
        }
        if (entering < 0) break;

        Index leaving = -1;
        T best_ratio(0);
        for (Index i = 0; i < m; ++i) {
            if (!(tab(i, entering) > T(0)) || is_zero(tab(i, entering), tol)) continue;
            T ratio = tab(i, n + m) / tab(i, entering);
            if (leaving < 0 || ratio < best_ratio ||
                (ratio == best_ratio &&
                 basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leaving)])) {
                leaving = i;
                best_ratio = ratio;
            }
        }
        if (leaving < 0) break; // unbounded direction; cannot happen in phase one

        const T inv = T(1) / tab(leaving, entering);
        tab.row(leaving) *= inv;
        for (Index i = 0; i <= m; ++i) {
            if (i == leaving || is_zero(tab(i, entering))) continue;
            const T factor = tab(i, entering);
            tab.row(i) -= factor * tab.row(leaving);
        }
        basis[static_cast<std::size_t>(leaving)] = entering;
    }
    const T objective = -tab(m, n + m);
    if constexpr (is_exact_v<T>)
        return objective == 0;
    else
        return objective <= tol * std::max(1.0, max_abs(b));
}

} // namespace crnlap::linalg
