#include "rackmsr/matrix.hpp"

#include <cstdio>

namespace rackmsr {

namespace {

void check_field(const Mat& A, const Mat& B) {
    if (!A.F || !B.F || !(A.F == B.F || A.F->compatible(*B.F)))
        throw Error(Errc::field_mismatch, "matrix operands use different fields");
}

void check_shape(bool ok, const char* what) {
    if (!ok) throw Error(Errc::shape_mismatch, what);
}

} // namespace

Mat zeros(const Field* F, size_t r, size_t c) { return Mat(F, r, c); }

Mat identity(const Field* F, size_t n) {
    Mat I(F, n, n);
    for (size_t i = 0; i < n; ++i) I.at(i, i) = F->one();
    return I;
}

Mat matmul(const Mat& A, const Mat& B) {
    check_field(A, B);
    check_shape(A.cols == B.rows, "matmul: inner dimensions differ");
    const Field& F = *A.F;
    Mat C(A.F, A.rows, B.cols);
    for (size_t i = 0; i < A.rows; ++i)
        for (size_t t = 0; t < A.cols; ++t) {
            Felt av = A.at(i, t);
            if (av.is_zero()) continue;
            for (size_t j = 0; j < B.cols; ++j) {
                Felt bv = B.at(t, j);
                if (!bv.is_zero()) C.at(i, j) = F.add(C.at(i, j), F.mul(av, bv));
            }
        }
    return C;
}

Mat add(const Mat& A, const Mat& B) {
    check_field(A, B);
    check_shape(A.rows == B.rows && A.cols == B.cols, "add: shapes differ");
    Mat C(A.F, A.rows, A.cols);
    for (size_t i = 0; i < A.a.size(); ++i) C.a[i] = A.F->add(A.a[i], B.a[i]);
    return C;
}

Mat sub(const Mat& A, const Mat& B) {
    check_field(A, B);
    check_shape(A.rows == B.rows && A.cols == B.cols, "sub: shapes differ");
    Mat C(A.F, A.rows, A.cols);
    for (size_t i = 0; i < A.a.size(); ++i) C.a[i] = A.F->sub(A.a[i], B.a[i]);
    return C;
}

Mat scale(Felt c, const Mat& A) {
    Mat C(A.F, A.rows, A.cols);
    for (size_t i = 0; i < A.a.size(); ++i) C.a[i] = A.F->mul(c, A.a[i]);
    return C;
}

Mat neg(const Mat& A) {
    Mat C(A.F, A.rows, A.cols);
    for (size_t i = 0; i < A.a.size(); ++i) C.a[i] = A.F->neg(A.a[i]);
    return C;
}

Mat transpose(const Mat& A) {
    Mat C(A.F, A.cols, A.rows);
    for (size_t i = 0; i < A.rows; ++i)
        for (size_t j = 0; j < A.cols; ++j) C.at(j, i) = A.at(i, j);
    return C;
}

Mat hconcat(const std::vector<Mat>& parts) {
    check_shape(!parts.empty(), "hconcat: empty list");
    size_t cols = 0;
    for (const Mat& P : parts) {
        check_field(parts[0], P);
        check_shape(P.rows == parts[0].rows, "hconcat: row counts differ");
        cols += P.cols;
    }
    Mat C(parts[0].F, parts[0].rows, cols);
    size_t off = 0;
    for (const Mat& P : parts) {
        for (size_t i = 0; i < P.rows; ++i)
            for (size_t j = 0; j < P.cols; ++j) C.at(i, off + j) = P.at(i, j);
        off += P.cols;
    }
    return C;
}

Mat vconcat(const std::vector<Mat>& parts) {
    check_shape(!parts.empty(), "vconcat: empty list");
    size_t rows = 0;
    for (const Mat& P : parts) {
        check_field(parts[0], P);
        check_shape(P.cols == parts[0].cols, "vconcat: column counts differ");
        rows += P.rows;
    }
    Mat C(parts[0].F, rows, parts[0].cols);
    size_t off = 0;
    for (const Mat& P : parts) {
        for (size_t i = 0; i < P.rows; ++i)
            for (size_t j = 0; j < P.cols; ++j) C.at(off + i, j) = P.at(i, j);
        off += P.rows;
    }
    return C;
}

Mat submatrix(const Mat& A, const std::vector<size_t>& row_set, const std::vector<size_t>& col_set) {
    Mat C(A.F, row_set.size(), col_set.size());
    for (size_t i = 0; i < row_set.size(); ++i) {
        check_shape(row_set[i] < A.rows, "submatrix: row index out of range");
        for (size_t j = 0; j < col_set.size(); ++j) {
            check_shape(col_set[j] < A.cols, "submatrix: column index out of range");
            C.at(i, j) = A.at(row_set[i], col_set[j]);
        }
    }
    return C;
}

Mat kron(const Mat& A, const Mat& B) {
    check_field(A, B);
    const Field& F = *A.F;
    Mat C(A.F, A.rows * B.rows, A.cols * B.cols);
    for (size_t i = 0; i < A.rows; ++i)
        for (size_t j = 0; j < A.cols; ++j) {
            Felt av = A.at(i, j);
            if (av.is_zero()) continue;
            for (size_t k = 0; k < B.rows; ++k)
                for (size_t t = 0; t < B.cols; ++t)
                    C.at(i * B.rows + k, j * B.cols + t) = F.mul(av, B.at(k, t));
        }
    return C;
}

Mat boxtimes(const Mat& A, const Mat& B, const BlockShape& s) {
    check_field(A, B);
    check_shape(s.block_rows * s.block_h == B.rows && s.block_cols * s.block_w == B.cols,
                "boxtimes: shape does not partition B");
    Mat C(A.F, s.block_rows * A.rows * s.block_h, s.block_cols * A.cols * s.block_w);
    for (size_t bi = 0; bi < s.block_rows; ++bi)
        for (size_t bj = 0; bj < s.block_cols; ++bj) {
            // kron(A, B_{bi,bj}) placed at block (bi, bj)
            for (size_t i = 0; i < A.rows; ++i)
                for (size_t j = 0; j < A.cols; ++j) {
                    Felt av = A.at(i, j);
                    if (av.is_zero()) continue;
                    for (size_t k = 0; k < s.block_h; ++k)
                        for (size_t t = 0; t < s.block_w; ++t)
                            C.at(bi * A.rows * s.block_h + i * s.block_h + k,
                                 bj * A.cols * s.block_w + j * s.block_w + t) =
                                A.F->mul(av, B.at(bi * s.block_h + k, bj * s.block_w + t));
                }
        }
    return C;
}

namespace {

// Forward elimination with first-nonzero pivoting.  Returns the pivot row per
// column (SIZE_MAX if none) and the number of row swaps.
struct Elim {
    Mat M;
    std::vector<size_t> pivot_col; // columns that got a pivot, in order
    size_t swaps = 0;
};

Elim eliminate(Mat M, size_t ncols) {
    const Field& F = *M.F;
    Elim e;
    size_t prow = 0;
    for (size_t col = 0; col < ncols && prow < M.rows; ++col) {
        size_t sel = SIZE_MAX;
        for (size_t i = prow; i < M.rows; ++i)
            if (!M.at(i, col).is_zero()) { sel = i; break; }
        if (sel == SIZE_MAX) continue;
        if (sel != prow) {
            for (size_t j = 0; j < M.cols; ++j) std::swap(M.at(sel, j), M.at(prow, j));
            ++e.swaps;
        }
        Felt pinv = F.inv(M.at(prow, col));
        for (size_t i = prow + 1; i < M.rows; ++i) {
            Felt f = M.at(i, col);
            if (f.is_zero()) continue;
            Felt factor = F.mul(f, pinv);
            for (size_t j = col; j < M.cols; ++j)
                M.at(i, j) = F.sub(M.at(i, j), F.mul(factor, M.at(prow, j)));
        }
        e.pivot_col.push_back(col);
        ++prow;
    }
    e.M = std::move(M);
    return e;
}

} // namespace

Felt det(const Mat& A) {
    check_shape(A.rows == A.cols, "det: matrix not square");
    if (A.rows == 0) return A.F->one();
    Elim e = eliminate(A, A.cols);
    if (e.pivot_col.size() < A.rows) return A.F->zero();
    Felt d = A.F->one();
    for (size_t i = 0; i < A.rows; ++i) d = A.F->mul(d, e.M.at(i, e.pivot_col[i]));
    if (e.swaps % 2 == 1) d = A.F->neg(d);
    return d;
}

size_t rank(const Mat& A) { return eliminate(A, A.cols).pivot_col.size(); }

Mat solve(const Mat& A, const Mat& B) {
    check_field(A, B);
    check_shape(A.rows == B.rows, "solve: row counts differ");
    const Field& F = *A.F;
    Elim e = eliminate(hconcat({A, B}), A.cols);
    size_t nr = e.pivot_col.size();
    // Rows past the pivot rows have an all-zero A part; any nonzero B entry
    // there means the system contradicts itself.
    for (size_t i = nr; i < A.rows; ++i)
        for (size_t j = A.cols; j < e.M.cols; ++j)
            if (!e.M.at(i, j).is_zero())
                throw Error(Errc::inconsistent_system, "no solution exists");
    if (nr < A.cols)
        throw Error(Errc::singular_matrix, "coefficient matrix lacks full column rank");
    Mat X(A.F, A.cols, B.cols);
    for (size_t i = A.cols; i-- > 0;) {
        Felt pinv = F.inv(e.M.at(i, i));
        for (size_t j = 0; j < B.cols; ++j) {
            Felt s = e.M.at(i, A.cols + j);
            for (size_t t = i + 1; t < A.cols; ++t)
                s = F.sub(s, F.mul(e.M.at(i, t), X.at(t, j)));
            X.at(i, j) = F.mul(s, pinv);
        }
    }
    return X;
}

Mat inverse(const Mat& A) {
    check_shape(A.rows == A.cols, "inverse: matrix not square");
    return solve(A, identity(A.F, A.rows));
}

bool equal(const Mat& A, const Mat& B) {
    return A.rows == B.rows && A.cols == B.cols && A.a == B.a;
}

bool is_zero(const Mat& A) {
    for (Felt x : A.a)
        if (!x.is_zero()) return false;
    return true;
}

std::string hex_dump(const Mat& A) {
    std::string out;
    char buf[16];
    for (size_t i = 0; i < A.rows; ++i) {
        for (size_t j = 0; j < A.cols; ++j) {
            std::snprintf(buf, sizeof buf, "%x", A.at(i, j).h);
            if (j) out += ' ';
            out += buf;
        }
        out += '\n';
    }
    return out;
}

} // namespace rackmsr
