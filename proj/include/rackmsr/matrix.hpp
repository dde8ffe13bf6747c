#ifndef RACKMSR_MATRIX_HPP
#define RACKMSR_MATRIX_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "rackmsr/gf.hpp"

namespace rackmsr {

// Dense row-major matrix of field elements.  Mats are plain values; the field
// is referenced, not owned, and must outlive the matrix.
struct Mat {
    const Field* F = nullptr;
    size_t rows = 0, cols = 0;
    std::vector<Felt> a;

    Mat() = default;
    Mat(const Field* f, size_t r, size_t c) : F(f), rows(r), cols(c), a(r * c) {}

    Felt& at(size_t i, size_t j) { return a[i * cols + j]; }
    Felt at(size_t i, size_t j) const { return a[i * cols + j]; }
};

// Uniform partition of a Mat into block_rows x block_cols blocks, each
// block_h x block_w.
struct BlockShape {
    size_t block_rows = 0, block_cols = 0;
    size_t block_h = 0, block_w = 0;
};

Mat zeros(const Field* F, size_t r, size_t c);
Mat identity(const Field* F, size_t n);

Mat matmul(const Mat& A, const Mat& B);
Mat add(const Mat& A, const Mat& B);
Mat sub(const Mat& A, const Mat& B);
Mat scale(Felt c, const Mat& A);
Mat neg(const Mat& A);
Mat transpose(const Mat& A);
Mat hconcat(const std::vector<Mat>& parts);
Mat vconcat(const std::vector<Mat>& parts);
Mat submatrix(const Mat& A, const std::vector<size_t>& row_set, const std::vector<size_t>& col_set);

Mat kron(const Mat& A, const Mat& B);
// Block-transposed product: block (i,j) of the result is kron(A, B_{ij}) where
// B is read through `shape`.  With 1x1 blocks this is kron(B, A).
Mat boxtimes(const Mat& A, const Mat& B, const BlockShape& shape);

Felt det(const Mat& A);
Mat inverse(const Mat& A);
// Unique solution X of A X = B.  A may be tall (overdetermined); throws
// singular_matrix when A lacks full column rank and inconsistent_system when
// the equations contradict each other.
Mat solve(const Mat& A, const Mat& B);
size_t rank(const Mat& A);

bool equal(const Mat& A, const Mat& B);
bool is_zero(const Mat& A);
// Row-major element handles in hex, one row per line (golden-file format).
std::string hex_dump(const Mat& A);

} // namespace rackmsr

#endif
