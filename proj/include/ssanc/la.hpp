#pragma once

#include <string>
#include <vector>

namespace ssanc::la {

struct Mat {
    int rows = 0, cols = 0;
    std::vector<double> a;
    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a((size_t)r * c, 0.0) {}
    double& at(int i, int j) { return a[(size_t)i * cols + j]; }
    double at(int i, int j) const { return a[(size_t)i * cols + j]; }
    double* row(int i) { return a.data() + (size_t)i * cols; }
    const double* row(int i) const { return a.data() + (size_t)i * cols; }
};

Mat matmul(const Mat& A, const Mat& B);           // OpenMP over output rows
Mat matmul_serial(const Mat& A, const Mat& B);    // reference implementation
Mat transpose(const Mat& A);
std::vector<double> matvec(const Mat& A, const std::vector<double>& x);
std::vector<double> matvec_t(const Mat& A, const std::vector<double>& x);  // A' x

// lower-triangular in-place Cholesky; false if a pivot is not positive
bool cholesky_inplace(Mat& A);
// factor with one jitter retry (1e-12 * trace/n), numeric_failure naming `name`
Mat cholesky_spd(Mat A, const std::string& name);
// solve L L' x = b given the lower factor
std::vector<double> chol_solve(const Mat& L, std::vector<double> b);
// multi-rhs: returns X solving L L' X = B
Mat chol_solve_mat(const Mat& L, const Mat& B);

// partial-pivot LU solve, independent of the Cholesky path (oracle use)
std::vector<double> lu_solve(Mat A, std::vector<double> b);

double max_relative_asymmetry(const Mat& M);
// power iteration, rel tol 1e-8, max 1000 iterations; symmetry required
double largest_eigenvalue(const Mat& M);

// cyclic Jacobi eigenvalues, ascending; small-matrix test oracle
std::vector<double> jacobi_eigenvalues(Mat M, int sweeps = 60);

}  // namespace ssanc::la
