#include "ssanc/la.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "ssanc/common.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ssanc::la {

Mat matmul(const Mat& A, const Mat& B) {
    require(A.cols == B.rows, "matmul: inner dimensions differ");
    Mat C(A.rows, B.cols);
    // ikj with per-row accumulation; rows are independent so the result does
    // not depend on the thread count
#pragma omp parallel for schedule(static)
    for (int i = 0; i < A.rows; i++) {
        double* ci = C.row(i);
        const double* ai = A.row(i);
        for (int k = 0; k < A.cols; k++) {
            double aik = ai[k];
            if (aik == 0.0) continue;
            const double* bk = B.row(k);
            for (int j = 0; j < B.cols; j++) ci[j] += aik * bk[j];
        }
    }
    return C;
}

Mat matmul_serial(const Mat& A, const Mat& B) {
    require(A.cols == B.rows, "matmul: inner dimensions differ");
    Mat C(A.rows, B.cols);
    for (int i = 0; i < A.rows; i++)
        for (int j = 0; j < B.cols; j++) {
            double s = 0.0;
            for (int k = 0; k < A.cols; k++) s += A.at(i, k) * B.at(k, j);
            C.at(i, j) = s;
        }
    return C;
}

Mat transpose(const Mat& A) {
    Mat T(A.cols, A.rows);
    for (int i = 0; i < A.rows; i++)
        for (int j = 0; j < A.cols; j++) T.at(j, i) = A.at(i, j);
    return T;
}

std::vector<double> matvec(const Mat& A, const std::vector<double>& x) {
    require((int)x.size() == A.cols, "matvec: size mismatch");
    std::vector<double> y(A.rows, 0.0);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < A.rows; i++) {
        const double* ai = A.row(i);
        double s = 0.0;
        for (int j = 0; j < A.cols; j++) s += ai[j] * x[j];
        y[i] = s;
    }
    return y;
}

std::vector<double> matvec_t(const Mat& A, const std::vector<double>& x) {
    require((int)x.size() == A.rows, "matvec_t: size mismatch");
    std::vector<double> y(A.cols, 0.0);
    for (int i = 0; i < A.rows; i++) {
        const double* ai = A.row(i);
        double xi = x[i];
        if (xi == 0.0) continue;
        for (int j = 0; j < A.cols; j++) y[j] += xi * ai[j];
    }
    return y;
}

bool cholesky_inplace(Mat& A) {
    int n = A.rows;
    for (int j = 0; j < n; j++) {
        double d = A.at(j, j);
        for (int k = 0; k < j; k++) d -= A.at(j, k) * A.at(j, k);
        if (!(d > 0.0) || !std::isfinite(d)) return false;
        d = std::sqrt(d);
        A.at(j, j) = d;
#pragma omp parallel for schedule(static)
        for (int i = j + 1; i < n; i++) {
            double s = A.at(i, j);
            const double* ri = A.row(i);
            const double* rj = A.row(j);
            for (int k = 0; k < j; k++) s -= ri[k] * rj[k];
            A.at(i, j) = s / d;
        }
    }
    // zero strict upper part so the factor is unambiguous
    for (int i = 0; i < n; i++)
        for (int j = i + 1; j < n; j++) A.at(i, j) = 0.0;
    return true;
}

Mat cholesky_spd(Mat A, const std::string& name) {
    require(A.rows == A.cols, "cholesky: matrix not square");
    Mat work = A;
    if (cholesky_inplace(work)) return work;
    // one jitter retry, then fail naming the matrix
    double tr = 0.0;
    for (int i = 0; i < A.rows; i++) tr += A.at(i, i);
    double jitter = 1e-12 * tr / A.rows;
    for (int i = 0; i < A.rows; i++) A.at(i, i) += jitter;
    if (cholesky_inplace(A)) return A;
    throw numeric_failure("cholesky failed: matrix '" + name + "' is not positive definite");
}

std::vector<double> chol_solve(const Mat& L, std::vector<double> b) {
    int n = L.rows;
    require((int)b.size() == n, "chol_solve: size mismatch");
    for (int i = 0; i < n; i++) {
        double s = b[i];
        const double* ri = L.row(i);
        for (int k = 0; k < i; k++) s -= ri[k] * b[k];
        b[i] = s / ri[i];
    }
    for (int i = n - 1; i >= 0; i--) {
        double s = b[i];
        for (int k = i + 1; k < n; k++) s -= L.at(k, i) * b[k];
        b[i] = s / L.at(i, i);
    }
    return b;
}

Mat chol_solve_mat(const Mat& L, const Mat& B) {
    int n = L.rows;
    require(B.rows == n, "chol_solve_mat: size mismatch");
    Mat X = B;
    int m = B.cols;
    // forward substitution, all right-hand sides at once
    for (int i = 0; i < n; i++) {
        double* xi = X.row(i);
        const double* ri = L.row(i);
        for (int k = 0; k < i; k++) {
            double lik = ri[k];
            if (lik == 0.0) continue;
            const double* xk = X.row(k);
            for (int j = 0; j < m; j++) xi[j] -= lik * xk[j];
        }
        double inv = 1.0 / ri[i];
        for (int j = 0; j < m; j++) xi[j] *= inv;
    }
    for (int i = n - 1; i >= 0; i--) {
        double* xi = X.row(i);
        for (int k = i + 1; k < n; k++) {
            double lki = L.at(k, i);
            if (lki == 0.0) continue;
            const double* xk = X.row(k);
            for (int j = 0; j < m; j++) xi[j] -= lki * xk[j];
        }
        double inv = 1.0 / L.at(i, i);
        for (int j = 0; j < m; j++) xi[j] *= inv;
    }
    return X;
}

std::vector<double> lu_solve(Mat A, std::vector<double> b) {
    int n = A.rows;
    require(A.cols == n && (int)b.size() == n, "lu_solve: size mismatch");
    std::vector<int> piv(n);
    for (int k = 0; k < n; k++) {
        int p = k;
        double best = std::fabs(A.at(k, k));
        for (int i = k + 1; i < n; i++) {
            double v = std::fabs(A.at(i, k));
            if (v > best) { best = v; p = i; }
        }
        if (best == 0.0) throw numeric_failure("lu_solve: singular matrix");
        piv[k] = p;
        if (p != k)
            for (int j = 0; j < n; j++) std::swap(A.at(k, j), A.at(p, j));
        double inv = 1.0 / A.at(k, k);
        for (int i = k + 1; i < n; i++) {
            double m = A.at(i, k) * inv;
            A.at(i, k) = m;
            if (m == 0.0) continue;
            const double* rk = A.row(k);
            double* ri = A.row(i);
            for (int j = k + 1; j < n; j++) ri[j] -= m * rk[j];
        }
    }
    // apply the whole row permutation before the triangular solves; the stored
    // multipliers belong to the fully pivoted factor, so interleaving the
    // swaps with the updates would pair them with the wrong entries
    for (int k = 0; k < n; k++)
        if (piv[k] != k) std::swap(b[k], b[piv[k]]);
    for (int k = 0; k < n; k++)
        for (int i = k + 1; i < n; i++) b[i] -= A.at(i, k) * b[k];
    for (int i = n - 1; i >= 0; i--) {
        double s = b[i];
        for (int j = i + 1; j < n; j++) s -= A.at(i, j) * b[j];
        b[i] = s / A.at(i, i);
    }
    return b;
}

double max_relative_asymmetry(const Mat& M) {
    double scale = 0.0, asym = 0.0;
    for (int i = 0; i < M.rows; i++)
        for (int j = 0; j < i; j++) {
            scale = std::max(scale, std::max(std::fabs(M.at(i, j)), std::fabs(M.at(j, i))));
            asym = std::max(asym, std::fabs(M.at(i, j) - M.at(j, i)));
        }
    for (int i = 0; i < M.rows; i++) scale = std::max(scale, std::fabs(M.at(i, i)));
    return scale > 0.0 ? asym / scale : 0.0;
}

double largest_eigenvalue(const Mat& M) {
    require(M.rows == M.cols, "largest_eigenvalue: matrix not square");
    if (max_relative_asymmetry(M) > 1e-8)
        throw std::invalid_argument("largest_eigenvalue: matrix not symmetric");
    int n = M.rows;
    std::vector<double> v(n);
    Rng rng(0x5eedu);
    for (double& x : v) x = rng.next_gauss();
    double nrm = 0.0;
    for (double x : v) nrm += x * x;
    nrm = std::sqrt(nrm);
    for (double& x : v) x /= nrm;
    double lam = 0.0;
    for (int it = 0; it < 1000; it++) {
        std::vector<double> u = matvec(M, v);
        double lam_new = 0.0;
        for (int i = 0; i < n; i++) lam_new += v[i] * u[i];
        if (!std::isfinite(lam_new))
            throw numeric_failure("largest_eigenvalue: iteration produced non-finite value");
        if (it > 0 && std::fabs(lam_new - lam) <= 1e-8 * std::fabs(lam_new)) return lam_new;
        lam = lam_new;
        nrm = 0.0;
        for (double x : u) nrm += x * x;
        nrm = std::sqrt(nrm);
        if (nrm == 0.0) return 0.0;
        for (double& x : u) x /= nrm;
        v = std::move(u);
    }
    // a slow tail implies a near-degenerate top cluster, in which case the
    // quotient already sits within that cluster; good enough for a scale
    return lam;
}

std::vector<double> jacobi_eigenvalues(Mat M, int sweeps) {
    int n = M.rows;
    for (int s = 0; s < sweeps; s++) {
        double off = 0.0;
        for (int p = 0; p < n; p++)
            for (int q = p + 1; q < n; q++) off += M.at(p, q) * M.at(p, q);
        if (off < 1e-30) break;
        for (int p = 0; p < n; p++)
            for (int q = p + 1; q < n; q++) {
                double apq = M.at(p, q);
                if (std::fabs(apq) < 1e-300) continue;
                double theta = (M.at(q, q) - M.at(p, p)) / (2.0 * apq);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0), sn = t * c;
                for (int k = 0; k < n; k++) {
                    double mkp = M.at(k, p), mkq = M.at(k, q);
                    M.at(k, p) = c * mkp - sn * mkq;
                    M.at(k, q) = sn * mkp + c * mkq;
                }
                for (int k = 0; k < n; k++) {
                    double mpk = M.at(p, k), mqk = M.at(q, k);
                    M.at(p, k) = c * mpk - sn * mqk;
                    M.at(q, k) = sn * mpk + c * mqk;
                }
            }
    }
    std::vector<double> ev(n);
    for (int i = 0; i < n; i++) ev[i] = M.at(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

}  // namespace ssanc::la
