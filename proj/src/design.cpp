#include "ssanc/design.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "ssanc/dsp.hpp"

namespace ssanc::design {

using la::Mat;

// C[i][j] = sum_{t=L-1}^{n-1} xk[t-i] xm[t-j]; each diagonal follows from the
// previous entry by swapping one head term for one tail term, so the whole
// block costs O(L n) instead of O(L^2 n)
static void cov_block(const std::vector<double>& xk, const std::vector<double>& xm, int L,
                      Mat& C) {
    int n = (int)xk.size();
    for (int j = 0; j < L; j++) {
        double s = 0.0;
        for (int t = L - 1; t < n; t++) s += xk[t] * xm[t - j];
        C.at(0, j) = s;
    }
    for (int i = 1; i < L; i++) {
        double s = 0.0;
        for (int t = L - 1; t < n; t++) s += xk[t - i] * xm[t];
        C.at(i, 0) = s;
    }
    for (int d = 0; d < L - 1; d++) {
        double acc = C.at(0, d);
        for (int i = 0; i + d < L - 1; i++) {
            acc += xk[L - 2 - i] * xm[L - 2 - d - i] - xk[n - 1 - i] * xm[n - 1 - d - i];
            C.at(1 + i, 1 + d + i) = acc;
        }
    }
    for (int d = 1; d < L - 1; d++) {
        double acc = C.at(d, 0);
        for (int i = 0; i + d < L - 1; i++) {
            acc += xk[L - 2 - d - i] * xm[L - 2 - i] - xk[n - 1 - d - i] * xm[n - 1 - i];
            C.at(1 + d + i, 1 + i) = acc;
        }
    }
}

la::Mat estimate_covariance(const std::vector<std::vector<double>>& channels, int L) {
    require(!channels.empty(), "covariance: no channels");
    require(L > 0, "covariance: L must be positive");
    int n = (int)channels[0].size();
    for (const auto& c : channels)
        require((int)c.size() == n, "covariance: channel length mismatch");
    if (n < 2 * L)
        throw insufficient_data("covariance: need at least 2L samples, got " +
                                std::to_string(n));
    int K1 = (int)channels.size();
    Mat Phi(K1 * L, K1 * L);
    // upper block pairs, flattened for the parallel loop
    std::vector<std::pair<int, int>> pairs;
    for (int k = 0; k < K1; k++)
        for (int m = k; m < K1; m++) pairs.push_back({k, m});
#pragma omp parallel for schedule(dynamic)
    for (int p = 0; p < (int)pairs.size(); p++) {
        int k = pairs[p].first, m = pairs[p].second;
        Mat C(L, L);
        cov_block(channels[k], channels[m], L, C);
        double inv = 1.0 / (n - L + 1);
        for (int i = 0; i < L; i++)
            for (int j = 0; j < L; j++) {
                double v = C.at(i, j) * inv;
                Phi.at(k * L + i, m * L + j) = v;
                if (m != k) Phi.at(m * L + j, k * L + i) = v;
            }
    }
    return Phi;
}

la::Mat estimate_covariance_serial(const std::vector<std::vector<double>>& channels, int L) {
    require(!channels.empty(), "covariance: no channels");
    require(L > 0, "covariance: L must be positive");
    int n = (int)channels[0].size();
    for (const auto& c : channels)
        require((int)c.size() == n, "covariance: channel length mismatch");
    if (n < 2 * L)
        throw insufficient_data("covariance: need at least 2L samples, got " +
                                std::to_string(n));
    int K1 = (int)channels.size();
    Mat Phi(K1 * L, K1 * L);
    double inv = 1.0 / (n - L + 1);
    for (int k = 0; k < K1; k++)
        for (int m = 0; m < K1; m++)
            for (int i = 0; i < L; i++)
                for (int j = 0; j < L; j++) {
                    double s = 0.0;
                    for (int t = L - 1; t < n; t++) s += channels[k][t - i] * channels[m][t - j];
                    Phi.at(k * L + i, m * L + j) = s * inv;
                }
    return Phi;
}

la::Mat toeplitz_right(const la::Mat& X, const std::vector<double>& g, int L_w) {
    int L_g = (int)g.size();
    int L = L_g + L_w - 1;
    require(X.cols == L, "toeplitz_right: column count != L");
    Mat Y(X.rows, L_w);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < X.rows; i++) {
        const double* xi = X.row(i);
        double* yi = Y.row(i);
        for (int c = 0; c < L_w; c++) {
            double s = 0.0;
            for (int d = 0; d < L_g; d++) s += xi[c + d] * g[d];
            yi[c] = s;
        }
    }
    return Y;
}

la::Mat toeplitz_left_t(const std::vector<double>& g, const la::Mat& X, int L_w) {
    int L_g = (int)g.size();
    int L = L_g + L_w - 1;
    require(X.rows == L, "toeplitz_left_t: row count != L");
    Mat Y(L_w, X.cols);
#pragma omp parallel for schedule(static)
    for (int c = 0; c < L_w; c++) {
        double* yc = Y.row(c);
        for (int d = 0; d < L_g; d++) {
            double gd = g[d];
            if (gd == 0.0) continue;
            const double* xr = X.row(c + d);
            for (int j = 0; j < X.cols; j++) yc[j] += gd * xr[j];
        }
    }
    return Y;
}

la::Mat build_gtphig(const la::Mat& Phi_xx, const structures::SecondaryPathMatrix& G) {
    int K1 = G.K + 1;
    int L = G.L, L_w = G.L_w;
    require(Phi_xx.rows == K1 * L && Phi_xx.cols == K1 * L, "gtphig: Phi_xx dimension mismatch");
    Mat M(K1 * L_w, K1 * L_w);
    for (int k = 0; k < K1; k++)
        for (int m = k; m < K1; m++) {
            Mat block(L, L);
            for (int i = 0; i < L; i++)
                std::memcpy(block.row(i), Phi_xx.row(k * L + i) + m * L, sizeof(double) * L);
            Mat T = toeplitz_right(block, G.g, L_w);
            Mat B = toeplitz_left_t(G.g, T, L_w);
            for (int i = 0; i < L_w; i++)
                for (int j = 0; j < L_w; j++) {
                    M.at(k * L_w + i, m * L_w + j) = B.at(i, j);
                    if (m != k) M.at(m * L_w + j, k * L_w + i) = B.at(i, j);
                }
        }
    return M;
}

std::vector<double> build_phi_vec(const la::Mat& Phi_xx, const structures::SecondaryPathMatrix& G,
                                  const structures::SelectionVectors& sel) {
    int K1 = G.K + 1;
    int L = G.L, L_w = G.L_w;
    require((int)sel.q.size() == K1 * L, "phi_vec: q dimension mismatch");
    // q has a single unit entry; phi_k = Gblock^T * (that column of Phi)
    int qcol = -1;
    for (int i = 0; i < (int)sel.q.size(); i++)
        if (sel.q[i] != 0.0) {
            require(sel.q[i] == 1.0 && qcol < 0, "phi_vec: q is not a unit selector");
            qcol = i;
        }
    require(qcol >= 0, "phi_vec: q is zero");
    std::vector<double> phi((size_t)K1 * L_w, 0.0);
    int L_g = (int)G.g.size();
    for (int k = 0; k < K1; k++)
        for (int c = 0; c < L_w; c++) {
            double s = 0.0;
            for (int d = 0; d < L_g; d++) s += G.g[d] * Phi_xx.at(k * L + c + d, qcol);
            phi[(size_t)k * L_w + c] = s;
        }
    return phi;
}

la::Mat build_hg(const structures::ReirMatrix& H, const structures::SecondaryPathMatrix& G) {
    require(H.L == G.L && H.K1 == G.K + 1, "hg: dimension mismatch");
    int R = H.rows();
    int L_w = G.L_w;
    Mat A(R, H.K1 * L_w);
    for (int k = 0; k < H.K1; k++) {
        // H_k and the g block are both convolution operators, so their
        // product is the convolution matrix of h_k * g
        std::vector<double> hg = dsp::convolve(H.taps[k].taps, G.g);
        for (int c = 0; c < L_w; c++)
            for (int t = 0; t < (int)hg.size(); t++) {
                int r = c + t;
                if (r < R) A.at(r, k * L_w + c) = hg[t];
            }
    }
    return A;
}

static std::vector<double> apply_h(const structures::ReirMatrix& H,
                                   const std::vector<double>& r) {
    int R = H.rows();
    require((int)r.size() == H.K1 * H.L, "apply_h: vector length mismatch");
    std::vector<double> y(R, 0.0);
    for (int k = 0; k < H.K1; k++) {
        const std::vector<double>& taps = H.taps[k].taps;
        for (int c = 0; c < H.L; c++) {
            double rc = r[(size_t)k * H.L + c];
            if (rc == 0.0) continue;
            for (int t = 0; t < (int)taps.size() && c + t < R; t++) y[c + t] += taps[t] * rc;
        }
    }
    return y;
}

static std::vector<double> constraint_rhs(const structures::ReirMatrix& H,
                                          const structures::SelectionVectors& sel) {
    // b = delta - H q; q selects column K*L, whose H entries are the taps of
    // the last channel
    std::vector<double> b = sel.delta_Delta;
    const std::vector<double>& taps = H.taps[H.K1 - 1].taps;
    for (int t = 0; t < (int)taps.size() && t < (int)b.size(); t++) b[t] -= taps[t];
    return b;
}

struct SolveCore {
    Mat chol_phirr;
    Mat A;
    Mat X1;  // Phi_rr^-1 At
    Mat S0;  // A X1
};

static SolveCore build_core(const Mat& Phi_rr, const structures::SecondaryPathMatrix& G,
                            const structures::ReirMatrix& H) {
    SolveCore core;
    core.chol_phirr = la::cholesky_spd(Phi_rr, "Phi_rr");
    core.A = build_hg(H, G);
    core.X1 = la::chol_solve_mat(core.chol_phirr, la::transpose(core.A));
    core.S0 = la::matmul(core.A, core.X1);
    return core;
}

static ControlFilter finish_solve(const SolveCore& core, const std::vector<double>& phi,
                                  double rho, const structures::ReirMatrix& H,
                                  const structures::SelectionVectors& sel, int L_w) {
    Mat S = core.S0;
    for (int i = 0; i < S.rows; i++) S.at(i, i) += rho;
    Mat chol_s = la::cholesky_spd(S, "S");
    std::vector<double> t = la::chol_solve(core.chol_phirr, phi);
    std::vector<double> rhs = la::matvec(core.A, t);
    std::vector<double> b = constraint_rhs(H, sel);
    for (size_t i = 0; i < rhs.size(); i++) rhs[i] += b[i];
    std::vector<double> y = la::chol_solve(chol_s, rhs);
    std::vector<double> w = la::matvec(core.X1, y);
    for (size_t i = 0; i < w.size(); i++) w[i] -= t[i];
    return ControlFilter{w, L_w};
}

CovarianceSet build_covariance_set(const la::Mat& Phi_xx,
                                   const structures::SecondaryPathMatrix& G,
                                   const structures::ReirMatrix& H,
                                   const structures::SelectionVectors& sel,
                                   const DesignSpec& spec) {
    require(spec.beta_divisor > 0.0 && spec.rho_divisor > 0.0,
            "regularizers: divisors must be positive");
    CovarianceSet cov;
    cov.Phi_xx = Phi_xx;
    Mat M0 = build_gtphig(Phi_xx, G);
    cov.lambda1 = la::largest_eigenvalue(M0);
    cov.beta = cov.lambda1 / spec.beta_divisor;
    cov.Phi_rr = std::move(M0);
    for (int i = 0; i < cov.Phi_rr.rows; i++) cov.Phi_rr.at(i, i) += cov.beta;
    cov.phi = build_phi_vec(Phi_xx, G, sel);
    SolveCore core = build_core(cov.Phi_rr, G, H);
    cov.rho = la::largest_eigenvalue(core.S0) / spec.rho_divisor;
    return cov;
}

std::pair<double, double> compute_regularizers(const la::Mat& Phi_xx,
                                               const structures::SecondaryPathMatrix& G,
                                               const structures::ReirMatrix& H,
                                               const structures::SelectionVectors& sel,
                                               const DesignSpec& spec) {
    CovarianceSet cov = build_covariance_set(Phi_xx, G, H, sel, spec);
    return {cov.beta, cov.rho};
}

ControlFilter solve_control_filter(const CovarianceSet& cov,
                                   const structures::SecondaryPathMatrix& G,
                                   const structures::ReirMatrix& H,
                                   const structures::SelectionVectors& sel) {
    SolveCore core = build_core(cov.Phi_rr, G, H);
    return finish_solve(core, cov.phi, cov.rho, H, sel, G.L_w);
}

DesignSolution solve_design(const la::Mat& Phi_xx, const structures::SecondaryPathMatrix& G,
                            const structures::ReirMatrix& H,
                            const structures::SelectionVectors& sel, const DesignSpec& spec) {
    require(spec.beta_divisor > 0.0 && spec.rho_divisor > 0.0,
            "regularizers: divisors must be positive");
    DesignSolution out;
    out.cov.Phi_xx = Phi_xx;
    Mat M0 = build_gtphig(Phi_xx, G);
    out.cov.lambda1 = la::largest_eigenvalue(M0);
    out.cov.beta = out.cov.lambda1 / spec.beta_divisor;
    out.cov.Phi_rr = std::move(M0);
    for (int i = 0; i < out.cov.Phi_rr.rows; i++) out.cov.Phi_rr.at(i, i) += out.cov.beta;
    out.cov.phi = build_phi_vec(Phi_xx, G, sel);
    SolveCore core = build_core(out.cov.Phi_rr, G, H);
    out.cov.rho = la::largest_eigenvalue(core.S0) / spec.rho_divisor;
    out.w = finish_solve(core, out.cov.phi, out.cov.rho, H, sel, G.L_w);
    out.residual_inf = constraint_residual_inf(H, G, sel, out.w);
    out.residual_l2 = constraint_residual_l2(H, G, sel, out.w);
    return out;
}

ControlFilter kkt_oracle(const CovarianceSet& cov, const structures::SecondaryPathMatrix& G,
                         const structures::ReirMatrix& H,
                         const structures::SelectionVectors& sel) {
    int n = cov.Phi_rr.rows;
    require(n <= 2000, "kkt_oracle: problem too large for the dense oracle");
    require(cov.rho > 0.0, "kkt_oracle: rho must be positive");
    Mat A = build_hg(H, G);
    // (rho Phi_rr + At A) w = -rho phi + At b
    Mat M(n, n);
    for (int i = 0; i < n; i++)
        for (int j = 0; j < n; j++) M.at(i, j) = cov.rho * cov.Phi_rr.at(i, j);
    for (int r = 0; r < A.rows; r++) {
        const double* ar = A.row(r);
        for (int i = 0; i < n; i++) {
            double v = ar[i];
            if (v == 0.0) continue;
            double* mi = M.row(i);
            for (int j = 0; j < n; j++) mi[j] += v * ar[j];
        }
    }
    std::vector<double> b = constraint_rhs(H, sel);
    std::vector<double> rhs = la::matvec_t(A, b);
    for (int i = 0; i < n; i++) rhs[i] -= cov.rho * cov.phi[i];
    std::vector<double> w = la::lu_solve(M, rhs);
    return ControlFilter{w, G.L_w};
}

static std::vector<double> constraint_vector(const structures::ReirMatrix& H,
                                             const structures::SecondaryPathMatrix& G,
                                             const structures::SelectionVectors& sel,
                                             const ControlFilter& w) {
    std::vector<double> r = structures::add_gw(G, sel.q, w);
    std::vector<double> y = apply_h(H, r);
    for (size_t i = 0; i < y.size(); i++) y[i] -= sel.delta_Delta[i];
    return y;
}

double constraint_residual_inf(const structures::ReirMatrix& H,
                               const structures::SecondaryPathMatrix& G,
                               const structures::SelectionVectors& sel, const ControlFilter& w) {
    double m = 0.0;
    for (double v : constraint_vector(H, G, sel, w)) m = std::max(m, std::fabs(v));
    return m;
}

double constraint_residual_l2(const structures::ReirMatrix& H,
                              const structures::SecondaryPathMatrix& G,
                              const structures::SelectionVectors& sel, const ControlFilter& w) {
    double s = 0.0;
    for (double v : constraint_vector(H, G, sel, w)) s += v * v;
    return std::sqrt(s);
}

double regularized_objective(const CovarianceSet& cov, const structures::SecondaryPathMatrix& G,
                             const structures::ReirMatrix& H,
                             const structures::SelectionVectors& sel, const ControlFilter& w) {
    require(cov.rho > 0.0, "objective: rho must be positive");
    int n = cov.Phi_rr.rows;
    require((int)w.w.size() == n, "objective: w dimension mismatch");
    std::vector<double> pw = la::matvec(cov.Phi_rr, w.w);
    double j = 0.0;
    for (int i = 0; i < n; i++) j += w.w[i] * pw[i] + 2.0 * cov.phi[i] * w.w[i];
    Mat A = build_hg(H, G);
    std::vector<double> aw = la::matvec(A, w.w);
    std::vector<double> b = constraint_rhs(H, sel);
    double pen = 0.0;
    for (size_t i = 0; i < aw.size(); i++) {
        double d = aw[i] - b[i];
        pen += d * d;
    }
    return j + pen / cov.rho;
}

double best_perturbation_gain(const CovarianceSet& cov, const structures::SecondaryPathMatrix& G,
                              const structures::ReirMatrix& H,
                              const structures::SelectionVectors& sel, const ControlFilter& w,
                              int n_directions, double step, uint64_t seed) {
    double j0 = regularized_objective(cov, G, H, sel, w);
    Rng rng(seed);
    double best = 0.0;
    int n = (int)w.w.size();
    for (int d = 0; d < n_directions; d++) {
        std::vector<double> dir(n);
        double nrm = 0.0;
        for (double& x : dir) {
            x = rng.next_gauss();
            nrm += x * x;
        }
        nrm = std::sqrt(nrm);
        for (int sgn = -1; sgn <= 1; sgn += 2) {
            ControlFilter wp = w;
            for (int i = 0; i < n; i++) wp.w[i] += sgn * step * dir[i] / nrm;
            double j = regularized_objective(cov, G, H, sel, wp);
            best = std::max(best, j0 - j);
        }
    }
    return best;
}

void save_matrix_binary(const std::string& path, const la::Mat& M) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw io_failure("cannot write matrix: " + path);
    char header[16] = {'s', 's', 'a', 'n', 'c', 'm', 'a', 't'};
    uint32_t r = (uint32_t)M.rows, c = (uint32_t)M.cols;
    std::memcpy(header + 8, &r, 4);
    std::memcpy(header + 12, &c, 4);
    f.write(header, 16);
    f.write((const char*)M.a.data(), (std::streamsize)(M.a.size() * sizeof(double)));
}

la::Mat load_matrix_binary(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw io_failure("cannot open matrix: " + path);
    char header[16];
    f.read(header, 16);
    if (!f || std::memcmp(header, "ssancmat", 8) != 0)
        throw io_failure("bad matrix header: " + path);
    uint32_t r, c;
    std::memcpy(&r, header + 8, 4);
    std::memcpy(&c, header + 12, 4);
    Mat M((int)r, (int)c);
    f.read((char*)M.a.data(), (std::streamsize)(M.a.size() * sizeof(double)));
    if (!f) throw io_failure("matrix file truncated: " + path);
    return M;
}

}  // namespace ssanc::design
