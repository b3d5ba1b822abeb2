#pragma once

#include <string>
#include <vector>

#include "ssanc/common.hpp"
#include "ssanc/la.hpp"
#include "ssanc/structures.hpp"

namespace ssanc::design {

struct CovarianceSet {
    la::Mat Phi_xx;           // (K+1)L square input covariance
    la::Mat Phi_rr;           // Gt Phi_xx G + beta I, (K+1)L_w square
    std::vector<double> phi;  // Gt Phi_xx q
    double beta = 0.0;
    double rho = 0.0;
    double lambda1 = 0.0;  // largest eigenvalue of Gt Phi_xx G
    int window_count = 0;  // averaging windows behind Phi_xx, 0 if synthetic
};

struct DesignSpec {
    int Delta = 0;
    int L_a = 0;
    int L_h = 1;
    int L_w = 1;
    int L_g = 1;
    double beta_divisor = 5e3;
    double rho_divisor = 1e5;
    int reference_channel = 0;
};

// sample-average covariance of the stacked window over channels (K outer mics
// followed by the leakage channel); parallel per-block diagonal recurrence
la::Mat estimate_covariance(const std::vector<std::vector<double>>& channels, int L);
// direct per-element reference, kept for testing the fast kernel
la::Mat estimate_covariance_serial(const std::vector<std::vector<double>>& channels, int L);

// X * Gblock and Gblock^T * X against the L x L_w Toeplitz block of g
la::Mat toeplitz_right(const la::Mat& X, const std::vector<double>& g, int L_w);
la::Mat toeplitz_left_t(const std::vector<double>& g, const la::Mat& X, int L_w);

// Gt Phi_xx G assembled block pair by block pair
la::Mat build_gtphig(const la::Mat& Phi_xx, const structures::SecondaryPathMatrix& G);
// Gt (Phi_xx q), exploiting that q selects one column
std::vector<double> build_phi_vec(const la::Mat& Phi_xx, const structures::SecondaryPathMatrix& G,
                                  const structures::SelectionVectors& sel);
// A = H G, one Toeplitz block of conv(h_k, g) per channel
la::Mat build_hg(const structures::ReirMatrix& H, const structures::SecondaryPathMatrix& G);

// lambda1 -> beta -> Phi_rr -> lambda_max(H G Phi_rr^-1 Gt Ht) -> rho, in that
// order; returns the full set ready for the solver
CovarianceSet build_covariance_set(const la::Mat& Phi_xx,
                                   const structures::SecondaryPathMatrix& G,
                                   const structures::ReirMatrix& H,
                                   const structures::SelectionVectors& sel,
                                   const DesignSpec& spec);

std::pair<double, double> compute_regularizers(const la::Mat& Phi_xx,
                                               const structures::SecondaryPathMatrix& G,
                                               const structures::ReirMatrix& H,
                                               const structures::SelectionVectors& sel,
                                               const DesignSpec& spec);

// closed-form solution
//   w = -t + Phi_rr^-1 At (A Phi_rr^-1 At + rho I)^-1 (A t + delta - H q),
//   t = Phi_rr^-1 phi, A = H G
ControlFilter solve_control_filter(const CovarianceSet& cov,
                                   const structures::SecondaryPathMatrix& G,
                                   const structures::ReirMatrix& H,
                                   const structures::SelectionVectors& sel);

struct DesignSolution {
    ControlFilter w;
    CovarianceSet cov;
    double residual_inf = 0.0;  // max |H(q + G w) - delta|
    double residual_l2 = 0.0;
};

// one-shot pipeline sharing the factorization between the regularizer chain
// and the solve; what the experiment driver calls
DesignSolution solve_design(const la::Mat& Phi_xx, const structures::SecondaryPathMatrix& G,
                            const structures::ReirMatrix& H,
                            const structures::SelectionVectors& sel, const DesignSpec& spec);

// independent check: stationarity of the penalized objective
//   J(w) = wt Phi_rr w + 2 phi·w + (1/rho) |A w - b|^2
// solved as one dense symmetric system (rho Phi_rr + At A) w = -rho phi + At b
ControlFilter kkt_oracle(const CovarianceSet& cov, const structures::SecondaryPathMatrix& G,
                         const structures::ReirMatrix& H,
                         const structures::SelectionVectors& sel);

double constraint_residual_inf(const structures::ReirMatrix& H,
                               const structures::SecondaryPathMatrix& G,
                               const structures::SelectionVectors& sel, const ControlFilter& w);
double constraint_residual_l2(const structures::ReirMatrix& H,
                              const structures::SecondaryPathMatrix& G,
                              const structures::SelectionVectors& sel, const ControlFilter& w);

double regularized_objective(const CovarianceSet& cov, const structures::SecondaryPathMatrix& G,
                             const structures::ReirMatrix& H,
                             const structures::SelectionVectors& sel, const ControlFilter& w);

// largest objective decrease found over random perturbations of given norm;
// a first-order optimal w keeps this below ~step^2 scale
double best_perturbation_gain(const CovarianceSet& cov, const structures::SecondaryPathMatrix& G,
                              const structures::ReirMatrix& H,
                              const structures::SelectionVectors& sel, const ControlFilter& w,
                              int n_directions, double step, uint64_t seed);

// flat little-endian doubles with a 16 byte header: magic "ssancmat", rows,
// cols as uint32
void save_matrix_binary(const std::string& path, const la::Mat& M);
la::Mat load_matrix_binary(const std::string& path);

}  // namespace ssanc::design
