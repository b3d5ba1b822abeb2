#pragma once

#include <vector>

#include "ssanc/common.hpp"
#include "ssanc/la.hpp"

namespace ssanc::structures {

// block-diagonal G: K+1 identical Toeplitz blocks, each L x L_w with
// block[i][j] = g[i-j]; kept as the single block plus sizes
struct SecondaryPathMatrix {
    std::vector<double> g;
    int L_w = 0;
    int K = 0;  // outer microphones; block count is K+1
    int L = 0;  // L_g + L_w - 1
    la::Mat block;
    la::Mat dense() const;
};

// H = [H_1 ... H_{K+1}], each block (L_a+L_h+L-1) x L with
// H_k[r][c] = h_k(r - c - L_a)
struct ReirMatrix {
    int L_a = 0, L_h = 0, L = 0, K1 = 0;
    la::Mat dense;
    std::vector<AcausalFir> taps;  // per-channel source of the blocks
    int rows() const { return L_a + L_h + L - 1; }
};

struct SelectionVectors {
    std::vector<double> q;            // 1 at flat index K*L
    std::vector<double> delta_Delta;  // 1 at index L_a + Delta
    int Delta = 0;
};

SecondaryPathMatrix build_secondary_path_matrix(const std::vector<double>& g, int L_w, int K);
ReirMatrix build_reir_matrix(const std::vector<AcausalFir>& h, int L);
SelectionVectors build_selection_vectors(int K, int L, int L_a, int L_h, int Delta);

// [x_0(n)..x_0(n-L+1), ..., x_{K-1}(...), p_hat(n)..p_hat(n-L+1)]
std::vector<double> stack_input_window(const MultichannelSignal& x, const Signal& p_hat, int n,
                                       int L);

// r = q + G w for a stacked control filter, using the block structure
std::vector<double> add_gw(const SecondaryPathMatrix& G, const std::vector<double>& q,
                           const ControlFilter& w);

}  // namespace ssanc::structures
