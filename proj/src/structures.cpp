#include "ssanc/structures.hpp"

namespace ssanc::structures {

la::Mat SecondaryPathMatrix::dense() const {
    int k1 = K + 1;
    la::Mat out(k1 * L, k1 * L_w);
    for (int k = 0; k < k1; k++)
        for (int i = 0; i < L; i++)
            for (int j = 0; j < L_w; j++)
                out.at(k * L + i, k * L_w + j) = block.at(i, j);
    return out;
}

SecondaryPathMatrix build_secondary_path_matrix(const std::vector<double>& g, int L_w, int K) {
    require(!g.empty(), "secondary path: empty g");
    require(L_w > 0, "secondary path: L_w must be positive");
    require(K >= 0, "secondary path: negative K");
    check_finite(g, "secondary path g");
    SecondaryPathMatrix m;
    m.g = g;
    m.L_w = L_w;
    m.K = K;
    int L_g = (int)g.size();
    m.L = L_g + L_w - 1;
    m.block = la::Mat(m.L, L_w);
    for (int i = 0; i < m.L; i++)
        for (int j = 0; j < L_w; j++) {
            int d = i - j;
            if (d >= 0 && d < L_g) m.block.at(i, j) = g[d];
        }
    return m;
}

ReirMatrix build_reir_matrix(const std::vector<AcausalFir>& h, int L) {
    require(!h.empty(), "reir matrix: no channels");
    require(L > 0, "reir matrix: L must be positive");
    int L_a = h[0].L_a, L_h = h[0].L_h;
    for (const auto& f : h) {
        require(f.L_a == L_a && f.L_h == L_h, "reir matrix: mismatched L_a/L_h across channels");
        require((int)f.taps.size() == L_a + L_h, "reir matrix: tap count != L_a + L_h");
        require(L_a >= 0 && L_h >= 1, "reir matrix: need L_a >= 0 and L_h >= 1");
    }
    ReirMatrix m;
    m.L_a = L_a;
    m.L_h = L_h;
    m.L = L;
    m.K1 = (int)h.size();
    m.taps = h;
    int R = L_a + L_h + L - 1;
    m.dense = la::Mat(R, m.K1 * L);
    for (int k = 0; k < m.K1; k++)
        for (int c = 0; c < L; c++)
            for (int t = 0; t < L_a + L_h; t++) {
                int r = c + t;
                if (r < R) m.dense.at(r, k * L + c) = h[k].taps[t];
            }
    return m;
}

SelectionVectors build_selection_vectors(int K, int L, int L_a, int L_h, int Delta) {
    require(K >= 0 && L > 0 && L_a >= 0 && L_h >= 1, "selection vectors: bad dimensions");
    require(Delta >= 0 && Delta <= L_h + L - 2, "selection vectors: Delta out of range");
    SelectionVectors s;
    s.q.assign((size_t)(K + 1) * L, 0.0);
    s.q[(size_t)K * L] = 1.0;
    s.delta_Delta.assign((size_t)(L_a + L_h + L - 1), 0.0);
    s.delta_Delta[L_a + Delta] = 1.0;
    s.Delta = Delta;
    return s;
}

std::vector<double> stack_input_window(const MultichannelSignal& x, const Signal& p_hat, int n,
                                       int L) {
    int K = (int)x.ch.size();
    if (n < L - 1) throw std::out_of_range("stack_input_window: n < L-1");
    for (const auto& c : x.ch)
        require((int)c.size() > n, "stack_input_window: n beyond channel length");
    require((int)p_hat.samples.size() > n, "stack_input_window: n beyond p_hat length");
    std::vector<double> out((size_t)(K + 1) * L);
    for (int k = 0; k < K; k++)
        for (int i = 0; i < L; i++) out[(size_t)k * L + i] = x.ch[k][n - i];
    for (int i = 0; i < L; i++) out[(size_t)K * L + i] = p_hat.samples[n - i];
    return out;
}

std::vector<double> add_gw(const SecondaryPathMatrix& G, const std::vector<double>& q,
                           const ControlFilter& w) {
    int k1 = G.K + 1;
    require(w.L_w == G.L_w && w.blocks() == k1, "add_gw: control filter shape mismatch");
    require((int)q.size() == k1 * G.L, "add_gw: q length mismatch");
    std::vector<double> r = q;
    for (int k = 0; k < k1; k++) {
        // block is Toeplitz in g, so G w_k is just a convolution
        for (int i = 0; i < (int)G.g.size(); i++) {
            double gi = G.g[i];
            if (gi == 0.0) continue;
            for (int j = 0; j < G.L_w; j++) r[(size_t)k * G.L + i + j] += gi * w.w[(size_t)k * G.L_w + j];
        }
    }
    return r;
}

}  // namespace ssanc::structures
