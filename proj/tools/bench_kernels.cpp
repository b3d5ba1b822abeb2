// times the OpenMP kernels against their serial reference implementations and
// reports the largest element difference alongside the speedup
#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "ssanc/common.hpp"
#include "ssanc/design.hpp"
#include "ssanc/la.hpp"
#include "ssanc/structures.hpp"

using namespace ssanc;

namespace {

double now_s() {
    using namespace std::chrono;
    return duration<double>(steady_clock::now().time_since_epoch()).count();
}

template <typename F>
double time_best(F&& f, int reps = 3) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        double t0 = now_s();
        f();
        best = std::min(best, now_s() - t0);
    }
    return best;
}

double max_diff(const la::Mat& a, const la::Mat& b) {
    double m = 0;
    for (size_t i = 0; i < a.a.size(); ++i) m = std::max(m, std::fabs(a.a[i] - b.a[i]));
    return m;
}

void report(const char* name, double serial_s, double parallel_s, double diff) {
    std::printf("%-22s serial %8.3f ms   parallel %8.3f ms   x%-5.2f   max|diff| %.3g\n", name,
                serial_s * 1e3, parallel_s * 1e3, serial_s / parallel_s, diff);
}

}  // namespace

int main() {
    Rng rng(7);

    {
        int n = 384;
        la::Mat A(n, n), B(n, n);
        for (auto& v : A.a) v = rng.next_gauss();
        for (auto& v : B.a) v = rng.next_gauss();
        la::Mat Cp, Cs;
        double tp = time_best([&] { Cp = la::matmul(A, B); });
        double ts = time_best([&] { Cs = la::matmul_serial(A, B); });
        report("matmul 384x384", ts, tp, max_diff(Cp, Cs));
    }

    {
        int L = 191, n = 16000;
        std::vector<std::vector<double>> ch(3, std::vector<double>(n));
        for (auto& c : ch)
            for (auto& v : c) v = rng.next_gauss();
        la::Mat Cp, Cs;
        double tp = time_best([&] { Cp = design::estimate_covariance(ch, L); }, 2);
        double ts = time_best([&] { Cs = design::estimate_covariance_serial(ch, L); }, 2);
        report("covariance 3ch L=191", ts, tp, max_diff(Cp, Cs));
    }

    {
        // Toeplitz product against an explicit dense multiply
        int L_w = 128, L_g = 64, L = L_g + L_w - 1;
        std::vector<double> g(L_g);
        for (auto& v : g) v = rng.next_gauss();
        auto G = structures::build_secondary_path_matrix(g, L_w, 0);
        la::Mat X(L, L);
        for (auto& v : X.a) v = rng.next_gauss();
        la::Mat Tp, Ts;
        double tp = time_best([&] { Tp = design::toeplitz_right(X, g, L_w); });
        double ts = time_best([&] { Ts = la::matmul_serial(X, G.block); });
        report("toeplitz_right", ts, tp, max_diff(Tp, Ts));
    }

    return 0;
}
