#include "doctest.h"

#include <stdexcept>

#include "ssanc/common.hpp"
#include "ssanc/structures.hpp"

using namespace ssanc;

TEST_CASE("toeplitz block layout for g=[1,2,3], L_w=2") {
    auto G = structures::build_secondary_path_matrix({1, 2, 3}, 2, 1);
    CHECK(G.L == 4);
    REQUIRE(G.block.rows == 4);
    REQUIRE(G.block.cols == 2);
    double want[4][2] = {{1, 0}, {2, 1}, {3, 2}, {0, 3}};
    for (int i = 0; i < 4; i++)
        for (int j = 0; j < 2; j++) CHECK(G.block.at(i, j) == want[i][j]);
}

TEST_CASE("dense secondary path matrix is block diagonal") {
    auto G = structures::build_secondary_path_matrix({1, 2, 3}, 2, 1);
    auto D = G.dense();
    REQUIRE(D.rows == 8);  // (K+1) L
    REQUIRE(D.cols == 4);  // (K+1) L_w
    for (int i = 0; i < 8; i++)
        for (int j = 0; j < 4; j++) {
            int bi = i / 4, bj = j / 2;
            if (bi == bj)
                CHECK(D.at(i, j) == G.block.at(i % 4, j % 2));
            else
                CHECK(D.at(i, j) == 0.0);
        }
}

TEST_CASE("reir matrix block for two taps") {
    AcausalFir h;
    h.taps = {0.5, 1.0};
    h.L_a = 0;
    h.L_h = 2;
    auto H = structures::build_reir_matrix({h}, 2);
    REQUIRE(H.rows() == 3);
    REQUIRE(H.dense.rows == 3);
    REQUIRE(H.dense.cols == 2);
    double want[3][2] = {{0.5, 0}, {1.0, 0.5}, {0, 1.0}};
    for (int i = 0; i < 3; i++)
        for (int j = 0; j < 2; j++) CHECK(H.dense.at(i, j) == want[i][j]);
}

TEST_CASE("acausal reir block starts above the diagonal") {
    AcausalFir h;
    h.taps = {7.0, 0.0, 0.0};  // lag -1 tap only
    h.L_a = 1;
    h.L_h = 2;
    auto H = structures::build_reir_matrix({h}, 2);
    // column c puts taps[t] at row c + t; lag -1 lands on row c
    CHECK(H.dense.at(0, 0) == 7.0);
    CHECK(H.dense.at(1, 1) == 7.0);
    CHECK(H.dense.at(1, 0) == 0.0);
}

TEST_CASE("selection vectors put the ones where the model says") {
    auto sel = structures::build_selection_vectors(1, 2, 2, 3, 1);
    REQUIRE(sel.q.size() == 4);
    CHECK(sel.q[2] == 1.0);
    CHECK(sel.q[0] + sel.q[1] + sel.q[3] == 0.0);
    REQUIRE(sel.delta_Delta.size() == 6);
    for (int i = 0; i < 6; i++) CHECK(sel.delta_Delta[i] == (i == 3 ? 1.0 : 0.0));
}

TEST_CASE("delay beyond the constraint span is rejected") {
    // valid range is 0 <= Delta <= L_h + L - 2
    CHECK_NOTHROW(structures::build_selection_vectors(1, 2, 0, 3, 3));
    CHECK_THROWS_AS(structures::build_selection_vectors(1, 2, 0, 3, 4), std::invalid_argument);
    CHECK_THROWS_AS(structures::build_selection_vectors(1, 2, 0, 3, -1), std::invalid_argument);
}

TEST_CASE("stacked window reverses each channel") {
    MultichannelSignal x;
    x.ch = {{1, 2, 3}};
    Signal p;
    p.samples = {4, 5, 6};
    auto v = structures::stack_input_window(x, p, 2, 2);
    REQUIRE(v.size() == 4);
    CHECK(v[0] == 3);
    CHECK(v[1] == 2);
    CHECK(v[2] == 6);
    CHECK(v[3] == 5);
    CHECK_THROWS_AS(structures::stack_input_window(x, p, 0, 2), std::out_of_range);
}

TEST_CASE("add_gw agrees with the dense product") {
    auto G = structures::build_secondary_path_matrix({1, 2, 3}, 2, 1);
    ControlFilter w;
    w.L_w = 2;
    w.w = {0.5, -1.0, 2.0, 0.25};
    std::vector<double> q(8, 0.0);
    q[4] = 1.0;  // K L with K=1, L=4
    auto r = structures::add_gw(G, q, w);
    auto D = G.dense();
    std::vector<double> want = q;
    for (int i = 0; i < D.rows; i++)
        for (int j = 0; j < D.cols; j++) want[i] += D.at(i, j) * w.w[j];
    REQUIRE(r.size() == want.size());
    for (size_t i = 0; i < r.size(); i++) CHECK(r[i] == doctest::Approx(want[i]).epsilon(1e-14));
}
