#include <doctest.h>

#include <algorithm>
#include <complex>

#include "amrpe/spectral.hpp"
#include "support/oracles.hpp"
#include "support/synth.hpp"

using namespace amrpe;
using Complex = std::complex<double>;

namespace {

Spg two_node_edge() {
    Spg g;
    g.n = 2;
    g.node_labels = {"u", "v"};
    g.edges = {{0, 1}};
    return g;
}

Spg single_node() {
    Spg g;
    g.n = 1;
    g.node_labels = {"a"};
    return g;
}

Spg directed_cycle(int n) {
    Spg g;
    g.n = n;
    for (int i = 0; i < n; ++i) {
        g.node_labels.push_back("n" + std::to_string(i));
        g.edges.emplace_back(i, (i + 1) % n);
    }
    std::sort(g.edges.begin(), g.edges.end());
    return g;
}

double hermitian_defect(const Eigen::MatrixXcd& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double orthonormality_defect(const Eigen::MatrixXcd& v) {
    Eigen::MatrixXcd gram = v.adjoint() * v;
    return (gram - Eigen::MatrixXcd::Identity(v.cols(), v.cols())).cwiseAbs().maxCoeff();
}

double residual(const Eigen::MatrixXcd& lap, const Spectrum& spec) {
    double worst = 0;
    for (int c = 0; c < spec.k_eff(); ++c)
        worst = std::max(worst, (lap * spec.eigenvectors.col(c) -
                                 spec.eigenvalues(c) * spec.eigenvectors.col(c))
                                    .norm());
    return worst;
}

} // namespace

TEST_SUITE("spectral") {

TEST_CASE("single node gives the 1x1 zero operator") {
    MagneticLaplacian lap = magnetic_laplacian(single_node(), 0.25);
    CHECK(lap.n() == 1);
    CHECK(lap.entries(0, 0) == Complex{0.0, 0.0});

    Spectrum spec = hermitian_eigen(lap);
    CHECK(spec.eigenvalues(0) == doctest::Approx(0.0));
    CHECK(spec.eigenvectors(0, 0) == Complex{1.0, 0.0});
}

TEST_CASE("hand-solved two-node case at q = 1/4") {
    MagneticLaplacian lap = magnetic_laplacian(two_node_edge(), 0.25);
    CHECK(std::abs(lap.entries(0, 0) - Complex{1, 0}) < 1e-10);
    CHECK(std::abs(lap.entries(1, 1) - Complex{1, 0}) < 1e-10);
    CHECK(std::abs(lap.entries(0, 1) - Complex{0, -1}) < 1e-10);
    CHECK(std::abs(lap.entries(1, 0) - Complex{0, 1}) < 1e-10);

    Spectrum spec = hermitian_eigen(lap);
    CHECK(spec.eigenvalues(0) == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(spec.eigenvalues(1) == doctest::Approx(2.0).epsilon(1e-10));

    // kernel vector (i, 1)/sqrt(2), gauge-rotated so entry 0 is real-positive
    Complex a = spec.eigenvectors(0, 0), b = spec.eigenvectors(1, 0);
    CHECK(std::abs(a - Complex{std::sqrt(0.5), 0}) < 1e-10);
    CHECK(std::abs(b - Complex{0, -std::sqrt(0.5)}) < 1e-10);
}

TEST_CASE("q = 0 reduces to the symmetrized combinatorial laplacian") {
    SplitMix64 rng(5);
    for (int i = 0; i < 10; ++i) {
        Spg g = synth::random_digraph(rng, 3 + static_cast<int>(rng.next_below(10)), 0.3);
        MagneticLaplacian lap = magnetic_laplacian(g, 0.0);
        CHECK(lap.entries.imag().cwiseAbs().maxCoeff() == 0.0);

        Eigen::MatrixXi a = adjacency_matrix(g);
        for (int u = 0; u < g.n; ++u)
            for (int v = 0; v < g.n; ++v)
                if (u != v && (a(u, v) || a(v, u)))
                    CHECK(lap.entries(u, v) == Complex{-1.0, 0.0});
    }
}

TEST_CASE("reciprocated edges stay real for any q") {
    Spg g;
    g.n = 2;
    g.node_labels = {"u", "v"};
    g.edges = {{0, 1}, {1, 0}};
    for (double q : {0.1, 0.25, 0.5}) {
        MagneticLaplacian lap = magnetic_laplacian(g, q);
        CHECK(lap.entries.imag().cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("directed 3-cycle matches the characteristic-polynomial oracle") {
    MagneticLaplacian lap = magnetic_laplacian(directed_cycle(3), 0.25);
    Spectrum spec = hermitian_eigen(lap);
    auto expected = oracle::hermitian3_char_poly_eigenvalues(lap.entries);
    for (int i = 0; i < 3; ++i)
        CHECK(spec.eigenvalues(i) == doctest::Approx(expected[i]).epsilon(1e-8));
}

TEST_CASE("random digraphs satisfy the operator invariants") {
    SplitMix64 rng(17);
    for (int i = 0; i < 25; ++i) {
        int n = 2 + static_cast<int>(rng.next_below(20));
        Spg g = synth::random_digraph(rng, n, 0.25);
        for (double q : {0.0, 0.1, 0.25, 0.5}) {
            MagneticLaplacian lap = magnetic_laplacian(g, q);
            CHECK(hermitian_defect(lap.entries) == 0.0);
            Spectrum spec = hermitian_eigen(lap);
            CHECK(spec.eigenvalues(0) >= -1e-8);
            CHECK(orthonormality_defect(spec.eigenvectors) < 1e-8);
            CHECK(residual(lap.entries, spec) < 1e-7);
            for (int c = 1; c < spec.k_eff(); ++c)
                CHECK(spec.eigenvalues(c) >= spec.eigenvalues(c - 1) - 1e-9);
        }
        // q = 0 spectrum equals the real symmetric operator's, via Jacobi
        MagneticLaplacian real_case = magnetic_laplacian(g, 0.0);
        Spectrum spec0 = hermitian_eigen(real_case);
        auto jacobi = oracle::jacobi_eigenvalues(real_case.entries.real());
        for (int c = 0; c < g.n; ++c)
            CHECK(spec0.eigenvalues(c) == doctest::Approx(jacobi[c]).epsilon(1e-8));
    }
}

TEST_CASE("gauge fixing makes the leading entry real and non-negative") {
    SplitMix64 rng(29);
    for (int i = 0; i < 10; ++i) {
        Spg g = synth::random_digraph(rng, 8, 0.3);
        Spectrum spec = hermitian_eigen(magnetic_laplacian(g, 0.25));
        for (int c = 0; c < spec.k_eff(); ++c) {
            double max_mag = 0;
            for (Eigen::Index r = 0; r < spec.eigenvectors.rows(); ++r)
                max_mag = std::max(max_mag, std::abs(spec.eigenvectors(r, c)));
            // the gauge entry: lowest index within the tie band of the max
            Eigen::Index chosen = 0;
            for (Eigen::Index r = 0; r < spec.eigenvectors.rows(); ++r) {
                if (std::abs(spec.eigenvectors(r, c)) >= max_mag * (1.0 - 1e-12)) {
                    chosen = r;
                    break;
                }
            }
            CHECK(spec.eigenvectors(chosen, c).imag() == 0.0);
            CHECK(spec.eigenvectors(chosen, c).real() >= 0.0);
            CHECK(std::abs(spec.eigenvectors(chosen, c)) >= max_mag * (1.0 - 1e-12));
        }
    }
}

TEST_CASE("node relabeling permutes encodings under the canonical gauge") {
    SplitMix64 rng(31);
    int done = 0;
    while (done < 8) {
        int n = 4 + static_cast<int>(rng.next_below(10));
        Spg g = synth::random_digraph(rng, n, 0.35);
        Spectrum spec = hermitian_eigen(magnetic_laplacian(g, 0.25));
        if (!synth::generic_spectrum(spec)) continue;
        ++done;

        auto perm = synth::random_permutation(rng, n);
        Spg h = synth::permute_spg(g, perm);
        Spectrum spec_h = hermitian_eigen(magnetic_laplacian(h, 0.25));
        // eigenvalue multiset is relabeling-invariant
        CHECK((spec_h.eigenvalues - spec.eigenvalues).cwiseAbs().maxCoeff() < 1e-9);
        Eigen::MatrixXd pe_g = node_pes(spec, n);
        Eigen::MatrixXd pe_h = node_pes(spec_h, n);
        for (int r = 0; r < n; ++r)
            CHECK((pe_h.row(perm[r]) - pe_g.row(r)).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("pointer-group swaps commute with the operator") {
    LabelSequence seq = bfs_linearize(parse_penman(
        "(w / want-01 :ARG0 (c / child) :ARG1 (b / believe-01 :ARG0 (p / parent) :ARG1 c))"));
    Spg spg = transform(seq);
    MagneticLaplacian lap = magnetic_laplacian(spg, 0.25);
    for (const auto& [pointer, members] : spg.pointer_groups) {
        if (members.size() < 2) continue;
        Eigen::MatrixXd p = Eigen::MatrixXd::Identity(spg.n, spg.n);
        p(members[0], members[0]) = 0;
        p(members[1], members[1]) = 0;
        p(members[0], members[1]) = 1;
        p(members[1], members[0]) = 1;
        Eigen::MatrixXcd left = p * lap.entries;
        Eigen::MatrixXcd right = lap.entries * p;
        CHECK((left - right).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("node encodings select, concatenate, and pad") {
    Spectrum spec = hermitian_eigen(magnetic_laplacian(single_node(), 0.25));
    Eigen::MatrixXd pe = node_pes(spec, 2);
    REQUIRE(pe.rows() == 1);
    REQUIRE(pe.cols() == 4);
    CHECK(pe(0, 0) == 1.0);
    CHECK(pe(0, 1) == 0.0);
    CHECK(pe(0, 2) == 0.0);
    CHECK(pe(0, 3) == 0.0);

    SplitMix64 rng(3);
    Spg g = synth::random_digraph(rng, 5, 0.4);
    Eigen::MatrixXd wide = node_pes(hermitian_eigen(magnetic_laplacian(g, 0.25)), 30);
    REQUIRE(wide.rows() == 5);
    REQUIRE(wide.cols() == 60);
    for (int c = 5; c < 30; ++c)
        CHECK(wide.col(c).cwiseAbs().maxCoeff() == 0.0);
    for (int c = 35; c < 60; ++c)
        CHECK(wide.col(c).cwiseAbs().maxCoeff() == 0.0);

    // q = 0 leaves the imaginary half identically zero
    Eigen::MatrixXd real_pe = node_pes(hermitian_eigen(magnetic_laplacian(g, 0.0)), 5);
    for (int c = 5; c < 10; ++c)
        CHECK(real_pe.col(c).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("lowest-k spectrum is a prefix of the full one") {
    SplitMix64 rng(43);
    Spg g = synth::random_digraph(rng, 12, 0.3);
    MagneticLaplacian lap = magnetic_laplacian(g, 0.25);
    Spectrum full = hermitian_eigen(lap);
    Spectrum low = hermitian_eigen_lowest(lap, 4);
    REQUIRE(low.k_eff() == 4);
    CHECK((low.eigenvalues - full.eigenvalues.head(4)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((low.eigenvectors - full.eigenvectors.leftCols(4)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("normalized symmetrized laplacian") {
    Eigen::MatrixXd single = symmetrized_normalized_laplacian(single_node());
    REQUIRE(single.rows() == 1);
    CHECK(single(0, 0) == 0.0);

    Eigen::MatrixXd pair = symmetrized_normalized_laplacian(two_node_edge());
    CHECK(pair(0, 0) == 1.0);
    CHECK(pair(0, 1) == -1.0);
    CHECK(pair(1, 0) == -1.0);
    CHECK(pair(1, 1) == 1.0);

    SplitMix64 rng(51);
    for (int i = 0; i < 10; ++i) {
        Spg g = synth::random_digraph(rng, 3 + static_cast<int>(rng.next_below(12)), 0.4);
        auto values = oracle::jacobi_eigenvalues(symmetrized_normalized_laplacian(g));
        CHECK(values.front() >= -1e-9);
        CHECK(values.back() <= 2.0 + 1e-9);
    }
}

} // TEST_SUITE
