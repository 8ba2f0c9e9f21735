#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "latsch/eigensolve.hpp"
#include "latsch/lanczos.hpp"
#include "latsch/spectral.hpp"
#include "oracles.hpp"

using namespace latsch;

TEST_CASE("eigensolve: 1-d chain matches the closed form to 1e-10") {
    for (int L : {5, 12, 30}) {
        AssembledOperator op = assemble_whole_space_box(1, L, FieldR(1));
        EigenReport rep = eigensolve(op);
        auto expect = oracles::chain_eigenvalues(L);
        REQUIRE(rep.eigenvalues.size() == expect.size());
        for (size_t i = 0; i < expect.size(); ++i)
            CHECK(std::abs(rep.eigenvalues[i] - expect[i]) <= 1e-10);
    }
}

TEST_CASE("eigensolve: 1x1 Dirichlet problem") {
    ClassifiedSet box = ClassifiedSet::box(2, Box::centered(2, 1));
    FieldR V(2);
    V.set(Site{0, 0}, -0.375);
    AssembledOperator op = assemble(box, V, BcKind::dirichlet);
    EigenReport rep = eigensolve(op);
    REQUIRE(rep.eigenvalues.size() == 1);
    CHECK(rep.eigenvalues[0] == doctest::Approx(0.625).epsilon(1e-14));
}

TEST_CASE("eigensolve: free 2-d box stays in the band, residuals small") {
    AssembledOperator op = assemble_whole_space_box(2, 20, FieldR(2));
    EigenReport rep = eigensolve(op);
    CHECK(rep.eigenvalues.front() >= -1e-12);
    CHECK(rep.eigenvalues.back() <= 2.0 + 1e-12);
    CHECK(rep.max_residual <= 1e-8);
    CHECK(rep.ortho_defect <= 1e-10);

    auto expect = oracles::box_eigenvalues(2, 20);
    for (size_t i = 0; i < expect.size(); i += 37)
        CHECK(std::abs(rep.eigenvalues[i] - expect[i]) <= 1e-10);
}

TEST_CASE("essential spectrum probe: discrepancy decreases over the box schedule") {
    SpectrumProbe probe =
        essential_spectrum_probe(2, FieldR(2), BcKind::whole_space_box, {10, 20, 40});
    REQUIRE(probe.rows.size() == 3);
    CHECK(probe.rows[0].ids_discrepancy > probe.rows[1].ids_discrepancy);
    CHECK(probe.rows[1].ids_discrepancy > probe.rows[2].ids_discrepancy);
    for (const auto& row : probe.rows) CHECK(row.outside_band == 0);

    // IDS oracle: direct counting agrees with the quadrature the lib uses
    for (double t : {0.3, 1.0, 1.6})
        CHECK(std::abs(free_ids(2, t) - oracles::ids_by_counting(2, t)) <= 2e-3);
}

TEST_CASE("essential spectrum probe: zero-norm potential equals the free case") {
    FieldR V(2);
    V.set(Site{40, 40}, 0.0);   // explicitly stored zero, norm_inf = 0
    SpectrumProbe a = essential_spectrum_probe(2, FieldR(2), BcKind::whole_space_box, {12});
    SpectrumProbe b = essential_spectrum_probe(2, V, BcKind::whole_space_box, {12});
    for (size_t i = 0; i < a.rows[0].bin_occupancy.size(); ++i)
        CHECK(a.rows[0].bin_occupancy[i] == b.rows[0].bin_occupancy[i]);
}

TEST_CASE("essential spectrum probe: rank-one spike sheds at most one outlier") {
    FieldR V = FieldR::delta(Site{0, 0}, 5.0);
    SpectrumProbe probe =
        essential_spectrum_probe(2, V, BcKind::whole_space_box, {11, 21, 31});
    for (const auto& row : probe.rows) CHECK(row.outside_band <= 1);
    CHECK(probe.rows[0].outside_band == probe.rows[1].outside_band);
    CHECK(probe.rows[1].outside_band == probe.rows[2].outside_band);
}

TEST_CASE("essential spectrum probe: exterior Dirichlet windows also approach the IDS") {
    std::set<Site> obstacle = obstacle_rectangle({1, 1});
    SpectrumProbe probe =
        essential_spectrum_probe(2, FieldR(2), BcKind::dirichlet, {16, 28}, 64, &obstacle);
    REQUIRE(probe.rows.size() == 2);
    for (const auto& row : probe.rows) {
        double total = 0;
        for (double b : row.bin_occupancy) total += b;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(row.outside_band == 0);
    }
    CHECK(probe.rows[1].ids_discrepancy < probe.rows[0].ids_discrepancy);
}

TEST_CASE("exterior Dirichlet and Robin spectra stay in the band (Gershgorin face)") {
    std::set<Site> obstacle = obstacle_rectangle({2, 2});
    ExteriorDomain dom = classify_domain(2, obstacle, 9);
    for (BcKind bc : {BcKind::dirichlet, BcKind::robin}) {
        AssembledOperator op = assemble(
            dom, FieldR(2), bc,
            bc == BcKind::robin ? uniform_robin(dom.windowed(), 0.0) : std::map<Site, double>{});
        CHECK(op.matrix.symmetry_defect() == 0.0);
        EigenPairs p = dense_eigensolve(op.matrix, false);
        CHECK(p.values.front() >= -1e-12);
        CHECK(p.values.back() <= 2.0 + 1e-12);
    }
}

TEST_CASE("window_eigenpairs: slicing engine agrees with the dense solver") {
    CounterRng rng(61, "test/slicing");
    FieldR V = oracles::random_potential(rng, 2, 2);
    for (int side : {21, 33}) {
        AssembledOperator op = assemble_whole_space_box(2, side, V);
        EigenPairs dense = dense_eigensolve(op.matrix, true, true, 0.5, 1.5);
        auto sliced = window_eigenpairs(op.matrix, 0.5, 1.5);
        REQUIRE(sliced.size() == dense.values.size());
        for (size_t i = 0; i < sliced.size(); ++i)
            CHECK(std::abs(sliced[i].value - dense.values[i]) <= 1e-9);

        // localization agrees through the cluster-Gram reduction
        std::vector<int> probe_rows;
        for (int i = 0; i < op.size(); ++i)
            if (op.site_index[static_cast<size_t>(i)].norm() <= 6.0) probe_rows.push_back(i);
        EigenPairs repack;
        repack.n = op.size();
        for (auto& p : sliced) {
            repack.values.push_back(p.value);
            repack.vectors.insert(repack.vectors.end(), p.vector.begin(), p.vector.end());
        }
        auto la = detail::cluster_localization(dense, probe_rows);
        auto lb = detail::cluster_localization(repack, probe_rows);
        double ma = *std::max_element(la.begin(), la.end());
        double mb = *std::max_element(lb.begin(), lb.end());
        // near-degenerate clusters admit a basis spread proportional to the
        // accepted residual over the cluster gap
        CHECK(std::abs(ma - mb) <= 1e-4);
    }
}

TEST_CASE("eigen_count_below: Sturm counts match the dense spectrum") {
    CounterRng rng(67, "test/inertia");
    FieldR V = oracles::random_potential(rng, 2, 1);
    AssembledOperator op = assemble_whole_space_box(2, 15, V);
    EigenPairs p = dense_eigensolve(op.matrix, false);
    // sigma = 1.0 sits on singular leading minors of the free part, so it
    // also exercises the breakdown handling
    for (double sigma : {0.25, 0.7, 1.0, 1.33, 1.9}) {
        InertiaCount ic = eigen_count_below(op.matrix, sigma);
        int dense_count = 0;
        for (double ev : p.values)
            if (ev < ic.sigma_used) ++dense_count;
        CHECK(ic.count == dense_count);
    }
}

TEST_CASE("embedded scan: free case decays like the probe/box area ratio") {
    EmbeddedScan scan = embedded_scan(2, FieldR(2), 0.5, 1.5, 6.0, {15, 31});
    REQUIRE(scan.rows.size() == 2);
    CHECK(scan.rows[0].max_localization > scan.rows[1].max_localization);

    // oracle: same quantity assembled from the closed-form sin products
    for (size_t r = 0; r < scan.rows.size(); ++r) {
        int side = scan.rows[r].box_size;
        int lo = -side / 2;
        auto one = oracles::chain_eigenvalues(side);
        std::vector<std::pair<double, std::pair<int, int>>> evs;
        for (int k1 = 1; k1 <= side; ++k1)
            for (int k2 = 1; k2 <= side; ++k2) {
                double ev = one[static_cast<size_t>(k1) - 1] + one[static_cast<size_t>(k2) - 1];
                if (ev >= 0.5 && ev < 1.5) evs.push_back({ev, {k1, k2}});
            }
        CHECK(static_cast<int>(evs.size()) == scan.rows[r].pairs_in_window);
        std::sort(evs.begin(), evs.end());
        // cluster degenerate eigenvalues and take the Gram top eigenvalue
        std::vector<std::vector<int>> probe_offsets;
        for (int i = 0; i < side; ++i)
            for (int j = 0; j < side; ++j) {
                double x = lo + i, y = lo + j;
                if (std::sqrt(x * x + y * y) <= 6.0) probe_offsets.push_back({i, j});
            }
        double oracle_max = 0;
        size_t i = 0;
        while (i < evs.size()) {
            size_t j = i + 1;
            while (j < evs.size() && evs[j].first - evs[j - 1].first <= 1e-9) ++j;
            size_t k = j - i;
            Eigen::MatrixXd G(static_cast<Eigen::Index>(probe_offsets.size()),
                              static_cast<Eigen::Index>(k));
            for (size_t c = 0; c < k; ++c)
                for (size_t rr = 0; rr < probe_offsets.size(); ++rr)
                    G(static_cast<Eigen::Index>(rr), static_cast<Eigen::Index>(c)) =
                        oracles::box_eigvec(side, {evs[i + c].second.first, evs[i + c].second.second},
                                            probe_offsets[rr]);
            Eigen::MatrixXd S = G.transpose() * G;
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
            oracle_max = std::max(oracle_max, es.eigenvalues().maxCoeff());
            i = j;
        }
        CHECK(std::abs(scan.rows[r].max_localization - oracle_max) <= 1e-8);
    }
}

TEST_CASE("embedded scan: window filter excludes potential-induced bound states") {
    FieldR V = FieldR::delta(Site{0, 0}, -3.0);   // bound state below the band
    AssembledOperator op = assemble_whole_space_box(2, 15, V);
    EigenPairs p = dense_eigensolve(op.matrix, false);
    CHECK(p.values.front() < 0.0);
    EmbeddedScan scan = embedded_scan(2, V, 0.5, 1.5, 5.0, {15});
    for (const auto& row : scan.rows) CHECK(row.max_localization < 0.9);
}
